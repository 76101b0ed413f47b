#pragma once

#include <string>

#include "config.hpp"
#include "experiments.hpp"

namespace qheom::cli {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// JSON manifest: config digest, solver settings, certified decomposition
/// error and a digest per output file.
std::string manifest_json(const ExperimentConfig& config, const std::string& config_bytes, const RunOutput& output,
                          bool seedless);

/// Writes every artifact plus manifest.json into `dir` (created if needed).
void write_outputs(const std::string& dir, const ExperimentConfig& config, const std::string& config_bytes,
                   const RunOutput& output, bool seedless);

}  // namespace qheom::cli
