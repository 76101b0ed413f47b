#include "manifest.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "json.hpp"

namespace qheom::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string manifest_json(const ExperimentConfig& config, const std::string& config_bytes, const RunOutput& output,
                          bool seedless) {
  nlohmann::ordered_json m;
  m["experiment"] = experiment_name(config.experiment);
  m["config_sha256"] = sha256_hex(config_bytes);
  m["noise"] = noise_name(config.bath.noise);
  m["seedless"] = seedless;
  auto& s = m["solver"];
  s["depth"] = config.solver.depth;
  s["static_depth"] = config.solver.static_depth;
  s["dt_ns"] = num(config.solver.dt);
  s["stepper"] = config.solver.stepper == heom::Stepper::Rk4 ? "rk4" : "if_rk4";
  s["layout"] = config.solver.layout == heom::Layout::Merged ? "merged" : "paired";
  s["importance_threshold"] = num(config.solver.importance_threshold);
  s["hierarchy_size"] = output.hierarchy_size;
  if (output.certified_error)
    m["certified_decomposition_error"] = num(*output.certified_error);
  else
    m["certified_decomposition_error"] = nullptr;
  auto files = nlohmann::ordered_json::array();
  for (const auto& f : output.files) files.push_back({{"name", f.name}, {"bytes", f.content.size()}, {"sha256", sha256_hex(f.content)}});
  m["files"] = files;
  return m.dump(2) + "\n";
}

void write_outputs(const std::string& dir, const ExperimentConfig& config, const std::string& config_bytes,
                   const RunOutput& output, bool seedless) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    f << content;
  };
  for (const auto& a : output.files) write(a.name, a.content);
  write("manifest.json", manifest_json(config, config_bytes, output, seedless));
}

}  // namespace qheom::cli
