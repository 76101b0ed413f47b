#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qheom/bath.hpp"
#include "qheom/crgate.hpp"
#include "qheom/heom.hpp"

namespace qheom::cli {

enum class Experiment { FreeDephasing, Cpmg, Udd, CrFidelity, CrTomography, Decompose, CalibrateCr, TnlCompare };
enum class NoiseMode { None, Full1f, CutoffPlusStatic, TotalStatic, Lindblad };

/// Validation failure. `path` names the offending field ("bath.eta").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

struct BathSection {
  bath::BathModel model = bath::BathModel::table_one();
  NoiseMode noise = NoiseMode::Full1f;
  double t_phi = 576.0;                    // ns, Lindblad reference
  std::optional<double> static_variance;   // overrides the band integral
  double fit_tolerance = 1e-3;
  std::size_t max_terms = 48;
  std::optional<double> fit_horizon;       // ns; default is the simulated span
};

struct ScheduleSection {
  std::size_t pulses = 20;
  std::string pattern = "X";
  double tau = 15.0;        // ns
  double delta_t = 118.0;   // ns, CPMG free gap
  double t1 = 59.0;         // ns, CPMG first start
  double total = 2660.0;    // ns, UDD only
};

struct SolverSection {
  std::size_t depth = 8;
  double dt = 0.01;
  heom::Stepper stepper = heom::Stepper::Rk4;
  heom::Layout layout = heom::Layout::Merged;
  double importance_threshold = 0.0;
  std::size_t max_ados = 4'000'000;
  std::vector<std::size_t> tnl_depths{1, 2, 3};
  std::size_t static_depth = 8;   // hierarchy depth for static-only channels
};

struct OutputSection {
  double t_end = 500.0;        // ns, free_dephasing / tnl_compare / decompose
  double sample_step = 1.0;    // ns
  std::size_t top_k = 8;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::FreeDephasing;
  BathSection bath;
  ScheduleSection schedule;
  crgate::CrParams cr = crgate::CrParams::table_four();
  crgate::SearchConfig search;
  SolverSection solver;
  OutputSection output;

  heom::PropagatorConfig propagator() const;
};

/// Parses and validates JSON text. Unknown keys, wrong types and out-of-range
/// values throw ConfigError with the field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

std::string experiment_name(Experiment e);
std::string noise_name(NoiseMode n);

/// Physics advisories (not errors): dispersive regime, explicit RK4 step size.
std::vector<std::string> advisories(const ExperimentConfig& config);

}  // namespace qheom::cli
