#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "manifest.hpp"
#include "qheom/control.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kSolver = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qheom::cli::ConfigError("--config", "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace qheom::cli;
  CLI::App app{"HEOM qubit-noise experiments"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  int threads = 0;
  bool seedless = false;

  auto* run_cmd = app.add_subcommand("run", "run the configured experiment");
  auto* validate_cmd = app.add_subcommand("validate", "check a config and print advisories");
  auto* decompose_cmd = app.add_subcommand("decompose", "fit the bath correlation function and report");
  auto* dump_cmd = app.add_subcommand("schedule-dump", "print the pulse schedule as CSV");
  for (auto* c : {run_cmd, validate_cmd, decompose_cmd, dump_cmd}) c->add_option("--config", config_path)->required();
  for (auto* c : {run_cmd, decompose_cmd}) c->add_option("--out", out_dir)->required();
  dump_cmd->add_option("--out", out_dir, "directory for schedule.csv (stdout if omitted)");
  for (auto* c : {run_cmd, decompose_cmd}) {
    c->add_option("--threads", threads, "OpenMP threads (0 keeps the default)")->check(CLI::NonNegativeNumber);
    c->add_flag("--seedless", seedless, "assert that no random numbers are used");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }
  if (threads > 0) omp_set_num_threads(threads);

  std::string bytes;
  ExperimentConfig config;
  try {
    bytes = read_file(config_path);
    config = parse_config(bytes);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kValidation;
  }

  if (*validate_cmd) {
    std::cout << "ok: " << experiment_name(config.experiment) << " (" << noise_name(config.bath.noise) << ")\n";
    for (const auto& a : advisories(config)) std::cout << "advisory: " << a << "\n";
    return kOk;
  }
  if (*dump_cmd) {
    if (config.experiment != Experiment::Cpmg && config.experiment != Experiment::Udd) {
      std::cerr << "config error: experiment: schedule-dump needs cpmg or udd\n";
      return kValidation;
    }
    const std::string csv = schedule_csv(make_schedule(config, false));
    if (out_dir.empty()) {
      std::cout << csv;
    } else {
      RunOutput o;
      o.files.push_back({"schedule.csv", csv});
      write_outputs(out_dir, config, bytes, o, true);
    }
    return kOk;
  }
  if (*decompose_cmd) config.experiment = Experiment::Decompose;

  for (const auto& a : advisories(config)) std::cerr << "advisory: " << a << "\n";
  try {
    const RunOutput output = run(config);
    write_outputs(out_dir, config, bytes, output, seedless);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  }
  return kOk;
}
