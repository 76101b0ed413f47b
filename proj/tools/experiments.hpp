#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "qheom/analytics.hpp"
#include "qheom/bath.hpp"
#include "qheom/control.hpp"
#include "qheom/crgate.hpp"
#include "qheom/heom.hpp"
#include "qheom/tomography.hpp"

namespace qheom::cli {

/// Noise attached to an n-qubit register: one HEOM channel or one Lindblad
/// term per qubit, all with the same bath.
struct NoiseSetup {
  NoiseMode mode = NoiseMode::None;
  std::vector<heom::DissipationChannel> channels;
  std::vector<heom::LindbladDephasing> lindblad;
  std::optional<bath::FitResult> fit;
  double static_variance = 0.0;
  std::size_t hierarchy_size = 1;
};

/// Builds the noise for `num_qubits` qubits; the decomposition (if any) is fit
/// over `span` ns unless bath.fit_horizon is set.
NoiseSetup build_noise(const ExperimentConfig& config, std::size_t num_qubits, double span);

/// Propagates rho0 under the configured noise.
heom::Trajectory evolve(const ExperimentConfig& config, const NoiseSetup& noise, const CMatrix& rho0,
                        const heom::Hamiltonian& hamiltonian, double t0, double t_end, heom::PropagationPlan plan);

/// t0, t0 + step, ..., t_end (t_end always included).
std::vector<double> sample_grid(double t0, double t_end, double step);

/// |+><+|.
CMatrix plus_state();

struct DephasingResult {
  NoiseSetup noise;
  heom::Trajectory trajectory;
  std::vector<double> reference;  // oracle |rho_01|
  double max_deviation = 0.0;
};
DephasingResult run_free_dephasing(const ExperimentConfig& config);

struct EchoResult {
  NoiseSetup noise;
  control::PulseSchedule ideal, finite;
  heom::Trajectory ideal_trajectory, finite_trajectory;
  analytics::EchoSeries echoes;  // finite peaks with delta = ideal - finite
  std::vector<double> ideal_peaks;
  std::vector<double> population_errors;
  // Fits over all echoes, then over odd and even pulses separately.
  struct Fits {
    std::optional<analytics::ScalingFit> linear, quadratic;
  };
  Fits all, odd, even;
};
control::PulseSchedule make_schedule(const ExperimentConfig& config, bool ideal);
EchoResult run_echo(const ExperimentConfig& config);

struct TnlResult {
  NoiseSetup noise;
  std::vector<double> times;
  std::vector<double> exact;
  std::vector<double> converged;
  std::vector<std::vector<double>> truncated;  // one per solver.tnl_depths entry
  double converged_error = 0.0;                // max |converged - exact|
};
TnlResult run_tnl_compare(const ExperimentConfig& config);

struct FidelityResult {
  NoiseSetup noise;
  std::vector<double> times;
  std::vector<double> fidelity;
  std::vector<tomography::QuantumChannel> channels;
  analytics::ScalingFit early;            // b t + a t^2 over the first quarter of the pulse
  analytics::ScalingFit pure_quadratic;   // a t^2 over the pulse
  analytics::ExponentialFit exponential;  // a (1 - exp(-t / s)) over the pulse
};
/// Time-resolved noisy channel of U_post E(t) U_pre against the noiseless
/// calibrated gate.
FidelityResult run_cr_fidelity(const ExperimentConfig& config);

struct TomographyResult {
  NoiseSetup noise;
  CMatrix choi;
  RMatrix ptm, calibrated_ptm, ideal_ptm;
  RMatrix error_ptm;      // noisy - calibrated
  RMatrix coherent_ptm;   // calibrated - ideal
  tomography::Diagnostics diagnostics;
  double fidelity = 0.0;  // against the calibrated gate
};
TomographyResult run_cr_tomography(const ExperimentConfig& config);

struct DecomposeResult {
  bath::FitResult fit;
  double horizon = 0.0;
  double total_power = 0.0;       // integral of S over the real line
  double positive_power = 0.0;    // integral of S over [0, inf)
  double low_band = 0.0;          // integral of S over [0, omega_lc]
  std::optional<double> t_phi;
  std::vector<double> times;
  std::vector<cplx> exact, fitted;
};
DecomposeResult run_decompose(const ExperimentConfig& config);

crgate::Calibration run_calibrate(const ExperimentConfig& config);

/// A rendered output file.
struct Artifact {
  std::string name;
  std::string content;
};

struct RunOutput {
  std::vector<Artifact> files;
  std::optional<double> certified_error;  // relative decomposition error
  std::size_t hierarchy_size = 0;
};

/// Runs the configured experiment and renders its files (deterministic text).
RunOutput run(const ExperimentConfig& config);

/// Schedule as index,start_ns,duration_ns,axis CSV.
std::string schedule_csv(const control::PulseSchedule& schedule);

/// Shortest round-trip decimal form, independent of the locale.
std::string num(double v);

}  // namespace qheom::cli
