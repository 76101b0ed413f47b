#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qheom/linalg.hpp"

namespace qheom::crgate {

/// Cross-resonance parameters. Qubit 1 (control, driven) is the leftmost
/// tensor factor. Rotation angles are for R_z(theta) = exp(-i theta Z / 2).
struct CrParams {
  double detuning = 0.0;   // Delta, 1/ns
  double coupling = 0.0;   // g, 1/ns
  double duration = 0.0;   // tau, ns
  double amplitude = 0.0;  // Omega, 1/ns
  double rz_pre_1 = 0.0;
  double rz_post_1 = 0.0;
  double rz_pre_2 = 0.0;
  double rz_post_2 = 0.0;

  /// Calibrated reference point: Delta = 0.5148, g = 0.05, tau = 132 ns,
  /// Omega = 0.1056 and the matching corrective rotations.
  static CrParams table_four();

  void validate() const;
  /// True when |Delta| is not at least 5x both g and Omega.
  bool dispersive_advisory() const;
};

/// (Delta/2) ZI + g (XX + YY) + (Omega(t)/2) XI with Omega(t) = Omega on [0, tau).
CMatrix cr_hamiltonian(double t, const CrParams& params);

/// exp(-i (pi/4) ZX).
CMatrix ideal_unitary();

/// g Omega tau / Delta - theta. Throws std::invalid_argument for Delta = 0.
double cr_area_condition(const CrParams& params, double theta);

/// Omega with zero area residual: theta Delta / (g tau).
double seed_amplitude(double detuning, double coupling, double duration, double theta);

/// exp(-i theta Z / 2).
CMatrix rz(double theta);

CMatrix pre_rotation(const CrParams& params);
CMatrix post_rotation(const CrParams& params);

/// Noiseless propagator of the in-pulse Hamiltonian up to t in [0, tau].
CMatrix cr_propagator(const CrParams& params, double t);

/// U_post U_CR(t) U_pre.
CMatrix calibrated_propagator(const CrParams& params, double t);

/// Pauli coefficients of the Hermitian and anti-Hermitian parts of D:
/// D = H + i A, c_P = Tr(P H) / d and a_P = Tr(P A) / d, in the fixed
/// label order II, IX, ..., ZZ.
struct PauliProjection {
  std::vector<std::string> labels;
  std::vector<double> hermitian;
  std::vector<double> anti_hermitian;
};
PauliProjection pauli_projection(const CMatrix& difference);

struct SearchConfig {
  double theta = 0.5 * kPi;
  std::size_t max_iterations = 12;
  double target_fidelity = 0.999;
  std::size_t rz_grid = 48;                // coarse points per angle in [-pi, pi)
  double amplitude_step = 0.05;            // relative step for Omega
  double duration_step = 0.02;             // relative step for tau
  double detuning_step = 0.0;              // relative step for Delta; 0 keeps Delta fixed
  double shrink = 0.5;                     // step factor after a sweep without improvement
};

struct CalibrationReport {
  double fidelity = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  PauliProjection residuals;  // of U_calibrated - U_ideal
};

/// Deterministic calibration loop: seed Omega from the area condition, then
/// alternate corrective R_z optimization with coordinate refinement of
/// (Omega, tau, Delta) until the target fidelity or max_iterations.
struct Calibration {
  CrParams params;
  CalibrationReport report;
};
Calibration calibrate(const CrParams& seed, const SearchConfig& search = {});

/// Best corrective rotations for fixed (Delta, g, tau, Omega).
CrParams optimize_rotations(const CrParams& params, std::size_t grid);

}  // namespace qheom::crgate
