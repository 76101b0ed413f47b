#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qheom/linalg.hpp"
#include "qheom/quadrature.hpp"

namespace qheom::bath {

/// Power-law spectral density with a Lorentzian-squared high-frequency
/// cutoff and a soft (logistic) low-frequency cutoff. s = 0 gives 1/f noise.
///
/// Frequencies in 1/ns, beta in ns (see units.hpp).
struct BathModel {
  double eta = 1e-7;         // dimensionless coupling
  double s = 0.0;            // spectral exponent
  double omega_q = 5.0;      // characteristic frequency
  double omega_hc = 10.0;    // high-frequency cutoff
  double omega_lc = 1e-5;    // low-frequency cutoff
  double phi_width = 1e-6;   // width of the soft step
  double beta = 1.0;         // inverse temperature

  /// Single-qubit 1/f bath at 50 mK with a 10 kHz low cutoff.
  static BathModel table_one();

  /// Copy with a new low cutoff; the step width follows as omega_lc / 10.
  BathModel with_low_cutoff(double omega_lc) const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// J(omega), antisymmetric in omega.
double spectral_density(double omega, const BathModel& model);

/// S(omega) = J(omega) / (1 - exp(-beta omega)).
double psd(double omega, const BathModel& model);

/// Positive-frequency view of a spectral density used by the quadrature
/// routines. `density` is J(omega) for omega > 0; the negative branch follows
/// from antisymmetry.
struct Spectrum {
  std::function<double(double)> density;
  double beta = 1.0;
  double floor = 0.0;                 // lowest frequency integrated
  double window = 0.0;                // above: semi-infinite Fourier tail
  std::vector<double> features;       // frequencies where panels must break
  double power_law_exponent = 0.0;    // J ~ omega^p as omega -> infinity (for checks)
};

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;       // relative to the C(0) scale of the spectrum
  double window_factor = 5.0;   // panels up to window_factor * omega_hc
  double floor_factor = 1e-2;   // integrals start at floor_factor * omega_lc
  double panels_per_decade = 6.0;
  std::size_t limit = 2000;
};

Spectrum make_spectrum(const BathModel& model, const QuadratureConfig& cfg = {});

/// Drude-Lorentz (single-pole Debye) spectral density
/// J = eta * omega * omega_c^2 / (omega^2 + omega_c^2).
Spectrum debye_spectrum(double eta, double omega_c, double beta, const QuadratureConfig& cfg = {});

/// Integral of S over the whole real line, (1/pi) of which is Re C(0).
double total_power(const Spectrum& spectrum, const QuadratureConfig& cfg = {});

/// C(t) = (1/pi) * Integral exp(-i omega t) S(omega) d omega.
/// Throws quad::QuadratureError with the achieved estimate on failure.
cplx correlation_function(double t, const Spectrum& spectrum, const QuadratureConfig& cfg = {});
cplx correlation_function(double t, const BathModel& model, const QuadratureConfig& cfg = {});

struct ExpTerm {
  cplx amplitude;  // d_k
  cplx rate;       // gamma_k, Re > 0
};

/// C(t) ~ sum_k d_k exp(-gamma_k t) + static_variance.
struct ExponentialSeries {
  std::vector<ExpTerm> terms;
  double static_variance = 0.0;

  bool empty() const noexcept { return terms.empty() && static_variance == 0.0; }
  /// Throws std::invalid_argument if a dynamic term has Re(gamma) <= 0 or the
  /// static variance is negative.
  void validate() const;
};

cplx reconstruct(const ExponentialSeries& series, double t);

struct FitConfig {
  std::size_t max_terms = 48;
  double samples_per_decade = 40.0;
  std::size_t uniform_samples = 400;
  double ridge = 1e-4;  // Tikhonov weight, relative to the RMS column norm
  QuadratureConfig quad{};
};

struct FitResult {
  ExponentialSeries series;
  double max_abs_error = 0.0;       // on the certification grid
  double relative_error = 0.0;      // max_abs_error / |C(0)|
  double c0_abs = 0.0;
  std::size_t certification_points = 0;
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, double best_relative_error, std::size_t max_terms)
      : std::runtime_error(what), best_relative_error_(best_relative_error), max_terms_(max_terms) {}
  double best_relative_error() const noexcept { return best_relative_error_; }
  std::size_t max_terms() const noexcept { return max_terms_; }

 private:
  double best_relative_error_;
  std::size_t max_terms_;
};

/// Deterministic sum-of-exponentials fit of C(t) on [0, horizon] with
/// certified max error <= tolerance * |C(0)| on a grid twice as dense as the
/// fitting grid. Rates are real and log-spaced from 1/horizon upward; the part
/// of C that is still flat over the horizon goes into static_variance.
/// Amplitudes come from ridge-regularized least squares. Throws FitError if
/// max_terms is exhausted.
FitResult fit_exponentials(const Spectrum& spectrum, double horizon, double tolerance, const FitConfig& cfg = {});
FitResult fit_exponentials(const BathModel& model, double horizon, double tolerance, const FitConfig& cfg = {});

/// Max |reconstruct - C| over the given times, computed against fresh
/// quadrature values.
double certify(const ExponentialSeries& series, const Spectrum& spectrum, const std::vector<double>& times,
               const QuadratureConfig& cfg = {});

/// Integral of S over [omega_a, omega_b] (omega_a >= 0). The lower limit 0 is
/// replaced by the spectrum's floor.
double band_variance(const BathModel& model, double omega_a, double omega_b, const QuadratureConfig& cfg = {});

/// T_phi from (1/T_phi)^2 = (pi/2) * Integral S over the real line.
/// Returns nullopt ("infinite T_phi") for zero noise power.
std::optional<double> t_phi_estimate(const BathModel& model, const QuadratureConfig& cfg = {});

}  // namespace qheom::bath
