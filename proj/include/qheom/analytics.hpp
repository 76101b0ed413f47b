#pragma once

#include <cstddef>
#include <vector>

#include "qheom/bath.hpp"
#include "qheom/control.hpp"
#include "qheom/heom.hpp"

namespace qheom::analytics {

/// Gamma(t) = (4/pi) Integral_0^inf J(w)/w^2 coth(beta w / 2)(1 - cos w t) dw.
double dephasing_exponent(double t, const bath::BathModel& model, const bath::QuadratureConfig& cfg = {});
double dephasing_exponent(double t, const bath::Spectrum& spectrum, const bath::QuadratureConfig& cfg = {});

/// rho_01(t) = rho_01(0) exp(-Gamma(t)) in the frame rotating with the qubit.
cplx analytic_coherence(double t, const bath::BathModel& model, cplx rho01_0, const bath::QuadratureConfig& cfg = {});

/// |rho_01(0)| exp(-2 variance t^2) for frozen Gaussian detunings on sigma_z.
double gaussian_static_coherence(double t, double variance, double magnitude0 = 0.5);

/// |rho_01(0)| exp(-t / t_phi).
double lindblad_coherence(double t, double t_phi, double magnitude0 = 0.5);

struct EchoPoint {
  std::size_t index = 0;  // 1-based pulse number
  double time = 0.0;      // time of the peak
  double peak = 0.0;      // max |rho_01| in the window after the pulse
  double delta = 0.0;     // ideal - finite, filled by echo_errors
};
using EchoSeries = std::vector<EchoPoint>;

/// Max |rho_01| in the open window between the end of each pulse and the
/// start of the next (the last window runs to total_time). Throws
/// std::invalid_argument for a window without samples.
EchoSeries echo_peaks(const heom::Trajectory& trajectory, const control::PulseSchedule& schedule);

/// Copy of `finite` with delta = ideal.peak - finite.peak.
EchoSeries echo_errors(const EchoSeries& ideal, const EchoSeries& finite);

/// Population error: |rho_00 - 0.5| at each echo peak time.
std::vector<double> population_errors(const heom::Trajectory& trajectory, const EchoSeries& echoes);

enum class ScalingModel { Linear, Quadratic };
enum class Abscissa { PulseIndex, Time };
/// Which echoes enter a fit. Errors after odd and even pulses of a
/// single-axis sequence form two separate branches.
enum class Parity { All, Odd, Even };

struct ScalingFit {
  ScalingModel model = ScalingModel::Linear;
  std::vector<double> coefficients;  // ascending powers: c0, c1[, c2]
  double r_squared = 0.0;
  double residual = 0.0;  // sum of squared residuals
};

/// Ordinary least-squares polynomial fit. Throws std::invalid_argument for
/// fewer than degree + 2 points and std::domain_error for a degenerate design.
ScalingFit fit_polynomial(const std::vector<double>& x, const std::vector<double>& y, std::size_t degree);

/// Least-squares fit of y = sum_p c_p x^p over the given powers (ascending,
/// non-negative). coefficients has one entry per power from 0 to the largest,
/// zero for powers left out. R^2 is relative to the mean.
ScalingFit fit_powers(const std::vector<double>& x, const std::vector<double>& y, const std::vector<int>& powers);

/// Least-squares fit of delta against pulse index (CPMG) or peak time (UDD)
/// over the selected echoes. Needs at least 5 of them.
ScalingFit fit_error_scaling(const EchoSeries& series, ScalingModel model, Abscissa abscissa = Abscissa::PulseIndex,
                             Parity parity = Parity::All);

struct ExponentialFit {
  double amplitude = 0.0;  // y = amplitude * (1 - exp(-x / scale))
  double scale = 0.0;
  double residual = 0.0;
};

/// Fits y = a (1 - exp(-x / s)) by a one-dimensional scan over s with the
/// amplitude solved in closed form, then golden-section refinement.
ExponentialFit fit_saturating_exponential(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qheom::analytics
