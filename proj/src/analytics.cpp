#include "qheom/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/QR>

namespace qheom::analytics {

namespace {

double coth_half(double x) {
  if (std::abs(x) < 1e-6) return 2.0 / x + x / 6.0;
  return 1.0 / std::tanh(0.5 * x);
}

}  // namespace

double dephasing_exponent(double t, const bath::Spectrum& sp, const bath::QuadratureConfig& cfg) {
  if (t == 0.0) return 0.0;
  const double tau = std::abs(t);
  auto f = [&](double w) { return sp.density(w) * coth_half(sp.beta * w) / (w * w); };
  const auto breaks = quad::log_breaks(sp.floor, sp.window, cfg.panels_per_decade, sp.features);
  // Gamma(t) <= 2 C(0) t^2 sets the absolute scale.
  const double scale = 0.5 * kPi * bath::total_power(sp, cfg) / kPi * tau * tau;
  const quad::Tolerance tol{cfg.abs_tol * scale / static_cast<double>(breaks.size() + 1), cfg.rel_tol, cfg.limit};
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (tau * (b - a) < 4.0 * kPi) {
      // 1 - cos = 2 sin^2(w t / 2) avoids cancellation at small w t.
      total += quad::finite(
                   [&](double w) {
                     const double s = std::sin(0.5 * w * tau);
                     return 2.0 * s * s * f(w);
                   },
                   a, b, tol)
                   .value;
    } else {
      total += quad::finite(f, a, b, tol).value - quad::oscillatory(f, a, b, tau, quad::Weight::Cos, tol).value;
    }
  }
  const double plain = quad::upper_infinite(f, sp.window, tol).value;
  total += plain - quad::fourier_tail(f, sp.window, tau, quad::Weight::Cos, tol).value;
  return 4.0 / kPi * total;
}

double dephasing_exponent(double t, const bath::BathModel& model, const bath::QuadratureConfig& cfg) {
  if (model.eta == 0.0 || t == 0.0) return 0.0;
  return dephasing_exponent(t, bath::make_spectrum(model, cfg), cfg);
}

cplx analytic_coherence(double t, const bath::BathModel& model, cplx rho01_0, const bath::QuadratureConfig& cfg) {
  return rho01_0 * std::exp(-dephasing_exponent(t, model, cfg));
}

double gaussian_static_coherence(double t, double variance, double magnitude0) {
  return magnitude0 * std::exp(-2.0 * variance * t * t);
}

double lindblad_coherence(double t, double t_phi, double magnitude0) {
  if (!(t_phi > 0.0)) throw std::invalid_argument("lindblad_coherence: t_phi must be > 0");
  return magnitude0 * std::exp(-t / t_phi);
}

EchoSeries echo_peaks(const heom::Trajectory& trajectory, const control::PulseSchedule& schedule) {
  EchoSeries out;
  const auto& segs = schedule.segments;
  for (std::size_t j = 0; j < segs.size(); ++j) {
    const double lo = segs[j].end();
    const double hi = j + 1 < segs.size() ? segs[j + 1].start : schedule.total_time;
    EchoPoint p;
    p.index = j + 1;
    bool any = false;
    for (const auto& s : trajectory) {
      const bool inside = s.t > lo && (j + 1 < segs.size() ? s.t < hi : s.t <= hi);
      if (!inside) continue;
      const double v = std::abs(s.rho(0, 1));
      if (!any || v > p.peak) p.peak = v, p.time = s.t;
      any = true;
    }
    if (!any) throw std::invalid_argument("echo window after pulse " + std::to_string(j + 1) + " has no samples");
    out.push_back(p);
  }
  return out;
}

EchoSeries echo_errors(const EchoSeries& ideal, const EchoSeries& finite) {
  if (ideal.size() != finite.size()) throw std::invalid_argument("echo_errors: series lengths differ");
  EchoSeries out = finite;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].delta = ideal[i].peak - finite[i].peak;
  return out;
}

std::vector<double> population_errors(const heom::Trajectory& trajectory, const EchoSeries& echoes) {
  std::vector<double> out;
  for (const auto& e : echoes) {
    auto it = std::min_element(trajectory.begin(), trajectory.end(),
                               [&](const auto& a, const auto& b) { return std::abs(a.t - e.time) < std::abs(b.t - e.time); });
    if (it == trajectory.end()) throw std::invalid_argument("population_errors: empty trajectory");
    out.push_back(std::abs(it->rho(0, 0).real() - 0.5));
  }
  return out;
}

ScalingFit fit_powers(const std::vector<double>& x, const std::vector<double>& y, const std::vector<int>& powers) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: x and y lengths differ");
  if (powers.empty() || !std::is_sorted(powers.begin(), powers.end()) || powers.front() < 0 ||
      std::adjacent_find(powers.begin(), powers.end()) != powers.end())
    throw std::invalid_argument("fit: powers must be distinct, ascending and >= 0");
  if (x.size() < powers.size() + 1) throw std::invalid_argument("fit: too few points for the requested model");
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto p = static_cast<Eigen::Index>(powers.size());
  Eigen::MatrixXd a(n, p);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = std::pow(x[static_cast<std::size_t>(i)], powers[static_cast<std::size_t>(j)]);
    b(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < p) throw std::domain_error("fit: degenerate design matrix");
  const Eigen::VectorXd c = qr.solve(b);
  ScalingFit fit;
  fit.model = powers.back() >= 2 ? ScalingModel::Quadratic : ScalingModel::Linear;
  fit.coefficients.assign(static_cast<std::size_t>(powers.back()) + 1, 0.0);
  for (Eigen::Index j = 0; j < p; ++j) fit.coefficients[static_cast<std::size_t>(powers[static_cast<std::size_t>(j)])] = c(j);
  fit.residual = (a * c - b).squaredNorm();
  const double total = (b.array() - b.mean()).square().sum();
  fit.r_squared = total > 0.0 ? std::clamp(1.0 - fit.residual / total, 0.0, 1.0) : (fit.residual == 0.0 ? 1.0 : 0.0);
  return fit;
}

ScalingFit fit_polynomial(const std::vector<double>& x, const std::vector<double>& y, std::size_t degree) {
  if (x.size() != y.size()) throw std::invalid_argument("fit: x and y lengths differ");
  if (x.size() < degree + 2) throw std::invalid_argument("fit: too few points for the requested degree");
  std::vector<int> powers(degree + 1);
  for (std::size_t i = 0; i <= degree; ++i) powers[i] = static_cast<int>(i);
  return fit_powers(x, y, powers);
}

ScalingFit fit_error_scaling(const EchoSeries& series, ScalingModel model, Abscissa abscissa, Parity parity) {
  std::vector<double> x, y;
  for (const auto& p : series) {
    if ((parity == Parity::Odd && p.index % 2 == 0) || (parity == Parity::Even && p.index % 2 == 1)) continue;
    x.push_back(abscissa == Abscissa::PulseIndex ? static_cast<double>(p.index) : p.time);
    y.push_back(p.delta);
  }
  if (x.size() < 5) throw std::invalid_argument("fit_error_scaling: need at least 5 points");
  return fit_polynomial(x, y, model == ScalingModel::Linear ? 1 : 2);
}

ExponentialFit fit_saturating_exponential(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("exponential fit: need >= 3 paired points");
  const double span = *std::max_element(x.begin(), x.end());
  if (!(span > 0.0)) throw std::invalid_argument("exponential fit: x must reach above 0");
  auto evaluate = [&](double log_s) {
    const double s = std::exp(log_s);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double g = -std::expm1(-x[i] / s);
      num += g * y[i];
      den += g * g;
    }
    const double a = den > 0.0 ? num / den : 0.0;
    double res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = a * -std::expm1(-x[i] / s) - y[i];
      res += r * r;
    }
    return ExponentialFit{a, s, res};
  };
  double lo = std::log(span * 1e-3), hi = std::log(span * 1e6);
  ExponentialFit best = evaluate(lo);
  double best_log = lo;
  for (int i = 0; i <= 400; ++i) {
    const double ls = lo + (hi - lo) * i / 400.0;
    const auto f = evaluate(ls);
    if (f.residual < best.residual) best = f, best_log = ls;
  }
  const double step = (hi - lo) / 400.0;
  double a = best_log - step, b = best_log + step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 100; ++i) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    if (evaluate(c).residual < evaluate(d).residual)
      b = d;
    else
      a = c;
  }
  const auto refined = evaluate(0.5 * (a + b));
  return refined.residual < best.residual ? refined : best;
}

}  // namespace qheom::analytics
