#include "qheom/bath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "qheom/units.hpp"

namespace qheom::bath {

namespace {

double logistic(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// 1 / (1 - exp(-x)), with the removable pole at x = 0 expanded.
double bose_factor(double x) {
  if (std::abs(x) < 1e-6) return 1.0 / x + 0.5 + x / 12.0;
  return -1.0 / std::expm1(-x);
}

double coth_half(double x) {
  if (std::abs(x) < 1e-6) return 2.0 / x + x / 6.0;
  return 1.0 / std::tanh(0.5 * x);
}

}  // namespace

BathModel BathModel::table_one() {
  BathModel m;
  m.eta = 1e-7;
  m.s = 0.0;
  m.omega_q = 5.0;
  m.omega_hc = 10.0;
  m.omega_lc = 1e-5;
  m.phi_width = m.omega_lc / 10.0;
  m.beta = units::beta_ns(0.050);
  return m;
}

BathModel BathModel::with_low_cutoff(double omega_lc) const {
  BathModel m = *this;
  m.omega_lc = omega_lc;
  m.phi_width = omega_lc / 10.0;
  return m;
}

void BathModel::validate() const {
  if (!(eta >= 0.0)) throw std::invalid_argument("bath.eta must be >= 0");
  if (!std::isfinite(s)) throw std::invalid_argument("bath.s must be finite");
  if (!(omega_q > 0.0)) throw std::invalid_argument("bath.omega_q must be > 0");
  if (!(omega_lc > 0.0)) throw std::invalid_argument("bath.omega_lc must be > 0");
  if (!(omega_hc > omega_lc)) throw std::invalid_argument("bath.omega_hc must exceed bath.omega_lc");
  if (!(phi_width > 0.0)) throw std::invalid_argument("bath.phi_width must be > 0");
  if (!(beta > 0.0)) throw std::invalid_argument("bath.beta must be > 0");
}

double spectral_density(double omega, const BathModel& m) {
  if (omega == 0.0 || m.eta == 0.0) return 0.0;
  const double a = std::abs(omega);
  const double r = a / m.omega_hc;
  const double cutoff = 1.0 / ((1.0 + r * r) * (1.0 + r * r));
  const double power = (m.s == 0.0) ? m.omega_q : std::pow(m.omega_q, 1.0 - m.s) * std::pow(a, m.s);
  // theta(omega - lc) + theta(-omega - lc) for either sign of omega.
  const double step = logistic((a - m.omega_lc) / m.phi_width) + logistic((-a - m.omega_lc) / m.phi_width);
  const double value = 0.5 * kPi * m.eta * power * cutoff * step;
  return omega > 0.0 ? value : -value;
}

double psd(double omega, const BathModel& m) {
  if (omega == 0.0) return 0.0;
  return spectral_density(omega, m) * bose_factor(m.beta * omega);
}

namespace {

double compute_scale(const Spectrum& sp, const QuadratureConfig& cfg) {
  quad::Tolerance tol{0.0, cfg.rel_tol, cfg.limit};
  auto f = [&](double w) { return sp.density(w) * coth_half(sp.beta * w); };
  auto breaks = quad::log_breaks(sp.floor, sp.window, cfg.panels_per_decade, sp.features);
  double total = quad::panels(f, breaks, tol).value + quad::upper_infinite(f, sp.window, tol).value;
  return total / kPi;
}

}  // namespace

Spectrum make_spectrum(const BathModel& model, const QuadratureConfig& cfg) {
  model.validate();
  Spectrum sp;
  sp.density = [model](double w) { return spectral_density(w, model); };
  sp.beta = model.beta;
  sp.floor = cfg.floor_factor * model.omega_lc;
  sp.window = cfg.window_factor * model.omega_hc;
  const double lc = model.omega_lc, phi = model.phi_width;
  sp.features = {lc - 10 * phi, lc - 3 * phi, lc, lc + 3 * phi, lc + 10 * phi, lc + 40 * phi,
                 1.0 / model.beta, 2 * kPi / model.beta, model.omega_hc};
  sp.power_law_exponent = model.s - 4.0;
  return sp;
}

Spectrum debye_spectrum(double eta, double omega_c, double beta, const QuadratureConfig& cfg) {
  if (!(eta >= 0.0) || !(omega_c > 0.0) || !(beta > 0.0)) throw std::invalid_argument("debye_spectrum: bad parameters");
  Spectrum sp;
  sp.density = [eta, omega_c](double w) { return eta * w * omega_c * omega_c / (w * w + omega_c * omega_c); };
  sp.beta = beta;
  sp.floor = 1e-9 * omega_c;
  sp.window = std::max(cfg.window_factor * 40.0 * omega_c, 2000.0 / beta);
  sp.features = {omega_c, 2 * kPi / beta};
  sp.power_law_exponent = -1.0;
  return sp;
}

double total_power(const Spectrum& spectrum, const QuadratureConfig& cfg) {
  return kPi * compute_scale(spectrum, cfg);
}

cplx correlation_function(double t, const Spectrum& sp, const QuadratureConfig& cfg) {
  const double scale = std::abs(compute_scale(sp, cfg));
  if (scale == 0.0) return {0.0, 0.0};

  auto f_re = [&](double w) { return sp.density(w) * coth_half(sp.beta * w); };
  auto f_im = [&](double w) { return sp.density(w); };
  const auto breaks = quad::log_breaks(sp.floor, sp.window, cfg.panels_per_decade, sp.features);
  const double abs_tol = cfg.abs_tol * scale * kPi / static_cast<double>(breaks.size() + 1);
  const quad::Tolerance tol{abs_tol, cfg.rel_tol, cfg.limit};

  if (t == 0.0) {
    const double re = quad::panels(f_re, breaks, tol).value + quad::upper_infinite(f_re, sp.window, tol).value;
    return {re / kPi, 0.0};
  }

  const double tau = std::abs(t);
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (tau * (b - a) < 4.0 * kPi) {
      re += quad::finite([&](double w) { return f_re(w) * std::cos(w * tau); }, a, b, tol).value;
      im += quad::finite([&](double w) { return f_im(w) * std::sin(w * tau); }, a, b, tol).value;
    } else {
      re += quad::oscillatory(f_re, a, b, tau, quad::Weight::Cos, tol).value;
      im += quad::oscillatory(f_im, a, b, tau, quad::Weight::Sin, tol).value;
    }
  }
  re += quad::fourier_tail(f_re, sp.window, tau, quad::Weight::Cos, tol).value;
  im += quad::fourier_tail(f_im, sp.window, tau, quad::Weight::Sin, tol).value;
  // Im C(t) = -(1/pi) Integral_0^inf J(w) sin(w t) dw, odd in t.
  const double sign = t > 0.0 ? -1.0 : 1.0;
  return {re / kPi, sign * im / kPi};
}

cplx correlation_function(double t, const BathModel& model, const QuadratureConfig& cfg) {
  return correlation_function(t, make_spectrum(model, cfg), cfg);
}

void ExponentialSeries::validate() const {
  if (!(static_variance >= 0.0)) throw std::invalid_argument("static variance must be >= 0");
  for (const auto& term : terms)
    if (!(term.rate.real() > 0.0)) throw std::invalid_argument("dynamic exponential term needs Re(gamma) > 0");
}

cplx reconstruct(const ExponentialSeries& series, double t) {
  cplx sum{series.static_variance, 0.0};
  for (const auto& term : series.terms) sum += term.amplitude * std::exp(-term.rate * t);
  return sum;
}

double certify(const ExponentialSeries& series, const Spectrum& spectrum, const std::vector<double>& times,
               const QuadratureConfig& cfg) {
  double worst = 0.0;
  for (double t : times) worst = std::max(worst, std::abs(reconstruct(series, t) - correlation_function(t, spectrum, cfg)));
  return worst;
}

namespace {

struct Sample {
  double t;
  cplx c;
};

std::vector<double> sample_times(double t_lo, double horizon, double per_decade, std::size_t uniform) {
  std::vector<double> ts{0.0};
  const double decades = std::log10(horizon / t_lo);
  const auto n = static_cast<std::size_t>(std::ceil(decades * per_decade));
  for (std::size_t i = 0; i <= n; ++i) ts.push_back(t_lo * std::pow(10.0, decades * static_cast<double>(i) / n));
  for (std::size_t i = 1; i <= uniform; ++i) ts.push_back(horizon * static_cast<double>(i) / uniform);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
           ts.end());
  return ts;
}

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double lambda) {
  const Eigen::Index n = a.rows(), k = a.cols();
  Eigen::MatrixXd aug(n + k, k);
  aug.topRows(n) = a;
  aug.bottomRows(k) = lambda * std::sqrt(static_cast<double>(n)) * Eigen::MatrixXd::Identity(k, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + k);
  rhs.head(n) = b;
  return aug.colPivHouseholderQr().solve(rhs);
}

// Real parts use a constant column for the static part; imaginary parts
// have none (the static contribution to C is real).
ExponentialSeries least_squares(const std::vector<Sample>& fit, const std::vector<double>& rates, double lambda) {
  const auto n = static_cast<Eigen::Index>(fit.size());
  const auto k = static_cast<Eigen::Index>(rates.size());
  Eigen::MatrixXd a(n, k + 1);
  Eigen::VectorXd re(n), im(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = fit[static_cast<std::size_t>(i)].t;
    a(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) a(i, j + 1) = std::exp(-rates[static_cast<std::size_t>(j)] * t);
    re(i) = fit[static_cast<std::size_t>(i)].c.real();
    im(i) = fit[static_cast<std::size_t>(i)].c.imag();
  }
  const Eigen::VectorXd x = ridge_solve(a, re, lambda);
  const Eigen::VectorXd y = ridge_solve(a.rightCols(k), im, lambda);
  ExponentialSeries s;
  s.static_variance = std::max(0.0, x(0));
  for (Eigen::Index j = 0; j < k; ++j)
    s.terms.push_back({cplx(x(j + 1), y(j)), cplx(rates[static_cast<std::size_t>(j)], 0.0)});
  return s;
}

}  // namespace

FitResult fit_exponentials(const Spectrum& spectrum, double horizon, double tolerance, const FitConfig& cfg) {
  if (!(horizon > 0.0)) throw std::invalid_argument("fit_exponentials: horizon must be > 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("fit_exponentials: tolerance must be > 0");

  FitResult result;
  const cplx c0 = correlation_function(0.0, spectrum, cfg.quad);
  result.c0_abs = std::abs(c0);
  if (result.c0_abs == 0.0) return result;

  const double omega_top = *std::max_element(spectrum.features.begin(), spectrum.features.end());
  const double t_lo = std::min(0.02 / omega_top, 0.01 * horizon);

  // Certification grid is twice as dense as the fitting grid: fit on the
  // even-indexed samples, certify on all of them.
  const auto dense = sample_times(t_lo, horizon, 2.0 * cfg.samples_per_decade, 2 * cfg.uniform_samples);
  std::vector<Sample> all;
  all.reserve(dense.size());
  for (double t : dense) all.push_back({t, correlation_function(t, spectrum, cfg.quad)});
  std::vector<Sample> fit;
  for (std::size_t i = 0; i < all.size(); i += 2) fit.push_back(all[i]);
  result.certification_points = all.size();

  const double rate_hi = 4.0 * omega_top;
  const double rate_lo = 1.0 / horizon;
  const double decades = std::log10(rate_hi / rate_lo);
  double best = std::numeric_limits<double>::infinity();

  for (double per_decade = 0.75;; per_decade += 0.25) {
    const auto count = static_cast<std::size_t>(std::ceil(decades * per_decade)) + 1;
    if (count > cfg.max_terms) break;
    std::vector<double> rates(count);
    for (std::size_t j = 0; j < count; ++j)
      rates[j] = rate_lo * std::pow(10.0, decades * static_cast<double>(j) / static_cast<double>(count - 1));
    ExponentialSeries s = least_squares(fit, rates, cfg.ridge);
    double worst = 0.0;
    for (const auto& smp : all) worst = std::max(worst, std::abs(reconstruct(s, smp.t) - smp.c));
    best = std::min(best, worst / result.c0_abs);
    if (worst <= tolerance * result.c0_abs) {
      result.series = std::move(s);
      result.max_abs_error = worst;
      result.relative_error = worst / result.c0_abs;
      return result;
    }
  }
  throw FitError("fit_exponentials: tolerance not reached within max_terms", best, cfg.max_terms);
}

FitResult fit_exponentials(const BathModel& model, double horizon, double tolerance, const FitConfig& cfg) {
  if (model.eta == 0.0) return FitResult{};
  return fit_exponentials(make_spectrum(model, cfg.quad), horizon, tolerance, cfg);
}

double band_variance(const BathModel& model, double omega_a, double omega_b, const QuadratureConfig& cfg) {
  if (!(omega_a >= 0.0) || !(omega_b > omega_a)) throw std::invalid_argument("band_variance: need 0 <= a < b");
  if (model.eta == 0.0) return 0.0;
  const Spectrum sp = make_spectrum(model, cfg);
  const double a = std::max(omega_a, sp.floor);
  if (!(omega_b > a)) return 0.0;
  auto f = [&](double w) { return psd(w, model); };
  const quad::Tolerance tol{0.0, cfg.rel_tol, cfg.limit};
  if (std::isinf(omega_b)) {
    auto breaks = quad::log_breaks(a, std::max(sp.window, 2 * a), cfg.panels_per_decade, sp.features);
    return quad::panels(f, breaks, tol).value + quad::upper_infinite(f, breaks.back(), tol).value;
  }
  return quad::panels(f, quad::log_breaks(a, omega_b, cfg.panels_per_decade, sp.features), tol).value;
}

std::optional<double> t_phi_estimate(const BathModel& model, const QuadratureConfig& cfg) {
  if (model.eta == 0.0) return std::nullopt;
  const double power = total_power(make_spectrum(model, cfg), cfg);
  if (!(power > 0.0)) return std::nullopt;
  return 1.0 / std::sqrt(0.5 * kPi * power);
}

}  // namespace qheom::bath
