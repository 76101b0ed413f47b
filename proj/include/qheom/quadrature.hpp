#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

// Thin RAII layer over the QUADPACK routines in GSL. All routines are
// reentrant: each call owns its workspace.
namespace qheom::quad {

using Integrand = std::function<double(double)>;

struct Tolerance {
  double abs = 1e-16;
  double rel = 1e-10;
  std::size_t limit = 2000;  // max subintervals per adaptive call
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Raised when an adaptive rule fails to meet its tolerance. Carries the best
/// value and error estimate reached.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, Estimate best) : std::runtime_error(what), best_(best) {}
  const Estimate& best() const noexcept { return best_; }

 private:
  Estimate best_;
};

/// Adaptive Gauss-Kronrod (21-point) on [a, b].
Estimate finite(const Integrand& f, double a, double b, const Tolerance& tol);

/// Adaptive rule on [a, inf) for smooth, decaying f.
Estimate upper_infinite(const Integrand& f, double a, const Tolerance& tol);

enum class Weight { Cos, Sin };

/// Integral of f(x) * cos(w x) or f(x) * sin(w x) on [a, b] with the
/// Clenshaw-Curtis oscillatory rule (efficient when w (b - a) >> 1).
Estimate oscillatory(const Integrand& f, double a, double b, double w, Weight weight, const Tolerance& tol);

/// Fourier integral of f(x) * cos(w x) or f(x) * sin(w x) on [a, inf), w > 0,
/// with cycle-by-cycle integration and epsilon extrapolation.
Estimate fourier_tail(const Integrand& f, double a, double w, Weight weight, const Tolerance& tol);

/// Sum of panel integrals of f on the given sorted breakpoints.
Estimate panels(const Integrand& f, const std::vector<double>& breaks, const Tolerance& tol);

/// Log-spaced breakpoints from lo to hi (inclusive) with the given density
/// per decade; the explicit `features` inside (lo, hi) are inserted as well.
std::vector<double> log_breaks(double lo, double hi, double per_decade, const std::vector<double>& features = {});

}  // namespace qheom::quad
