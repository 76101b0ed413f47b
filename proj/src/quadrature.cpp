#include "qheom/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

namespace qheom::quad {

namespace {

// GSL's default handler aborts; errors are reported through return codes.
struct ErrorHandlerOff {
  ErrorHandlerOff() { gsl_set_error_handler_off(); }
};
const ErrorHandlerOff kHandlerOff;

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};
struct QawoDeleter {
  void operator()(gsl_integration_qawo_table* t) const { gsl_integration_qawo_table_free(t); }
};
using Workspace = std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter>;
using QawoTable = std::unique_ptr<gsl_integration_qawo_table, QawoDeleter>;

Workspace make_workspace(std::size_t n) {
  Workspace w(gsl_integration_workspace_alloc(n));
  if (!w) throw std::bad_alloc();
  return w;
}

double trampoline(double x, void* params) { return (*static_cast<const Integrand*>(params))(x); }

gsl_function wrap(const Integrand& f) {
  gsl_function g;
  g.function = &trampoline;
  g.params = const_cast<Integrand*>(&f);
  return g;
}

void check(int status, const char* routine, Estimate e) {
  if (status == GSL_SUCCESS) return;
  if (!std::isfinite(e.value)) throw QuadratureError(std::string(routine) + ": non-finite result", e);
  throw QuadratureError(std::string(routine) + ": " + gsl_strerror(status), e);
}

}  // namespace

Estimate finite(const Integrand& f, double a, double b, const Tolerance& tol) {
  Estimate e;
  if (a == b) return e;
  auto ws = make_workspace(tol.limit);
  gsl_function g = wrap(f);
  int status = gsl_integration_qag(&g, a, b, tol.abs, tol.rel, tol.limit, GSL_INTEG_GAUSS21, ws.get(), &e.value, &e.error);
  check(status, "qag", e);
  return e;
}

Estimate upper_infinite(const Integrand& f, double a, const Tolerance& tol) {
  Estimate e;
  auto ws = make_workspace(tol.limit);
  gsl_function g = wrap(f);
  int status = gsl_integration_qagiu(&g, a, tol.abs, tol.rel, tol.limit, ws.get(), &e.value, &e.error);
  check(status, "qagiu", e);
  return e;
}

Estimate oscillatory(const Integrand& f, double a, double b, double w, Weight weight, const Tolerance& tol) {
  Estimate e;
  if (a == b) return e;
  auto ws = make_workspace(tol.limit);
  QawoTable table(gsl_integration_qawo_table_alloc(w, b - a, weight == Weight::Cos ? GSL_INTEG_COSINE : GSL_INTEG_SINE,
                                                   50));
  if (!table) throw std::bad_alloc();
  gsl_function g = wrap(f);
  int status = gsl_integration_qawo(&g, a, tol.abs, tol.rel, tol.limit, ws.get(), table.get(), &e.value, &e.error);
  check(status, "qawo", e);
  return e;
}

Estimate fourier_tail(const Integrand& f, double a, double w, Weight weight, const Tolerance& tol) {
  Estimate e;
  auto ws = make_workspace(tol.limit);
  auto cycles = make_workspace(tol.limit);
  QawoTable table(gsl_integration_qawo_table_alloc(w, 1.0, weight == Weight::Cos ? GSL_INTEG_COSINE : GSL_INTEG_SINE,
                                                   50));
  if (!table) throw std::bad_alloc();
  gsl_function g = wrap(f);
  // qawf only takes an absolute tolerance.
  int status = gsl_integration_qawf(&g, a, tol.abs, tol.limit, ws.get(), cycles.get(), table.get(), &e.value, &e.error);
  check(status, "qawf", e);
  return e;
}

Estimate panels(const Integrand& f, const std::vector<double>& breaks, const Tolerance& tol) {
  Estimate total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    Estimate e = finite(f, breaks[i], breaks[i + 1], tol);
    total.value += e.value;
    total.error += e.error;
  }
  return total;
}

std::vector<double> log_breaks(double lo, double hi, double per_decade, const std::vector<double>& features) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_breaks: need 0 < lo < hi");
  const double decades = std::log10(hi / lo);
  const auto n = static_cast<std::size_t>(std::ceil(decades * per_decade));
  std::vector<double> out;
  out.reserve(n + 1 + features.size());
  for (std::size_t i = 0; i <= n; ++i) out.push_back(lo * std::pow(10.0, decades * static_cast<double>(i) / n));
  out.back() = hi;
  for (double x : features)
    if (x > lo && x < hi) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace qheom::quad
