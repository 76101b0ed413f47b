#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracle.hpp"
#include "qheom/bath.hpp"
#include "qheom/units.hpp"

using namespace qheom;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Drude-Lorentz C(t) by its Matsubara expansion, valid for t > 0.
cplx debye_matsubara(double t, double eta, double wc, double beta, int terms) {
  const double lambda = 0.5 * eta * wc;
  cplx c = lambda * wc * cplx(1.0 / std::tan(0.5 * beta * wc), -1.0) * std::exp(-wc * t);
  for (int k = 1; k <= terms; ++k) {
    const double nu = 2.0 * kPi * k / beta;
    c += 4.0 * lambda / beta * nu * wc / (nu * nu - wc * wc) * std::exp(-nu * t);
  }
  return c;
}

double oracle_total_power(const bath::BathModel& m) {
  auto f = [&](double w) { return bath::spectral_density(w, m) / std::tanh(0.5 * m.beta * w); };
  return oracle::integrate(f, oracle::breaks(1e-2 * m.omega_lc, 1e4, 60.0));
}

double oracle_positive_power(const bath::BathModel& m) {
  auto f = [&](double w) { return bath::psd(w, m); };
  return oracle::integrate(f, oracle::breaks(1e-2 * m.omega_lc, 1e4, 60.0));
}

}  // namespace

TEST_CASE("beta at 50 mK", "[bath]") {
  CHECK_THAT(units::beta_ns(0.050), WithinRel(0.95985, 1e-4));
  CHECK_THAT(units::parse_frequency("10 kHz"), WithinRel(1e-5, 1e-12));
  CHECK_THAT(units::parse_frequency("105.6 MHz"), WithinRel(0.1056, 1e-12));
  CHECK_THAT(units::parse_time_ns("2.5 us"), WithinRel(2500.0, 1e-12));
  CHECK_THROWS_AS(units::parse_frequency("5"), std::invalid_argument);
  CHECK_THROWS_AS(units::parse_frequency("5 furlongs"), std::invalid_argument);
}

TEST_CASE("spectral density symmetries", "[bath][property]") {
  const auto m = bath::BathModel::table_one();
  for (double w : {1e-4, 3e-3, 0.1, 1.0, 7.0, 40.0}) {
    CHECK(bath::spectral_density(-w, m) == -bath::spectral_density(w, m));
    // Detailed balance S(-w) = exp(-beta w) S(w).
    CHECK_THAT(bath::psd(-w, m), WithinRel(std::exp(-m.beta * w) * bath::psd(w, m), 1e-12));
  }
  CHECK(bath::spectral_density(0.0, m) == 0.0);
  // The soft step suppresses the density well below the low cutoff.
  CHECK(bath::spectral_density(1e-7, m) < 1e-4 * bath::spectral_density(1e-2, m));
  // (pi/2) eta omega_q at mid band.
  CHECK_THAT(bath::spectral_density(1e-2, m), WithinRel(0.5 * kPi * 1e-7 * 5.0, 1e-5));
}

TEST_CASE("model validation names the field", "[bath]") {
  auto m = bath::BathModel::table_one();
  m.eta = -1.0;
  try {
    m.validate();
    FAIL("no throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("eta") != std::string::npos);
  }
}

TEST_CASE("Debye correlation function against the Matsubara series", "[bath][oracle]") {
  const double eta = 0.2, wc = 1.3, beta = 0.7;
  const auto sp = bath::debye_spectrum(eta, wc, beta);
  for (double t : {0.3, 1.0, 2.5}) {
    const cplx ref = debye_matsubara(t, eta, wc, beta, 200000);
    const cplx got = bath::correlation_function(t, sp);
    INFO("t = " << t);
    CHECK_THAT(got.real(), WithinAbs(ref.real(), 1e-6 * std::abs(ref)));
    CHECK_THAT(got.imag(), WithinAbs(ref.imag(), 1e-6 * std::abs(ref)));
  }
}

TEST_CASE("total power and T_phi against the reference integrator", "[bath][oracle]") {
  const auto m = bath::BathModel::table_one();
  const double ref = oracle_total_power(m);
  CHECK_THAT(bath::total_power(bath::make_spectrum(m)), WithinRel(ref, 1e-7));
  const auto t_phi = bath::t_phi_estimate(m);
  REQUIRE(t_phi);
  CHECK_THAT(*t_phi, WithinRel(1.0 / std::sqrt(0.5 * kPi * ref), 1e-7));
  // Frozen after the oracle agreed.
  CHECK_THAT(*t_phi, WithinRel(159.4767, 1e-6));
  CHECK_THAT(bath::correlation_function(0.0, m).real(), WithinRel(ref / kPi, 1e-7));
}

TEST_CASE("band variances", "[bath][oracle]") {
  const auto m = bath::BathModel::table_one();
  const double positive = bath::band_variance(m, 0.0, INFINITY);
  CHECK_THAT(positive, WithinRel(oracle_positive_power(m), 1e-7));
  CHECK_THAT(positive, WithinRel(1.559996e-5, 1e-6));
  // Additivity over a split point.
  const double lo = bath::band_variance(m, 0.0, 0.3), hi = bath::band_variance(m, 0.3, INFINITY);
  CHECK_THAT(lo + hi, WithinRel(positive, 1e-9));
  CHECK(bath::band_variance(m, 0.0, m.omega_lc) > 0.0);
  CHECK_THROWS_AS(bath::band_variance(m, 1.0, 0.5), std::invalid_argument);

  auto silent = m;
  silent.eta = 0.0;
  CHECK_FALSE(bath::t_phi_estimate(silent).has_value());
}

TEST_CASE("correlation function structure", "[bath][property]") {
  const auto m = bath::BathModel::table_one();
  const cplx c0 = bath::correlation_function(0.0, m);
  CHECK(std::abs(c0.imag()) < 1e-12 * std::abs(c0));
  for (double t : {1.0, 10.0, 100.0, 1000.0}) {
    const cplx c = bath::correlation_function(t, m);
    // |C(t)| <= C(0) since S >= 0.
    CHECK(std::abs(c) <= c0.real() * (1 + 1e-9));
  }
}

TEST_CASE("exponential fit is certified", "[bath][fit]") {
  const auto m = bath::BathModel::table_one();
  const auto fit = bath::fit_exponentials(m, 1000.0, 1e-3);
  CHECK(fit.relative_error <= 1e-3);
  CHECK(fit.series.terms.size() <= 48);
  REQUIRE_NOTHROW(fit.series.validate());
  for (const auto& term : fit.series.terms) CHECK(term.rate.real() > 0.0);
  // Independent re-certification on an offset grid.
  std::vector<double> grid;
  for (double t = 0.37; t < 1000.0; t *= 1.09) grid.push_back(t);
  const double err = bath::certify(fit.series, bath::make_spectrum(m), grid);
  CHECK(err <= 1.5e-3 * fit.c0_abs);

  bath::FitConfig tight;
  tight.max_terms = 2;
  CHECK_THROWS_AS(bath::fit_exponentials(m, 1000.0, 1e-6, tight), bath::FitError);
}

TEST_CASE("series validation", "[bath]") {
  bath::ExponentialSeries s;
  CHECK(s.empty());
  s.terms.push_back({cplx(1.0, 0.0), cplx(-1.0, 0.0)});
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.terms[0].rate = cplx(2.0, 0.5);
  s.static_variance = 0.25;
  REQUIRE_NOTHROW(s.validate());
  CHECK_THAT(std::abs(bath::reconstruct(s, 0.0) - cplx(1.25, 0.0)), WithinAbs(0.0, 1e-15));
  s.static_variance = -1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
