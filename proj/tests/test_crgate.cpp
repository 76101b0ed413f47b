#include <catch_amalgamated.hpp>

#include <cmath>

#include "qheom/crgate.hpp"

using namespace qheom;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("reference parameters give a high-fidelity ZX(pi/2)", "[crgate]") {
  const auto p = crgate::CrParams::table_four();
  REQUIRE_NOTHROW(p.validate());
  const CMatrix u = crgate::calibrated_propagator(p, p.duration);
  CHECK(unitary_overlap(u, crgate::ideal_unitary()) >= 0.999);
  // Delta is just under 5 Omega here.
  CHECK(p.dispersive_advisory());
  auto far = p;
  far.detuning = 2.0;
  CHECK_FALSE(far.dispersive_advisory());
}

TEST_CASE("area condition and seed", "[crgate]") {
  const double omega = crgate::seed_amplitude(0.5148, 0.05, 132.0, 0.5 * kPi);
  CHECK_THAT(omega, WithinRel(0.5 * kPi * 0.5148 / (0.05 * 132.0), 1e-12));
  crgate::CrParams p = crgate::CrParams::table_four();
  p.amplitude = omega;
  CHECK_THAT(crgate::cr_area_condition(p, 0.5 * kPi), WithinAbs(0.0, 1e-12));
  p.detuning = 0.0;
  CHECK_THROWS_AS(crgate::cr_area_condition(p, 0.5 * kPi), std::invalid_argument);
}

TEST_CASE("propagators are unitary", "[crgate][property]") {
  const auto p = crgate::CrParams::table_four();
  for (double t : {0.0, 10.0, 66.0, 132.0}) {
    const CMatrix u = crgate::cr_propagator(p, t);
    CHECK(max_abs_diff(u.adjoint() * u, CMatrix::Identity(4, 4)) < 1e-10);
  }
  CHECK(max_abs_diff(crgate::cr_propagator(p, 0.0), CMatrix::Identity(4, 4)) < 1e-14);
}

TEST_CASE("without drive the exchange conserves excitations", "[crgate][property]") {
  auto p = crgate::CrParams::table_four();
  p.amplitude = 0.0;
  const CMatrix u = crgate::cr_propagator(p, 50.0);
  // |00> and |11> are invariant up to phase.
  CHECK_THAT(std::abs(u(0, 0)), WithinAbs(1.0, 1e-10));
  CHECK_THAT(std::abs(u(3, 3)), WithinAbs(1.0, 1e-10));
  // Without coupling the drive cannot entangle: the gate fails.
  p = crgate::CrParams::table_four();
  p.coupling = 0.0;
  CHECK(unitary_overlap(crgate::calibrated_propagator(p, p.duration), crgate::ideal_unitary()) < 0.9);
}

TEST_CASE("Pauli projection satisfies Parseval", "[crgate][property]") {
  const CMatrix d = crgate::calibrated_propagator(crgate::CrParams::table_four(), 132.0) - crgate::ideal_unitary();
  const auto proj = crgate::pauli_projection(d);
  REQUIRE(proj.labels.size() == 16);
  CHECK(proj.labels.front() == "II");
  CHECK(proj.labels.back() == "ZZ");
  double sum = 0.0;
  for (std::size_t i = 0; i < 16; ++i)
    sum += proj.hermitian[i] * proj.hermitian[i] + proj.anti_hermitian[i] * proj.anti_hermitian[i];
  CHECK_THAT(sum * 4.0, WithinRel(d.squaredNorm(), 1e-10));
}

TEST_CASE("rz convention", "[crgate]") {
  const CMatrix r = crgate::rz(0.7);
  CHECK_THAT(std::arg(r(0, 0)), WithinAbs(-0.35, 1e-12));
  CHECK_THAT(std::arg(r(1, 1)), WithinAbs(0.35, 1e-12));
}

TEST_CASE("calibration from the area seed", "[crgate][slow]") {
  crgate::CrParams seed = crgate::CrParams::table_four();
  seed.amplitude = 0.0;
  seed.rz_pre_1 = seed.rz_post_1 = seed.rz_pre_2 = seed.rz_post_2 = 0.0;
  const auto cal = crgate::calibrate(seed);
  CHECK(cal.report.converged);
  CHECK(cal.report.fidelity >= 0.999);
  CHECK_THAT(unitary_overlap(crgate::calibrated_propagator(cal.params, cal.params.duration), crgate::ideal_unitary()),
             WithinAbs(cal.report.fidelity, 1e-9));
}
