#include <catch_amalgamated.hpp>

#include <cmath>

#include "qheom/control.hpp"

using namespace qheom;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("CPMG timing", "[control]") {
  const auto s = control::cpmg_schedule(20, {control::Axis::X}, 15.0, 118.0, 59.0, false);
  REQUIRE(s.segments.size() == 20);
  CHECK_THAT(s.total_time, WithinAbs(2660.0, 1e-9));
  CHECK_THAT(s.segments[0].start, WithinAbs(59.0, 1e-12));
  CHECK_THAT(s.segments[1].start - s.segments[0].end(), WithinAbs(118.0, 1e-12));
  CHECK_THAT(s.segments[0].amplitude, WithinRel(kPi / 15.0, 1e-12));
  REQUIRE_NOTHROW(s.validate());

  const auto xy = control::cpmg_schedule(4, control::parse_pattern("XY"), 15.0, 118.0, 59.0, false);
  CHECK(xy.segments[0].axis == control::Axis::X);
  CHECK(xy.segments[1].axis == control::Axis::Y);
  CHECK(xy.segments[2].axis == control::Axis::X);
}

TEST_CASE("UDD centers follow sin^2", "[control]") {
  const std::size_t n = 20;
  const double total = 2660.0;
  const auto s = control::udd_schedule(n, total, 15.0, {control::Axis::Y}, false);
  REQUIRE(s.segments.size() == n);
  for (std::size_t j = 1; j <= n; ++j) {
    const double c = total * std::pow(std::sin(kPi * j / (2.0 * n + 2.0)), 2);
    CHECK_THAT(s.segments[j - 1].center(), WithinAbs(c, 1e-9));
  }
  // Pulses too long for the spacing overlap.
  CHECK_THROWS_AS(control::udd_schedule(n, 200.0, 15.0, {control::Axis::X}, false), std::invalid_argument);
}

TEST_CASE("schedule validation", "[control]") {
  control::PulseSchedule s;
  s.total_time = 100.0;
  s.segments.push_back({10.0, 20.0, 0.1, control::Axis::X});
  s.segments.push_back({25.0, 20.0, 0.1, control::Axis::X});
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.segments[1].start = 90.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK_THROWS_AS(control::parse_axis('Z'), std::invalid_argument);
}

TEST_CASE("finite pulse implements a pi rotation", "[control][property]") {
  for (auto axis : {control::Axis::X, control::Axis::Y}) {
    const auto cal = control::calibrate_pi_pulse(15.0, axis);
    CHECK_THAT(cal.amplitude, WithinRel(kPi / 15.0, 1e-12));
    CHECK(cal.fidelity > 1.0 - 1e-10);
    const control::PulseSegment seg{0.0, 15.0, cal.amplitude, axis};
    const CMatrix u = control::integrate_segment(seg, 2000);
    CHECK(unitary_overlap(u, control::ideal_pi_unitary(axis)) > 1.0 - 1e-10);
  }
}

TEST_CASE("drive Hamiltonian", "[control]") {
  const auto s = control::cpmg_schedule(2, control::parse_pattern("XY"), 10.0, 50.0, 20.0, false);
  const CMatrix hx = control::drive_hamiltonian(25.0, s);
  CHECK_THAT(hx(0, 1).real(), WithinAbs(0.5 * kPi / 10.0, 1e-12));
  CHECK_THAT(hx(0, 1).imag(), WithinAbs(0.0, 1e-12));
  const CMatrix hy = control::drive_hamiltonian(s.segments[1].center(), s);
  CHECK_THAT(hy(0, 1).imag(), WithinAbs(-0.5 * kPi / 10.0, 1e-12));
  CHECK(control::drive_hamiltonian(5.0, s).norm() == 0.0);
  // Half-open segments.
  CHECK(control::drive_hamiltonian(s.segments[0].end(), s).norm() == 0.0);

  const auto ideal = control::cpmg_schedule(2, control::parse_pattern("XY"), 10.0, 50.0, 20.0, true);
  CHECK(control::drive_hamiltonian(25.0, ideal).norm() == 0.0);
  const auto plan = control::schedule_plan(ideal, {0.0, 100.0});
  REQUIRE(plan.kicks.size() == 2);
  CHECK_THAT(plan.kicks[0].time, WithinAbs(25.0, 1e-12));
}

TEST_CASE("embedding the drive in a register", "[control]") {
  const auto s = control::cpmg_schedule(1, {control::Axis::X}, 10.0, 50.0, 0.0, false);
  const auto h = control::schedule_hamiltonian(s, 1, 2);
  const CMatrix m = h(5.0);
  REQUIRE(m.rows() == 4);
  CHECK(max_abs_diff(m, 0.5 * kPi / 10.0 * pauli::string("IX")) < 1e-12);
}
