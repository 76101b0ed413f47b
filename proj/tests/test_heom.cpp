#include <catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "qheom/bath.hpp"
#include "qheom/heom.hpp"

using namespace qheom;
using Catch::Matchers::WithinAbs;

namespace {

CMatrix plus() {
  CMatrix rho(2, 2);
  rho.setConstant(0.5);
  return rho;
}

heom::Hamiltonian zero_h(std::size_t d) {
  return [d](double) { return CMatrix::Zero(d, d); };
}

bath::ExponentialSeries one_term(cplx d, double gamma) {
  bath::ExponentialSeries s;
  s.terms.push_back({d, cplx(gamma, 0.0)});
  return s;
}

// Exact coherence for sigma_z coupling to a single real-rate exponential.
double exact_coherence(double t, cplx d, double gamma) {
  const double g = d.real() * (gamma * t - 1.0 + std::exp(-gamma * t)) / (gamma * gamma);
  return 0.5 * std::exp(-4.0 * g);
}

// E[exp(2 i x t)] for x ~ N(0, variance), by Gauss-Hermite quadrature
// (Golub-Welsch on the Hermite Jacobi matrix).
double hermite_average(double t, double variance) {
  const int n = 60;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(0.5 * k);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = eig.eigenvalues()(i);
    const double w = eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i);
    total += w * std::cos(2.0 * std::sqrt(2.0 * variance) * z * t);
  }
  return total;
}

std::vector<double> grid(double t_end, double step) {
  std::vector<double> g;
  for (double t = 0.0; t <= t_end + 1e-9; t += step) g.push_back(t);
  return g;
}

}  // namespace

TEST_CASE("hierarchy size is C(2K + L, L) for the paired layout", "[heom]") {
  auto binom = [](std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<std::size_t>(std::llround(r));
  };
  for (std::size_t k : {1u, 2u, 3u}) {
    bath::ExponentialSeries s;
    for (std::size_t i = 0; i < k; ++i) s.terms.push_back({cplx(0.01, 0.002), cplx(0.5 + i, 0.1)});
    const std::vector<heom::DissipationChannel> ch{heom::DissipationChannel::on_qubit(0, 1, s)};
    for (std::size_t depth : {0u, 1u, 3u, 5u}) {
      const auto h = heom::build_hierarchy(ch, depth);
      CHECK(h.size() == binom(2 * k + depth, depth));
      CHECK(h.tier(0) == 0);
    }
  }
}

TEST_CASE("neighbor maps are consistent", "[heom][property]") {
  bath::ExponentialSeries s;
  s.terms.push_back({cplx(0.01, 0.0), cplx(0.3, 0.0)});
  s.terms.push_back({cplx(0.02, 0.0), cplx(2.0, 0.0)});
  s.static_variance = 1e-3;
  const std::vector<heom::DissipationChannel> ch{heom::DissipationChannel::on_qubit(0, 1, s)};
  heom::HierarchyOptions opt;
  opt.depth = 4;
  opt.layout = heom::Layout::Merged;
  const heom::Hierarchy h(heom::build_modes(ch, opt.layout), opt);
  CHECK(h.num_modes() == 3);
  for (std::size_t a = 0; a < h.size(); ++a) {
    for (std::size_t k = 0; k < h.num_modes(); ++k) {
      const auto up = h.plus(a, k);
      if (up != heom::Hierarchy::kAbsent) {
        CHECK(h.tier(up) == h.tier(a) + 1);
        CHECK(h.minus(up, k) == static_cast<std::int64_t>(a));
      } else {
        CHECK(h.tier(a) == opt.depth);
      }
    }
  }
  std::vector<std::uint8_t> occ{1, 0, 2};
  const auto pos = h.find(occ);
  REQUIRE(pos != heom::Hierarchy::kAbsent);
  CHECK(h.occupation(pos, 2) == 2);
  occ = {5, 0, 0};
  CHECK(h.find(occ) == heom::Hierarchy::kAbsent);
}

TEST_CASE("single exponential term against the exact coherence", "[heom][oracle]") {
  const cplx d(0.004, -0.001);
  const double gamma = 0.5;
  const std::vector<heom::DissipationChannel> ch{heom::DissipationChannel::on_qubit(0, 1, one_term(d, gamma))};
  for (auto layout : {heom::Layout::Paired, heom::Layout::Merged}) {
    heom::PropagatorConfig cfg;
    cfg.depth = 10;
    cfg.dt = 0.02;
    cfg.layout = layout;
    heom::PropagationPlan plan;
    plan.sample_times = grid(40.0, 2.0);
    const auto traj = heom::simulate(plus(), zero_h(2), ch, 0.0, 40.0, plan, cfg);
    REQUIRE(traj.size() == plan.sample_times.size());
    for (const auto& s : traj) {
      INFO("t = " << s.t);
      CHECK_THAT(std::abs(s.rho(0, 1)), WithinAbs(exact_coherence(s.t, d, gamma), 1e-8));
      CHECK_THAT(s.rho.trace().real(), WithinAbs(1.0, 1e-12));
      CHECK(hermiticity_defect(s.rho) < 1e-12);
    }
  }
}

TEST_CASE("static disorder against Gauss-Hermite averaging", "[heom][oracle]") {
  const double variance = 1.56e-5;
  heom::PropagationPlan plan;
  plan.sample_times = grid(300.0, 10.0);
  const auto traj = heom::static_disorder_propagate(plus(), zero_h(2), variance, 16, 0.0, 300.0, 0.1, plan);
  for (const auto& s : traj) {
    INFO("t = " << s.t);
    CHECK_THAT(std::abs(s.rho(0, 1)), WithinAbs(0.5 * hermite_average(s.t, variance), 1e-6));
    CHECK_THAT(0.5 * hermite_average(s.t, variance), WithinAbs(0.5 * std::exp(-2 * variance * s.t * s.t), 1e-10));
  }
}

TEST_CASE("an ideal pi kick refocuses static disorder", "[heom][property]") {
  const double variance = 1.56e-5, t = 300.0;
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  heom::PropagationPlan plan;
  plan.sample_times = {t};
  plan.kicks.push_back({0.5 * t, cplx(0, -1) * x});
  const auto traj = heom::static_disorder_propagate(plus(), zero_h(2), variance, 16, 0.0, t, 0.1, plan);
  REQUIRE(traj.size() == 1);
  CHECK_THAT(std::abs(traj[0].rho(0, 1)), WithinAbs(0.5, 1e-6));
}

TEST_CASE("merged and paired layouts agree on the root", "[heom][property]") {
  bath::ExponentialSeries s;
  s.terms.push_back({cplx(0.003, 0.0005), cplx(0.2, 0.0)});
  s.terms.push_back({cplx(0.002, -0.0004), cplx(1.5, 0.0)});
  const std::vector<heom::DissipationChannel> ch{heom::DissipationChannel::on_qubit(0, 1, s)};
  auto h = [](double) {
    CMatrix m(2, 2);
    m << 0.05, 0.02, 0.02, -0.05;
    return m;
  };
  heom::PropagationPlan plan;
  plan.sample_times = grid(30.0, 5.0);
  heom::PropagatorConfig cfg;
  cfg.depth = 6;
  cfg.dt = 0.02;
  cfg.layout = heom::Layout::Paired;
  const auto a = heom::simulate(plus(), h, ch, 0.0, 30.0, plan, cfg);
  cfg.layout = heom::Layout::Merged;
  const auto b = heom::simulate(plus(), h, ch, 0.0, 30.0, plan, cfg);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_abs_diff(a[i].rho, b[i].rho) < 1e-10);
}

TEST_CASE("serial and parallel generators are bit-identical", "[heom][property]") {
  const auto fit = bath::fit_exponentials(bath::BathModel::table_one(), 500.0, 1e-3);
  std::vector<heom::DissipationChannel> ch{heom::DissipationChannel::on_qubit(0, 2, fit.series),
                                           heom::DissipationChannel::on_qubit(1, 2, fit.series)};
  heom::HierarchyOptions opt;
  opt.depth = 3;
  opt.layout = heom::Layout::Merged;
  opt.importance_threshold = 1e-3;
  opt.horizon = 500.0;
  auto hier = std::make_shared<const heom::Hierarchy>(heom::build_hierarchy(ch, opt));
  const heom::Generator gen(hier, ch);
  Eigen::MatrixXcd ados = Eigen::MatrixXcd::Random(16, hier->size());
  CMatrix hm = CMatrix::Random(4, 4);
  hm = (hm + hm.adjoint()).eval();
  Eigen::MatrixXcd a(16, hier->size()), b(16, hier->size());
  gen.apply(hm, ados, a, heom::Execution::Serial);
  gen.apply(hm, ados, b, heom::Execution::Parallel);
  CHECK(a == b);
}

TEST_CASE("integrating-factor RK4 converges to RK4 at fourth order", "[heom][property]") {
  const std::vector<heom::DissipationChannel> ch{
      heom::DissipationChannel::on_qubit(0, 1, one_term(cplx(0.004, 0.0), 3.0))};
  heom::PropagationPlan plan;
  plan.sample_times = grid(20.0, 1.0);
  heom::PropagatorConfig cfg;
  cfg.depth = 8;
  cfg.dt = 0.005;
  const auto ref = heom::simulate(plus(), zero_h(2), ch, 0.0, 20.0, plan, cfg);
  cfg.stepper = heom::Stepper::IntegratingFactorRk4;
  auto error = [&](double dt) {
    cfg.dt = dt;  // 0.2 is past the explicit RK4 stability edge for depth * gamma
    const auto b = heom::simulate(plus(), zero_h(2), ch, 0.0, 20.0, plan, cfg);
    double e = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) e = std::max(e, max_abs_diff(ref[i].rho, b[i].rho));
    return e;
  };
  const double coarse = error(0.2), fine = error(0.1);
  CHECK(coarse < 1e-4);
  CHECK(coarse / fine > 10.0);
}

TEST_CASE("invalid inputs are rejected", "[heom]") {
  heom::PropagatorConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  heom::DissipationChannel bad{CMatrix::Identity(2, 2), {}};
  bad.coupling(0, 1) = 0.3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(heom::attach_static_mode({}, -1.0), std::invalid_argument);

  bath::ExponentialSeries s;
  for (int i = 0; i < 6; ++i) s.terms.push_back({cplx(0.01, 0.0), cplx(1.0 + i, 0.0)});
  const std::vector<heom::DissipationChannel> ch{heom::DissipationChannel::on_qubit(0, 1, s)};
  heom::HierarchyOptions opt;
  opt.depth = 10;
  opt.max_size = 100;
  CHECK_THROWS_AS(heom::build_hierarchy(ch, opt), heom::HierarchyTooLarge);
}

TEST_CASE("Lindblad dephasing decays as exp(-2 rate t)", "[heom][oracle]") {
  CMatrix z(2, 2);
  z << 1, 0, 0, -1;
  const double rate = 1.0 / (2.0 * 576.0);
  heom::PropagationPlan plan;
  plan.sample_times = grid(500.0, 50.0);
  const auto traj = heom::lindblad_simulate(plus(), zero_h(2), {{z, rate}}, 0.0, 500.0, plan, 0.5);
  for (const auto& s : traj) CHECK_THAT(std::abs(s.rho(0, 1)), WithinAbs(0.5 * std::exp(-s.t / 576.0), 1e-10));
}
