#include "qheom/heom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace qheom::heom {

namespace {

Eigen::VectorXd coupling_diagonal(const CMatrix& q) { return q.diagonal().real(); }

double coupling_spread(const CMatrix& q) {
  const Eigen::VectorXd d = coupling_diagonal(q);
  return d.size() == 0 ? 0.0 : d.maxCoeff() - d.minCoeff();
}

std::string key_of(const std::uint8_t* occ, std::size_t n) { return std::string(reinterpret_cast<const char*>(occ), n); }

}  // namespace

DissipationChannel DissipationChannel::on_qubit(std::size_t qubit, std::size_t num_qubits, bath::ExponentialSeries series) {
  DissipationChannel c{embed(pauli::z(), qubit, num_qubits), std::move(series)};
  c.validate();
  return c;
}

void DissipationChannel::validate() const {
  if (coupling.rows() == 0 || coupling.rows() != coupling.cols())
    throw std::invalid_argument("channel coupling must be a non-empty square matrix");
  if (hermiticity_defect(coupling) > 1e-12) throw std::invalid_argument("channel coupling must be Hermitian");
  CMatrix off = coupling;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("channel coupling must be diagonal (Z-type)");
  series.validate();
}

std::vector<DissipationChannel> attach_static_mode(std::vector<DissipationChannel> channels, double variance,
                                                   std::size_t channel_index) {
  if (!(variance >= 0.0)) throw std::invalid_argument("static variance must be >= 0");
  if (channel_index >= channels.size()) throw std::invalid_argument("attach_static_mode: no such channel");
  channels[channel_index].series.static_variance += variance;
  return channels;
}

std::vector<Mode> build_modes(const std::vector<DissipationChannel>& channels, Layout layout) {
  std::vector<Mode> modes;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto& ch = channels[c];
    ch.validate();
    const double spread = coupling_spread(ch.coupling);
    std::vector<bath::ExpTerm> terms = ch.series.terms;
    if (ch.series.static_variance > 0.0) terms.push_back({cplx(ch.series.static_variance, 0.0), cplx(0.0, 0.0)});

    if (layout == Layout::Paired) {
      for (const auto& term : terms) {
        if (term.amplitude == cplx(0.0)) continue;
        const cplx root = std::sqrt(term.amplitude);
        const cplx root_conj = std::sqrt(std::conj(term.amplitude));
        const double strength = std::sqrt(std::abs(term.amplitude));
        modes.push_back({c, term.rate, -kI * root, -kI * root, 0.0, strength, spread});
        modes.push_back({c, std::conj(term.rate), -kI * root_conj, 0.0, kI * root_conj, strength, spread});
      }
      continue;
    }

    // Merged: terms with equal real rate collapse into one mode.
    std::map<double, cplx> by_rate;
    std::vector<bath::ExpTerm> complex_terms;
    for (const auto& term : terms) {
      if (term.rate.imag() == 0.0)
        by_rate[term.rate.real()] += term.amplitude;
      else
        complex_terms.push_back(term);
    }
    for (const auto& [rate, d] : by_rate) {
      if (d == cplx(0.0)) continue;
      const double s = std::sqrt(std::abs(d));
      modes.push_back({c, cplx(rate, 0.0), -kI * s, -kI * d / s, kI * std::conj(d) / s, s, spread});
    }
    for (const auto& term : complex_terms) {
      const cplx root = std::sqrt(term.amplitude);
      const cplx root_conj = std::sqrt(std::conj(term.amplitude));
      const double strength = std::sqrt(std::abs(term.amplitude));
      modes.push_back({c, term.rate, -kI * root, -kI * root, 0.0, strength, spread});
      modes.push_back({c, std::conj(term.rate), -kI * root_conj, 0.0, kI * root_conj, strength, spread});
    }
  }
  return modes;
}

Hierarchy::Hierarchy(std::vector<Mode> modes, const HierarchyOptions& options)
    : modes_(std::move(modes)), depth_(options.depth) {
  if (options.depth > 255) throw std::invalid_argument("hierarchy depth must be <= 255");
  if (options.importance_threshold < 0.0) throw std::invalid_argument("importance threshold must be >= 0");
  const bool filter = options.importance_threshold > 0.0;
  if (filter && !(options.horizon > 0.0)) throw std::invalid_argument("importance filter needs a positive horizon");

  const std::size_t m = modes_.size();
  std::vector<double> log_x(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double re = modes_[k].rate.real();
    const double span = re > 0.0 ? std::min(1.0 / re, options.horizon) : options.horizon;
    const double x = modes_[k].spread * modes_[k].strength * span;
    log_x[k] = x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
  }
  const double log_threshold = filter ? std::log(options.importance_threshold) : 0.0;

  std::vector<double> log_weight{0.0};
  occ_.assign(m, 0);
  tiers_.push_back(0);
  lookup_.emplace(key_of(occ_.data(), m), 0);

  std::size_t tier_begin = 0;
  for (std::size_t tier = 1; tier <= depth_ && m > 0; ++tier) {
    const std::size_t tier_end = tiers_.size();
    std::vector<std::pair<std::vector<std::uint8_t>, double>> next;
    std::unordered_map<std::string, bool> seen;
    for (std::size_t a = tier_begin; a < tier_end; ++a) {
      for (std::size_t k = 0; k < m; ++k) {
        std::vector<std::uint8_t> child(occ_.begin() + static_cast<std::ptrdiff_t>(a * m),
                                        occ_.begin() + static_cast<std::ptrdiff_t>((a + 1) * m));
        ++child[k];
        const double lw = log_weight[a] + log_x[k] - 0.5 * std::log(static_cast<double>(child[k]));
        if (filter && lw < log_threshold) continue;
        if (!seen.emplace(key_of(child.data(), m), true).second) continue;
        next.emplace_back(std::move(child), lw);
      }
    }
    std::sort(next.begin(), next.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    for (auto& [child, lw] : next) {
      if (tiers_.size() >= options.max_size) throw HierarchyTooLarge(tiers_.size() + 1);
      lookup_.emplace(key_of(child.data(), m), static_cast<std::int64_t>(tiers_.size()));
      occ_.insert(occ_.end(), child.begin(), child.end());
      tiers_.push_back(static_cast<std::uint32_t>(tier));
      log_weight.push_back(lw);
    }
    tier_begin = tier_end;
    if (tier_begin == tiers_.size()) break;
  }

  const std::size_t n = tiers_.size();
  plus_.assign(n * m, kAbsent);
  minus_.assign(n * m, kAbsent);
  damping_.assign(n, cplx(0.0));
  std::vector<std::uint8_t> work(m);
  for (std::size_t a = 0; a < n; ++a) {
    const std::uint8_t* occ = &occ_[a * m];
    std::copy(occ, occ + m, work.begin());
    for (std::size_t k = 0; k < m; ++k) {
      damping_[a] += static_cast<double>(occ[k]) * modes_[k].rate;
      if (tiers_[a] < depth_ && work[k] < 255) {
        ++work[k];
        plus_[a * m + k] = find(work);
        --work[k];
      }
      if (work[k] > 0) {
        --work[k];
        minus_[a * m + k] = find(work);
        ++work[k];
      }
    }
  }
}

std::int64_t Hierarchy::find(const std::vector<std::uint8_t>& occupation) const {
  if (occupation.size() != modes_.size()) return kAbsent;
  auto it = lookup_.find(key_of(occupation.data(), occupation.size()));
  return it == lookup_.end() ? kAbsent : it->second;
}

Hierarchy build_hierarchy(const std::vector<DissipationChannel>& channels, std::size_t depth) {
  HierarchyOptions options;
  options.depth = depth;
  return build_hierarchy(channels, options);
}

Hierarchy build_hierarchy(const std::vector<DissipationChannel>& channels, const HierarchyOptions& options) {
  return Hierarchy(build_modes(channels, options.layout), options);
}

HierarchyState initial_state(std::shared_ptr<const Hierarchy> hierarchy, const CMatrix& rho0, double t0) {
  if (rho0.rows() == 0 || rho0.rows() != rho0.cols()) throw std::invalid_argument("initial density matrix must be square");
  HierarchyState state;
  state.dim = static_cast<std::size_t>(rho0.rows());
  state.ados = Eigen::MatrixXcd::Zero(rho0.size(), static_cast<Eigen::Index>(hierarchy->size()));
  state.ados.col(0) = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), rho0.size());
  state.hierarchy = std::move(hierarchy);
  state.time = t0;
  return state;
}

CMatrix reduced_density(const HierarchyState& state) {
  const auto d = static_cast<Eigen::Index>(state.dim);
  return Eigen::Map<const CMatrix>(state.ados.col(0).data(), d, d);
}

Generator::Generator(std::shared_ptr<const Hierarchy> hierarchy, const std::vector<DissipationChannel>& channels)
    : hierarchy_(std::move(hierarchy)), dim_(0) {
  const auto& modes = hierarchy_->modes();
  for (const auto& ch : channels) {
    ch.validate();
    const auto d = static_cast<std::size_t>(ch.coupling.rows());
    if (dim_ == 0) dim_ = d;
    if (d != dim_) throw std::invalid_argument("channels disagree on the system dimension");
  }
  for (const auto& mode : modes)
    if (mode.channel >= channels.size()) throw std::invalid_argument("hierarchy refers to a channel that was not supplied");

  const auto d = static_cast<Eigen::Index>(dim_);
  masks_.reserve(2 * modes.size());
  for (const auto& mode : modes) {
    const Eigen::VectorXd q = coupling_diagonal(channels[mode.channel].coupling);
    Eigen::VectorXcd up(d * d), down(d * d);
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index a = 0; a < d; ++a) {
        up(a + d * b) = mode.up * (q(a) - q(b));
        down(a + d * b) = mode.down_left * q(a) + mode.down_right * q(b);
      }
    masks_.push_back(std::move(up));
    masks_.push_back(std::move(down));
  }

  const Hierarchy& h = *hierarchy_;
  link_offsets_.reserve(h.size() + 1);
  link_offsets_.push_back(0);
  for (std::size_t a = 0; a < h.size(); ++a) {
    for (std::size_t k = 0; k < h.num_modes(); ++k) {
      const double j = h.occupation(a, k);
      if (const auto p = h.plus(a, k); p != Hierarchy::kAbsent)
        links_.push_back({static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(2 * k), std::sqrt(j + 1.0)});
      if (const auto m = h.minus(a, k); m != Hierarchy::kAbsent)
        links_.push_back({static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(2 * k + 1), std::sqrt(j)});
    }
    link_offsets_.push_back(static_cast<std::uint32_t>(links_.size()));
  }
}

template <int N>
void Generator::apply_range(std::size_t begin, std::size_t end, const Eigen::MatrixXcd& liouville, bool hamiltonian_on,
                            bool include_damping, const Eigen::MatrixXcd& ados, Eigen::MatrixXcd& out) const {
  const Eigen::Index n = N > 0 ? N : liouville.rows();
  std::vector<cplx> lv(static_cast<std::size_t>(n * n));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) lv[static_cast<std::size_t>(i * n + j)] = liouville(i, j);
  for (std::size_t a = begin; a < end; ++a) {
    const cplx* x = ados.col(static_cast<Eigen::Index>(a)).data();
    cplx* y = out.col(static_cast<Eigen::Index>(a)).data();
    const cplx damp = include_damping ? -hierarchy_->damping(a) : cplx(0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      cplx acc = damp * x[i];
      if (hamiltonian_on) {
        const cplx* row = &lv[static_cast<std::size_t>(i * n)];
        for (Eigen::Index j = 0; j < n; ++j) acc += row[j] * x[j];
      }
      y[i] = acc;
    }
    for (std::uint32_t l = link_offsets_[a]; l < link_offsets_[a + 1]; ++l) {
      const Link& link = links_[l];
      const cplx* src = ados.col(static_cast<Eigen::Index>(link.source)).data();
      const cplx* mask = masks_[link.mask].data();
      for (Eigen::Index i = 0; i < n; ++i) y[i] += link.factor * (mask[i] * src[i]);
    }
  }
}

void Generator::apply(const CMatrix& hamiltonian, const Eigen::MatrixXcd& ados, Eigen::MatrixXcd& out,
                      Execution exec, bool include_damping) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  if (hamiltonian.rows() != d || hamiltonian.cols() != d) throw std::invalid_argument("Hamiltonian dimension mismatch");
  if (ados.rows() != d * d || ados.cols() != static_cast<Eigen::Index>(hierarchy_->size()))
    throw std::invalid_argument("ADO block does not match the hierarchy");
  const CMatrix id = CMatrix::Identity(d, d);
  // vec(H rho) = (I kron H) vec(rho); vec(rho H) = (H^T kron I) vec(rho).
  const Eigen::MatrixXcd liouville = -kI * (kron(id, hamiltonian) - kron(hamiltonian.transpose(), id));
  const bool on = liouville.cwiseAbs().maxCoeff() > 0.0;
  out.resize(ados.rows(), ados.cols());

  // Fixed blocks keep the work split identical for serial and parallel runs.
  constexpr std::size_t kBlock = 64;
  const std::size_t size = hierarchy_->size();
  const auto blocks = static_cast<std::int64_t>((size + kBlock - 1) / kBlock);
  auto run = [&](std::int64_t blk) {
    const std::size_t b0 = static_cast<std::size_t>(blk) * kBlock, b1 = std::min(size, b0 + kBlock);
    switch (d * d) {
      case 4: apply_range<4>(b0, b1, liouville, on, include_damping, ados, out); break;
      case 16: apply_range<16>(b0, b1, liouville, on, include_damping, ados, out); break;
      default: apply_range<0>(b0, b1, liouville, on, include_damping, ados, out); break;
    }
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t blk = 0; blk < blocks; ++blk) run(blk);
  } else {
    for (std::int64_t blk = 0; blk < blocks; ++blk) run(blk);
  }
}

Eigen::MatrixXcd heom_rhs(const HierarchyState& state, double t, const Hamiltonian& hamiltonian,
                          const std::vector<DissipationChannel>& channels, Execution exec) {
  Generator gen(state.hierarchy, channels);
  if (gen.dim() != 0 && gen.dim() != state.dim) throw std::invalid_argument("state and channels disagree on dimension");
  Eigen::MatrixXcd out;
  if (channels.empty()) {
    // Root-only hierarchy without channels: still needs the dimension.
    const auto d = static_cast<Eigen::Index>(state.dim);
    const CMatrix rho = reduced_density(state);
    out = Eigen::MatrixXcd::Zero(state.ados.rows(), state.ados.cols());
    const CMatrix drho = -kI * commutator(hamiltonian(t), rho);
    out.col(0) = Eigen::Map<const Eigen::VectorXcd>(drho.data(), d * d);
    return out;
  }
  gen.apply(hamiltonian(t), state.ados, out, exec);
  return out;
}

void PropagatorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("solver.dt must be > 0");
  if (depth > 255) throw std::invalid_argument("solver.depth must be <= 255");
  if (importance_threshold < 0.0) throw std::invalid_argument("solver.importance_threshold must be >= 0");
}

PropagatorConfig perturbative_truncation(PropagatorConfig config, std::size_t depth) {
  config.depth = depth;
  config.importance_threshold = 0.0;
  config.perturbative = true;
  return config;
}

namespace {

struct Stop {
  double time;
  bool sample = false;
  std::vector<const Kick*> kicks;
};

std::vector<Stop> collect_stops(double t0, double t_end, const PropagationPlan& plan) {
  const double eps = 1e-9 * std::max({1.0, std::abs(t0), std::abs(t_end)});
  std::vector<Stop> stops;
  auto add = [&](double t) -> Stop* {
    if (t < t0 - eps || t > t_end + eps) return nullptr;
    t = std::clamp(t, t0, t_end);
    for (auto& s : stops)
      if (std::abs(s.time - t) <= eps) return &s;
    stops.push_back({t, false, {}});
    return &stops.back();
  };
  add(t_end);
  for (double t : plan.breakpoints) add(t);
  for (double t : plan.sample_times) add(t);
  for (const auto& k : plan.kicks) add(k.time);
  for (double t : plan.sample_times)
    if (Stop* s = add(t)) s->sample = true;
  for (const auto& k : plan.kicks)
    if (Stop* s = add(k.time)) s->kicks.push_back(&k);
  std::sort(stops.begin(), stops.end(), [](const Stop& a, const Stop& b) { return a.time < b.time; });
  return stops;
}

void apply_kick(HierarchyState& state, const CMatrix& u) {
  const auto d = static_cast<Eigen::Index>(state.dim);
  if (u.rows() != d || u.cols() != d) throw std::invalid_argument("kick unitary dimension mismatch");
  const CMatrix ud = u.adjoint();
  for (Eigen::Index a = 0; a < state.ados.cols(); ++a) {
    Eigen::Map<CMatrix> rho(state.ados.col(a).data(), d, d);
    const CMatrix next = u * rho * ud;
    rho = next;
  }
}

}  // namespace

void propagate(HierarchyState& state, const Generator& generator, const Hamiltonian& hamiltonian, double t_end,
               const PropagationPlan& plan, const PropagatorConfig& config, const Observer& observer) {
  config.validate();
  if (t_end < state.time) throw std::invalid_argument("propagate: t_end before the current time");
  if (state.hierarchy.get() != &generator.hierarchy()) throw std::invalid_argument("state and generator use different hierarchies");

  const std::vector<Stop> stops = collect_stops(state.time, t_end, plan);
  const Eigen::Index rows = state.ados.rows(), cols = state.ados.cols();
  Eigen::MatrixXcd k(rows, cols), acc(rows, cols), stage(rows, cols);

  std::vector<cplx> damping(static_cast<std::size_t>(cols));
  for (std::size_t c = 0; c < damping.size(); ++c) damping[c] = generator.hierarchy().damping(c);
  Eigen::VectorXcd half(cols), full(cols);
  double factor_step = -1.0;

  auto rhs = [&](double t, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& out, bool with_damping) {
    if (generator.hierarchy().num_modes() == 0 && generator.dim() == 0) {
      const auto d = static_cast<Eigen::Index>(state.dim);
      out = Eigen::MatrixXcd::Zero(rows, cols);
      const CMatrix rho = Eigen::Map<const CMatrix>(y.col(0).data(), d, d);
      const CMatrix drho = -kI * commutator(hamiltonian(t), rho);
      out.col(0) = Eigen::Map<const Eigen::VectorXcd>(drho.data(), d * d);
      return;
    }
    generator.apply(hamiltonian(t), y, out, config.exec, with_damping);
  };

  auto handle_stop = [&](const Stop& s) {
    if (s.sample && observer) observer(s.time, reduced_density(state));
    for (const Kick* kick : s.kicks) apply_kick(state, kick->unitary);
  };

  std::size_t next = 0;
  while (next < stops.size() && stops[next].time <= state.time) handle_stop(stops[next++]);

  for (; next < stops.size(); ++next) {
    const double a = state.time, b = stops[next].time;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / config.dt - 1e-9)));
    const double h = (b - a) / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      const double t = a + h * static_cast<double>(i);
      const double t_next = (i + 1 == steps) ? b : a + h * static_cast<double>(i + 1);
      Eigen::MatrixXcd& y = state.ados;
      // Left limit at the step end keeps piecewise-constant drives inside the step.
      const double t_end_stage = std::nextafter(t_next, a);
      if (config.stepper == Stepper::Rk4) {
        rhs(t, y, k, true);
        acc = k;
        stage = y + (0.5 * h) * k;
        rhs(t + 0.5 * h, stage, k, true);
        acc += 2.0 * k;
        stage = y + (0.5 * h) * k;
        rhs(t + 0.5 * h, stage, k, true);
        acc += 2.0 * k;
        stage = y + h * k;
        rhs(t_end_stage, stage, k, true);
        acc += k;
        y += (h / 6.0) * acc;
      } else {
        if (factor_step != h) {
          for (std::size_t c = 0; c < damping.size(); ++c) {
            half[c] = std::exp(-0.5 * h * damping[c]);
            full[c] = half[c] * half[c];
          }
          factor_step = h;
        }
        auto scale = [&](const Eigen::VectorXcd& f, Eigen::MatrixXcd& m) { m = m * f.asDiagonal(); };
        // Lawson RK4 with exact propagation of the diagonal damping.
        rhs(t, y, k, false);
        acc = k;
        scale(full, acc);                      // E k1
        stage = y + (0.5 * h) * k;
        scale(half, stage);                    // E/2 (y + h/2 k1)
        Eigen::MatrixXcd y_half = y;
        scale(half, y_half);                   // E/2 y
        rhs(t + 0.5 * h, stage, k, false);     // k2
        stage = y_half + (0.5 * h) * k;
        Eigen::MatrixXcd k23 = k;
        rhs(t + 0.5 * h, stage, k, false);     // k3
        k23 += k;
        scale(half, k23);
        acc += 2.0 * k23;
        stage = y_half + h * k;
        scale(half, stage);                    // E y + h E/2 k3
        rhs(t_end_stage, stage, k, false);     // k4
        acc += k;
        scale(full, y);
        y += (h / 6.0) * acc;
      }
      state.time = t_next;
      if (!y.col(0).allFinite()) throw PropagationError("non-finite reduced density matrix", t_next);
    }
    if (!state.ados.allFinite()) throw PropagationError("non-finite auxiliary density operator", b);
    handle_stop(stops[next]);
  }
}

Trajectory simulate(const CMatrix& rho0, const Hamiltonian& hamiltonian, const std::vector<DissipationChannel>& channels,
                    double t0, double t_end, PropagationPlan plan, const PropagatorConfig& config) {
  config.validate();
  HierarchyOptions options;
  options.depth = config.depth;
  options.layout = config.layout;
  options.importance_threshold = config.importance_threshold;
  options.horizon = t_end - t0;
  options.max_size = config.max_size;
  auto hierarchy = std::make_shared<const Hierarchy>(build_modes(channels, config.layout), options);
  std::vector<DissipationChannel> effective = channels;
  if (effective.empty()) {
    // A zero channel keeps the generator aware of the system dimension.
    effective.push_back({CMatrix::Zero(rho0.rows(), rho0.cols()), {}});
  }
  Generator generator(hierarchy, effective);
  HierarchyState state = initial_state(hierarchy, rho0, t0);
  if (plan.sample_times.empty()) plan.sample_times = {t0, t_end};
  Trajectory out;
  propagate(state, generator, hamiltonian, t_end, plan, config,
            [&](double t, const CMatrix& rho) { out.push_back({t, rho}); });
  return out;
}

Trajectory static_disorder_propagate(const CMatrix& rho0, const Hamiltonian& hamiltonian, double variance,
                                     std::size_t depth, double t0, double t_end, double dt, PropagationPlan plan,
                                     double tolerance) {
  if (!(variance >= 0.0)) throw std::invalid_argument("static variance must be >= 0");
  const auto dim = static_cast<std::size_t>(rho0.rows());
  std::size_t qubits = 0;
  while ((std::size_t{1} << qubits) < dim) ++qubits;
  if ((std::size_t{1} << qubits) != dim || qubits == 0) throw std::invalid_argument("rho0 must be a qubit register state");

  bath::ExponentialSeries series;
  series.static_variance = variance;
  const std::vector<DissipationChannel> channels{DissipationChannel::on_qubit(0, qubits, series)};
  PropagatorConfig config;
  config.dt = dt;
  config.layout = Layout::Merged;
  config.depth = depth;
  const Trajectory coarse = simulate(rho0, hamiltonian, channels, t0, t_end, plan, config);
  config.depth = std::min<std::size_t>(2 * depth, 255);
  Trajectory fine = simulate(rho0, hamiltonian, channels, t0, t_end, plan, config);
  double worst = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) worst = std::max(worst, max_abs_diff(coarse[i].rho, fine[i].rho));
  if (worst > tolerance)
    throw PropagationError("static-disorder hierarchy not converged under depth doubling (change " +
                               std::to_string(worst) + ")",
                           t_end);
  return fine;
}

Trajectory lindblad_simulate(const CMatrix& rho0, const Hamiltonian& hamiltonian, const std::vector<LindbladDephasing>& terms,
                             double t0, double t_end, PropagationPlan plan, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (t_end < t0) throw std::invalid_argument("t_end before t0");
  const Eigen::Index d = rho0.rows();
  // For diagonal q, q rho q - (q^2 rho + rho q^2) / 2 is an elementwise mask.
  CMatrix mask = CMatrix::Zero(d, d);
  for (const auto& term : terms) {
    if (!(term.rate >= 0.0)) throw std::invalid_argument("Lindblad rate must be >= 0");
    if (term.coupling.rows() != d || !term.coupling.isDiagonal(0.0)) throw std::invalid_argument("Lindblad coupling must be diagonal and match rho0");
    const Eigen::VectorXd q = coupling_diagonal(term.coupling);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) mask(a, b) -= 0.5 * term.rate * (q(a) - q(b)) * (q(a) - q(b));
  }
  auto rhs = [&](double t, const CMatrix& rho) -> CMatrix {
    return (-kI * commutator(hamiltonian(t), rho)).eval() + mask.cwiseProduct(rho);
  };
  if (plan.sample_times.empty()) plan.sample_times = {t0, t_end};
  const std::vector<Stop> stops = collect_stops(t0, t_end, plan);
  Trajectory out;
  CMatrix rho = rho0;
  double now = t0;
  auto handle_stop = [&](const Stop& s) {
    if (s.sample) out.push_back({s.time, rho});
    for (const Kick* kick : s.kicks) rho = kick->unitary * rho * kick->unitary.adjoint();
  };
  std::size_t next = 0;
  while (next < stops.size() && stops[next].time <= now) handle_stop(stops[next++]);
  for (; next < stops.size(); ++next) {
    const double a = now, b = stops[next].time;
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / dt - 1e-9)));
    const double h = (b - a) / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      const double t = a + h * static_cast<double>(i);
      const double t_next = (i + 1 == steps) ? b : a + h * static_cast<double>(i + 1);
      const CMatrix k1 = rhs(t, rho);
      const CMatrix k2 = rhs(t + 0.5 * h, rho + 0.5 * h * k1);
      const CMatrix k3 = rhs(t + 0.5 * h, rho + 0.5 * h * k2);
      const CMatrix k4 = rhs(std::nextafter(t_next, a), rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      now = t_next;
    }
    if (!rho.allFinite()) throw PropagationError("non-finite density matrix", b);
    handle_stop(stops[next]);
  }
  return out;
}

}  // namespace qheom::heom
