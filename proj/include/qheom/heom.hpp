#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "qheom/bath.hpp"
#include "qheom/linalg.hpp"

namespace qheom::heom {

/// One independent bath attached through a diagonal coupling operator
/// (sigma_z on one qubit, identity elsewhere).
struct DissipationChannel {
  CMatrix coupling;
  bath::ExponentialSeries series;

  /// sigma_z on `qubit` (0-based, leftmost factor first) of an n-qubit register.
  static DissipationChannel on_qubit(std::size_t qubit, std::size_t num_qubits, bath::ExponentialSeries series);

  /// Throws std::invalid_argument unless coupling is Hermitian and diagonal
  /// and the series is valid.
  void validate() const;
};

/// Adds the zero-decay term to a channel's series. Negative variance throws.
std::vector<DissipationChannel> attach_static_mode(std::vector<DissipationChannel> channels, double variance,
                                                   std::size_t channel_index = 0);

/// How exponential terms become hierarchy modes.
///
/// Paired: every term k contributes an m-mode (rate gamma_k) and an n-mode
/// (rate conj(gamma_k)), so M = 2K per channel.
///
/// Merged: terms with real rates share a single mode per rate; the static term
/// becomes one gamma = 0 mode. Exact for the root, about half the modes.
enum class Layout { Paired, Merged };

/// A hierarchy mode acting on ADO rho_j:
///   up   : up * sqrt(j+1) * [q, rho_{j+1}]
///   down : sqrt(j) * (down_left * q rho_{j-1} + down_right * rho_{j-1} q)
///   decay: -j * rate * rho_j
struct Mode {
  std::size_t channel = 0;
  cplx rate;
  cplx up;
  cplx down_left;
  cplx down_right;
  double strength = 0.0;  // sqrt(|d|), used by the importance filter
  double spread = 0.0;    // max |q_a - q_b| of the channel's coupling
};

std::vector<Mode> build_modes(const std::vector<DissipationChannel>& channels, Layout layout);

struct HierarchyOptions {
  std::size_t depth = 0;
  Layout layout = Layout::Paired;
  /// Keep an ADO only if prod_k x_k^{j_k} / sqrt(j_k!) >= threshold, where
  /// x_k = spread(q) * strength_k * min(1 / Re(rate_k), horizon). 0 keeps all.
  double importance_threshold = 0.0;
  double horizon = 0.0;
  std::size_t max_size = 4'000'000;
};

class HierarchyTooLarge : public std::runtime_error {
 public:
  explicit HierarchyTooLarge(std::size_t count)
      : std::runtime_error("hierarchy exceeds the configured maximum of ADOs (reached " + std::to_string(count) + ")"),
        count_(count) {}
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

/// Multi-index set in canonical order (by tier, then lexicographically
/// descending occupation), with neighbor maps. kAbsent marks a truncated
/// neighbor.
class Hierarchy {
 public:
  static constexpr std::int64_t kAbsent = -1;

  Hierarchy(std::vector<Mode> modes, const HierarchyOptions& options);

  std::size_t size() const noexcept { return tiers_.size(); }
  std::size_t num_modes() const noexcept { return modes_.size(); }
  std::size_t depth() const noexcept { return depth_; }
  const std::vector<Mode>& modes() const noexcept { return modes_; }

  std::size_t tier(std::size_t ado) const { return tiers_[ado]; }
  std::uint8_t occupation(std::size_t ado, std::size_t mode) const { return occ_[ado * modes_.size() + mode]; }
  std::int64_t plus(std::size_t ado, std::size_t mode) const { return plus_[ado * modes_.size() + mode]; }
  std::int64_t minus(std::size_t ado, std::size_t mode) const { return minus_[ado * modes_.size() + mode]; }
  /// Sum_k j_k rate_k for the ADO.
  cplx damping(std::size_t ado) const { return damping_[ado]; }
  /// Position of an occupation vector, or kAbsent.
  std::int64_t find(const std::vector<std::uint8_t>& occupation) const;

 private:
  std::vector<Mode> modes_;
  std::size_t depth_;
  std::vector<std::uint8_t> occ_;
  std::vector<std::uint32_t> tiers_;
  std::vector<std::int64_t> plus_, minus_;
  std::vector<cplx> damping_;
  std::unordered_map<std::string, std::int64_t> lookup_;
};

/// All multi-indices with tier <= depth over the paired layout.
/// Count is C(2K + L, L) for K terms in total.
Hierarchy build_hierarchy(const std::vector<DissipationChannel>& channels, std::size_t depth);
Hierarchy build_hierarchy(const std::vector<DissipationChannel>& channels, const HierarchyOptions& options);

/// ADOs stored column-wise: column a is vec(rho_a) (column-major), so the
/// matrix is D^2 x size().
struct HierarchyState {
  std::shared_ptr<const Hierarchy> hierarchy;
  std::size_t dim = 0;
  Eigen::MatrixXcd ados;
  double time = 0.0;
};

/// Factorized initial condition: root = rho0, everything else 0.
HierarchyState initial_state(std::shared_ptr<const Hierarchy> hierarchy, const CMatrix& rho0, double t0 = 0.0);

/// Root ADO as a D x D matrix.
CMatrix reduced_density(const HierarchyState& state);

using Hamiltonian = std::function<CMatrix(double)>;

enum class Execution { Serial, Parallel };

/// The HEOM generator for a fixed hierarchy and set of channels.
class Generator {
 public:
  Generator(std::shared_ptr<const Hierarchy> hierarchy, const std::vector<DissipationChannel>& channels);

  std::size_t dim() const noexcept { return dim_; }
  const Hierarchy& hierarchy() const noexcept { return *hierarchy_; }

  /// out = d(ados)/dt for a fixed system Hamiltonian. With
  /// include_damping = false the diagonal -sum_k j_k gamma_k term is left out
  /// (the integrating-factor stepper treats it exactly).
  void apply(const CMatrix& hamiltonian, const Eigen::MatrixXcd& ados, Eigen::MatrixXcd& out,
             Execution exec = Execution::Parallel, bool include_damping = true) const;

 private:
  struct Link {
    std::uint32_t source;
    std::uint32_t mask;
    double factor;
  };
  std::shared_ptr<const Hierarchy> hierarchy_;
  std::size_t dim_;
  std::vector<Eigen::VectorXcd> masks_;
  std::vector<std::uint32_t> link_offsets_;
  std::vector<Link> links_;

  template <int N>
  void apply_range(std::size_t begin, std::size_t end, const Eigen::MatrixXcd& liouville, bool hamiltonian_on,
                   bool include_damping, const Eigen::MatrixXcd& ados, Eigen::MatrixXcd& out) const;
};

/// d(state)/dt at time t.
Eigen::MatrixXcd heom_rhs(const HierarchyState& state, double t, const Hamiltonian& hamiltonian,
                          const std::vector<DissipationChannel>& channels, Execution exec = Execution::Parallel);

enum class Stepper {
  Rk4,                    // classical fourth-order Runge-Kutta
  IntegratingFactorRk4,   // RK4 on the interaction picture of the diagonal tier damping
};

struct PropagatorConfig {
  double dt = 0.01;
  Stepper stepper = Stepper::Rk4;
  std::size_t depth = 8;
  Layout layout = Layout::Merged;
  double importance_threshold = 0.0;
  std::size_t max_size = 4'000'000;
  bool perturbative = false;  // labels a hard tier-L truncation used as a TNL-QME surrogate
  Execution exec = Execution::Parallel;

  void validate() const;
};

/// Hard truncation at tier L, zero terminator, no importance filter.
PropagatorConfig perturbative_truncation(PropagatorConfig config, std::size_t depth);

/// Instantaneous system unitary applied to every ADO (rho -> U rho U^dagger).
struct Kick {
  double time;
  CMatrix unitary;
};

struct PropagationPlan {
  std::vector<double> sample_times;  // observer is called at these times (within the span)
  std::vector<double> breakpoints;   // steps never straddle these (Hamiltonian discontinuities)
  std::vector<Kick> kicks;           // applied after sampling at the kick time
};

using Observer = std::function<void(double t, const CMatrix& rho)>;

class PropagationError : public std::runtime_error {
 public:
  PropagationError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// RK4 (or integrating-factor RK4) from state.time to t_end. Intervals between consecutive
/// stops (samples, breakpoints, kicks) are split into equal steps no longer
/// than dt. Throws PropagationError on a non-finite state.
void propagate(HierarchyState& state, const Generator& generator, const Hamiltonian& hamiltonian, double t_end,
               const PropagationPlan& plan, const PropagatorConfig& config, const Observer& observer = {});

struct Sample {
  double t;
  CMatrix rho;
};
using Trajectory = std::vector<Sample>;

/// Builds the hierarchy from the config, starts from the factorized state and
/// returns the sampled reduced density matrices.
Trajectory simulate(const CMatrix& rho0, const Hamiltonian& hamiltonian, const std::vector<DissipationChannel>& channels,
                    double t0, double t_end, PropagationPlan plan, const PropagatorConfig& config);

/// Single static mode of the given variance on a qubit's sigma_z. Runs depth
/// and 2 * depth and throws PropagationError if the trajectories differ by
/// more than `tolerance`.
Trajectory static_disorder_propagate(const CMatrix& rho0, const Hamiltonian& hamiltonian, double variance,
                                     std::size_t depth, double t0, double t_end, double dt, PropagationPlan plan,
                                     double tolerance = 1e-8);

/// Markovian pure dephasing rate * D[q] with D[q]rho = q rho q - {q^2, rho} / 2.
/// For q = sigma_z the coherence decays as exp(-2 rate t).
struct LindbladDephasing {
  CMatrix coupling;
  double rate = 0.0;
};

/// Fixed-step RK4 on the Lindblad equation with the same sampling, breakpoint
/// and kick handling as propagate().
Trajectory lindblad_simulate(const CMatrix& rho0, const Hamiltonian& hamiltonian, const std::vector<LindbladDephasing>& terms,
                             double t0, double t_end, PropagationPlan plan, double dt);

}  // namespace qheom::heom
