#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qheom/linalg.hpp"

namespace qheom::tomography {

/// Linear map on d x d matrices stored as outputs on the basis |i><j|:
/// outputs[i * d + j] = E(|i><j|).
struct QuantumChannel {
  std::size_t dim = 0;
  std::vector<CMatrix> outputs;

  /// E(A) by linearity.
  CMatrix apply(const CMatrix& input) const;
};

/// Hermitian probe inputs, in order: |i><i| for each i, then for each i < j
/// X_ij = |i><j| + |j><i| and Y_ij = i|i><j| - i|j><i|.
std::vector<CMatrix> hermitian_probes(std::size_t dim);

/// Recombines probe outputs (same order as hermitian_probes) into a channel:
/// E(|i><j|) = (E(X_ij) - i E(Y_ij)) / 2.
QuantumChannel assemble_channel(std::size_t dim, const std::vector<CMatrix>& probe_outputs);

using PropagateFn = std::function<CMatrix(const CMatrix&)>;
/// Maps each Hermitian input to the outputs at a fixed list of times.
using PropagateManyFn = std::function<std::vector<CMatrix>(const CMatrix&)>;

/// Runs only Hermitian inputs through `propagate` and reconstructs the full
/// channel by linearity.
QuantumChannel channel_from_propagation(const PropagateFn& propagate, std::size_t dim);

/// Time-resolved variant: one channel per output time.
std::vector<QuantumChannel> channels_from_propagation(const PropagateManyFn& propagate, std::size_t dim);

QuantumChannel channel_from_unitary(const CMatrix& unitary);

/// chi = sum_ij |i><j| (x) E(|i><j|), Tr chi = d for trace-preserving maps.
CMatrix choi(const QuantumChannel& channel);

/// Re Tr(chi_a chi_b) / Tr(chi_b^2). Throws std::invalid_argument on size
/// mismatch or a zero denominator.
double gate_fidelity(const CMatrix& chi_a, const CMatrix& chi_b);

/// R_ij = Tr[P_i E(P_j)] / d over the Pauli labels in lexicographic order.
RMatrix ptm(const QuantumChannel& channel);

/// The same matrix from the Choi representation: R_ij = Tr[chi (P_j^T (x) P_i)] / d.
RMatrix ptm_from_choi(const CMatrix& chi);

/// a - b.
RMatrix error_ptm(const RMatrix& a, const RMatrix& b);

struct Diagnostics {
  double hermiticity = 0.0;   // max |chi - chi^dagger|
  double trace = 0.0;         // Tr chi - d (real part)
  double min_eigenvalue = 0.0;
  double tp_defect = 0.0;     // max |Tr_out chi - I|
  bool ok(double tolerance) const;
};
Diagnostics cp_tp_checks(const CMatrix& chi);

struct PtmEntry {
  std::string row;
  std::string column;
  double value = 0.0;
};

/// The k entries of largest magnitude, ties broken by (row, column) index.
std::vector<PtmEntry> top_entries(const RMatrix& r, std::size_t k);

}  // namespace qheom::tomography
