#include "qheom/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qheom::tomography {

namespace {

std::size_t qubits_for(std::size_t dim) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if ((std::size_t{1} << n) != dim) throw std::invalid_argument("Pauli basis needs a power-of-two dimension");
  return n;
}

CMatrix unit(std::size_t dim, std::size_t i, std::size_t j) {
  CMatrix e = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return e;
}

}  // namespace

CMatrix QuantumChannel::apply(const CMatrix& input) const {
  if (static_cast<std::size_t>(input.rows()) != dim || input.cols() != input.rows())
    throw std::invalid_argument("channel input has the wrong size");
  CMatrix out = CMatrix::Zero(input.rows(), input.cols());
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const cplx c = input(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (c != 0.0) out += c * outputs[i * dim + j];
    }
  return out;
}

std::vector<CMatrix> hermitian_probes(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("dimension must be > 0");
  std::vector<CMatrix> probes;
  for (std::size_t i = 0; i < dim; ++i) probes.push_back(unit(dim, i, i));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) {
      probes.push_back(unit(dim, i, j) + unit(dim, j, i));
      probes.push_back(kI * unit(dim, i, j) - kI * unit(dim, j, i));
    }
  return probes;
}

QuantumChannel assemble_channel(std::size_t dim, const std::vector<CMatrix>& probe_outputs) {
  if (probe_outputs.size() != dim * dim) throw std::invalid_argument("assemble_channel: need d^2 probe outputs");
  QuantumChannel ch;
  ch.dim = dim;
  ch.outputs.assign(dim * dim, CMatrix());
  for (std::size_t i = 0; i < dim; ++i) ch.outputs[i * dim + i] = probe_outputs[i];
  std::size_t k = dim;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j, k += 2) {
      const CMatrix& ex = probe_outputs[k];
      const CMatrix& ey = probe_outputs[k + 1];
      // |i><j| = (X - iY) / 2 and |j><i| = (X + iY) / 2
      ch.outputs[i * dim + j] = 0.5 * (ex - kI * ey);
      ch.outputs[j * dim + i] = 0.5 * (ex + kI * ey);
    }
  return ch;
}

QuantumChannel channel_from_propagation(const PropagateFn& propagate, std::size_t dim) {
  std::vector<CMatrix> outs;
  for (const auto& p : hermitian_probes(dim)) outs.push_back(propagate(p));
  return assemble_channel(dim, outs);
}

std::vector<QuantumChannel> channels_from_propagation(const PropagateManyFn& propagate, std::size_t dim) {
  const auto probes = hermitian_probes(dim);
  std::vector<std::vector<CMatrix>> runs;
  for (const auto& p : probes) runs.push_back(propagate(p));
  const std::size_t times = runs.front().size();
  for (const auto& r : runs)
    if (r.size() != times) throw std::invalid_argument("probe runs returned different numbers of outputs");
  std::vector<QuantumChannel> out;
  for (std::size_t t = 0; t < times; ++t) {
    std::vector<CMatrix> at;
    for (const auto& r : runs) at.push_back(r[t]);
    out.push_back(assemble_channel(dim, at));
  }
  return out;
}

QuantumChannel channel_from_unitary(const CMatrix& u) {
  if (u.rows() != u.cols()) throw std::invalid_argument("unitary must be square");
  return channel_from_propagation([&](const CMatrix& a) -> CMatrix { return u * a * u.adjoint(); },
                                  static_cast<std::size_t>(u.rows()));
}

CMatrix choi(const QuantumChannel& ch) {
  const auto d = static_cast<Eigen::Index>(ch.dim);
  CMatrix chi = CMatrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) chi.block(i * d, j * d, d, d) = ch.outputs[static_cast<std::size_t>(i * d + j)];
  return chi;
}

double gate_fidelity(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("gate_fidelity: size mismatch");
  const double den = (b * b).trace().real();
  if (!(std::abs(den) > 0.0)) throw std::invalid_argument("gate_fidelity: reference Choi matrix is zero");
  // Tr(AB) without forming the product.
  const double num = (a.transpose().array() * b.array()).sum().real();
  return num / den;
}

RMatrix ptm(const QuantumChannel& ch) {
  const auto labels = pauli::labels(qubits_for(ch.dim));
  const auto n = static_cast<Eigen::Index>(labels.size());
  std::vector<CMatrix> ps;
  for (const auto& l : labels) ps.push_back(pauli::string(l));
  RMatrix r(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const CMatrix out = ch.apply(ps[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < n; ++i)
      r(i, j) = (ps[static_cast<std::size_t>(i)] * out).trace().real() / static_cast<double>(ch.dim);
  }
  return r;
}

RMatrix ptm_from_choi(const CMatrix& chi) {
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(chi.rows()))));
  if (static_cast<Eigen::Index>(d * d) != chi.rows() || chi.rows() != chi.cols())
    throw std::invalid_argument("ptm_from_choi: Choi matrix must be d^2 x d^2");
  const auto labels = pauli::labels(qubits_for(d));
  const auto n = static_cast<Eigen::Index>(labels.size());
  std::vector<CMatrix> ps;
  for (const auto& l : labels) ps.push_back(pauli::string(l));
  RMatrix r(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const CMatrix m = kron(ps[static_cast<std::size_t>(j)].transpose(), ps[static_cast<std::size_t>(i)]);
      r(i, j) = (chi.array() * m.transpose().array()).sum().real() / static_cast<double>(d);
    }
  return r;
}

RMatrix error_ptm(const RMatrix& a, const RMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("error_ptm: size mismatch");
  return a - b;
}

bool Diagnostics::ok(double tol) const {
  return hermiticity <= tol && std::abs(trace) <= tol && min_eigenvalue >= -tol && tp_defect <= tol;
}

Diagnostics cp_tp_checks(const CMatrix& chi) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(chi.rows()))));
  if (d * d != chi.rows() || chi.rows() != chi.cols()) throw std::invalid_argument("cp_tp_checks: Choi matrix must be d^2 x d^2");
  Diagnostics out;
  out.hermiticity = hermiticity_defect(chi);
  out.trace = chi.trace().real() - static_cast<double>(d);
  const CMatrix herm = 0.5 * (chi + chi.adjoint());
  out.min_eigenvalue = Eigen::SelfAdjointEigenSolver<CMatrix>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  // Tr_out chi: entry (i, j) is Tr E(|i><j|), which must equal delta_ij.
  double tp = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      tp = std::max(tp, std::abs(chi.block(i * d, j * d, d, d).trace() - (i == j ? 1.0 : 0.0)));
  out.tp_defect = tp;
  return out;
}

std::vector<PtmEntry> top_entries(const RMatrix& r, std::size_t k) {
  const auto labels = pauli::labels(qubits_for(static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(r.rows()))))));
  if (static_cast<Eigen::Index>(labels.size()) != r.rows() || r.rows() != r.cols())
    throw std::invalid_argument("top_entries: PTM must be 4^n x 4^n");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(r.size()));
  std::iota(idx.begin(), idx.end(), 0);
  // Row-major flat index keeps the tie-break on (row, column).
  auto value = [&](Eigen::Index f) { return r(f / r.cols(), f % r.cols()); };
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return std::abs(value(a)) > std::abs(value(b)); });
  std::vector<PtmEntry> out;
  for (std::size_t i = 0; i < std::min(k, idx.size()); ++i) {
    const auto f = idx[i];
    out.push_back({labels[static_cast<std::size_t>(f / r.cols())], labels[static_cast<std::size_t>(f % r.cols())], value(f)});
  }
  return out;
}

}  // namespace qheom::tomography
