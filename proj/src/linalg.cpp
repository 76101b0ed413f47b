#include "qheom/linalg.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qheom {

namespace pauli {

CMatrix identity() { return CMatrix::Identity(2, 2); }

CMatrix x() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

CMatrix y() {
  CMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

CMatrix z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

CMatrix by_label(char label) {
  switch (label) {
    case 'I': return identity();
    case 'X': return x();
    case 'Y': return y();
    case 'Z': return z();
    default: throw std::invalid_argument(std::string("unknown Pauli label '") + label + "'");
  }
}

CMatrix string(const std::string& labels) {
  if (labels.empty()) throw std::invalid_argument("empty Pauli string");
  CMatrix out = by_label(labels[0]);
  for (std::size_t i = 1; i < labels.size(); ++i) out = kron(out, by_label(labels[i]));
  return out;
}

std::vector<std::string> labels(std::size_t num_qubits) {
  static constexpr char kAlphabet[] = {'I', 'X', 'Y', 'Z'};
  std::vector<std::string> out{""};
  for (std::size_t q = 0; q < num_qubits; ++q) {
    std::vector<std::string> next;
    next.reserve(out.size() * 4);
    for (const auto& prefix : out)
      for (char c : kAlphabet) next.push_back(prefix + c);
    out = std::move(next);
  }
  return out;
}

}  // namespace pauli

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix embed(const CMatrix& op, std::size_t target, std::size_t num_qubits) {
  if (target >= num_qubits) throw std::out_of_range("embed: target qubit out of range");
  CMatrix out = (target == 0) ? op : pauli::identity();
  for (std::size_t q = 1; q < num_qubits; ++q) out = kron(out, q == target ? op : pauli::identity());
  return out;
}

CMatrix unitary_exp(const CMatrix& hermitian, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian);
  if (es.info() != Eigen::Success) throw std::runtime_error("unitary_exp: eigendecomposition failed");
  const Eigen::VectorXd& w = es.eigenvalues();
  CVector phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::exp(-kI * w(i) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("max_abs_diff: shape mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

double hermiticity_defect(const CMatrix& a) { return (a - a.adjoint()).cwiseAbs().maxCoeff(); }

double unitary_overlap(const CMatrix& u, const CMatrix& v) {
  return std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

}  // namespace qheom
