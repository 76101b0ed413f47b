#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qheom {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

namespace pauli {

CMatrix identity();
CMatrix x();
CMatrix y();
CMatrix z();

/// Single-qubit Pauli by label: 'I', 'X', 'Y' or 'Z'.
CMatrix by_label(char label);

/// Tensor product of single-qubit Paulis, leftmost label = qubit 1.
CMatrix string(const std::string& labels);

/// All 4^n Pauli labels in lexicographic order over (I, X, Y, Z):
/// "II", "IX", "IY", "IZ", "XI", ..., "ZZ" for n = 2.
std::vector<std::string> labels(std::size_t num_qubits);

}  // namespace pauli

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Operator acting as `op` on qubit `target` (0-based, qubit 0 = leftmost
/// tensor factor) and identity on the remaining qubits.
CMatrix embed(const CMatrix& op, std::size_t target, std::size_t num_qubits);

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

/// exp(-i H t) for Hermitian H via eigendecomposition.
CMatrix unitary_exp(const CMatrix& hermitian, double t);

/// max |a_ij - b_ij|.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

/// max |a - a^dagger|.
double hermiticity_defect(const CMatrix& a);

/// |Tr(U^dagger V)| / d; phase-insensitive overlap of two unitaries.
double unitary_overlap(const CMatrix& u, const CMatrix& v);

}  // namespace qheom
