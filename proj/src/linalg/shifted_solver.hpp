#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <vector>

namespace bgk::linalg {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Factorization of P - z for the BGK operator in velocity-major ordering.
//
// P - z is block tridiagonal over velocity modes: diagonal (h [k > 0] - z) I,
// sub-diagonal sqrt(h k) A, super-diagonal -sqrt(h k) A^T. Eliminating from
// the top mode down gives Schur complements
//   S_{K-1} = (h - z) I,  S_{k-1} = d_{k-1} I + h k A^T S_k^{-1} A,
// which stay well conditioned for Re z < h away from the spectrum.
class ShiftedSolver {
public:
  ShiftedSolver(const Eigen::SparseMatrix<double>& A, int K, double h, cplx z);

  MatrixXcd solve(const MatrixXcd& rhs) const;
  MatrixXcd solve_adjoint(const MatrixXcd& rhs) const;
  VectorXcd solve(const VectorXcd& rhs) const { return solve(MatrixXcd(rhs)).col(0); }
  VectorXcd solve_adjoint(const VectorXcd& rhs) const { return solve_adjoint(MatrixXcd(rhs)).col(0); }

  cplx shift() const { return z_; }
  // Smallest reciprocal condition estimate among the Schur complements.
  double min_rcond() const { return min_rcond_; }

private:
  int n_;
  int K_;
  double h_;
  cplx z_;
  MatrixXcd A_;
  MatrixXcd At_;
  std::vector<Eigen::PartialPivLU<MatrixXcd>> S_;
  double min_rcond_ = 1.0;
};

}  // namespace bgk::linalg
