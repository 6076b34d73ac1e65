#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace bgk::linalg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Real Schur form A = Z T Z^T with the eigenvalues of modulus < radius ordered first.
struct OrderedSchur {
  MatrixXd T;
  MatrixXd Z;
  std::vector<std::complex<double>> eigenvalues;  // diagonal order of T
  int selected = 0;
};

OrderedSchur ordered_schur(const MatrixXd& A, double radius);

// Solve T11 R - R T22 = C for quasi-triangular T11, T22.
MatrixXd solve_sylvester(const MatrixXd& T11, const MatrixXd& T22, const MatrixXd& C);

struct SymmetricEigenpair {
  double value = 0.0;
  VectorXd vector;
};

// Smallest eigenpair of a dense symmetric matrix (only the lower triangle is read).
SymmetricEigenpair smallest_symmetric_eigenpair(const MatrixXd& S);

// Largest singular value of a small dense matrix.
double spectral_norm_dense(const MatrixXd& M);

}  // namespace bgk::linalg
