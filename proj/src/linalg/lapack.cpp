#include "linalg/lapack.hpp"

#include "error.hpp"

#include <lapacke.h>

#include <cmath>
#include <string>

namespace bgk::linalg {

namespace {

thread_local double select_radius = 0.0;

lapack_logical inside_disk(const double* wr, const double* wi) {
  return std::hypot(*wr, *wi) < select_radius;
}

}  // namespace

OrderedSchur ordered_schur(const MatrixXd& A, double radius) {
  if (A.rows() != A.cols()) fail(ErrorCode::Argument, "Schur decomposition needs a square matrix");
  const lapack_int n = static_cast<lapack_int>(A.rows());
  OrderedSchur out;
  out.T = A;
  out.Z.resize(n, n);
  std::vector<double> wr(n), wi(n);
  lapack_int sdim = 0;
  select_radius = radius;
  lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'S', inside_disk, n, out.T.data(), n, &sdim,
                                  wr.data(), wi.data(), out.Z.data(), n);
  if (info < 0) fail(ErrorCode::Numerical, "dgees: illegal argument " + std::to_string(-info));
  if (info > 0 && info <= n) fail(ErrorCode::Numerical, "dgees: QR iteration failed to converge");
  if (info == n + 1) fail(ErrorCode::Numerical, "dgees: eigenvalues too close to reorder");
  // info == n + 2 means rounding changed the selection; recompute from the reordered T below
  out.eigenvalues.resize(n);
  for (lapack_int i = 0; i < n; ++i) out.eigenvalues[i] = {wr[i], wi[i]};
  out.selected = 0;
  while (out.selected < n && std::abs(out.eigenvalues[out.selected]) < radius) ++out.selected;
  // never split a 2x2 block
  if (out.selected > 0 && out.selected < n && out.T(out.selected, out.selected - 1) != 0.0)
    ++out.selected;
  return out;
}

MatrixXd solve_sylvester(const MatrixXd& T11, const MatrixXd& T22, const MatrixXd& C) {
  const lapack_int m = static_cast<lapack_int>(T11.rows());
  const lapack_int n = static_cast<lapack_int>(T22.rows());
  if (C.rows() != m || C.cols() != n) fail(ErrorCode::Argument, "Sylvester: dimension mismatch");
  MatrixXd X = C;
  MatrixXd a = T11, b = T22;
  double scale = 1.0;
  lapack_int info = LAPACKE_dtrsyl(LAPACK_COL_MAJOR, 'N', 'N', -1, m, n, a.data(), m, b.data(), n,
                                   X.data(), m, &scale);
  if (info < 0) fail(ErrorCode::Numerical, "dtrsyl: illegal argument " + std::to_string(-info));
  // info == 1: close eigenvalues were perturbed; the solution is still returned
  return X / scale;
}

SymmetricEigenpair smallest_symmetric_eigenpair(const MatrixXd& S) {
  const lapack_int n = static_cast<lapack_int>(S.rows());
  MatrixXd a = S;
  lapack_int found = 0;
  VectorXd w(n);
  MatrixXd z(n, 1);
  std::vector<lapack_int> isuppz(2);
  lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1, 1,
                                   0.0, &found, w.data(), z.data(), n, isuppz.data());
  if (info != 0 || found != 1)
    fail(ErrorCode::Numerical, "dsyevr failed (info " + std::to_string(info) + ")");
  return {w[0], z.col(0)};
}

double spectral_norm_dense(const MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(M);
  return svd.singularValues()[0];
}

}  // namespace bgk::linalg
