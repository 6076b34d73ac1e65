#include "linalg/shifted_solver.hpp"

#include "error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bgk::linalg {

namespace {

// S^{-H} b from P S = L U: S^H = U^H L^H P.
MatrixXcd adjoint_solve(const Eigen::PartialPivLU<MatrixXcd>& lu, const MatrixXcd& b) {
  MatrixXcd y = lu.matrixLU().triangularView<Eigen::Upper>().adjoint().solve(b);
  y = lu.matrixLU().triangularView<Eigen::UnitLower>().adjoint().solve(y);
  return lu.permutationP().transpose() * y;
}

}  // namespace

ShiftedSolver::ShiftedSolver(const Eigen::SparseMatrix<double>& A, int K, double h, cplx z)
    : n_(static_cast<int>(A.rows())), K_(K), h_(h), z_(z) {
  if (K < 2) fail(ErrorCode::Argument, "shifted solver needs K >= 2");
  A_ = Eigen::MatrixXd(A).cast<cplx>();
  At_ = A_.transpose();
  S_.resize(K);
  auto diag = [&](int k) { return (k > 0 ? cplx(h, 0.0) : cplx(0.0, 0.0)) - z; };

  MatrixXcd S = MatrixXcd::Identity(n_, n_) * diag(K - 1);
  for (int k = K - 1; k >= 0; --k) {
    S_[k].compute(S);
    double rc = S_[k].rcond();
    min_rcond_ = std::min(min_rcond_, rc);
    if (!std::isfinite(rc) || rc < std::numeric_limits<double>::epsilon()) {
      std::ostringstream os;
      os << "shift z = " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
         << "i is numerically an eigenvalue (rcond " << rc << ")";
      fail(ErrorCode::SpectrumHit, os.str());
    }
    if (k == 0) break;
    S = (h * k) * (At_ * S_[k].solve(A_));
    S.diagonal().array() += diag(k - 1);
  }
}

MatrixXcd ShiftedSolver::solve(const MatrixXcd& rhs) const {
  const Eigen::Index n = n_;
  if (rhs.rows() != n * K_) fail(ErrorCode::Argument, "shifted solve: dimension mismatch");
  MatrixXcd g = rhs;
  for (int k = K_ - 1; k >= 1; --k)
    g.middleRows((k - 1) * n, n) += std::sqrt(h_ * k) * (At_ * S_[k].solve(g.middleRows(k * n, n)));
  MatrixXcd x(rhs.rows(), rhs.cols());
  x.topRows(n) = S_[0].solve(g.topRows(n));
  for (int k = 1; k < K_; ++k)
    x.middleRows(k * n, n) =
        S_[k].solve(g.middleRows(k * n, n) - std::sqrt(h_ * k) * (A_ * x.middleRows((k - 1) * n, n)));
  return x;
}

MatrixXcd ShiftedSolver::solve_adjoint(const MatrixXcd& rhs) const {
  const Eigen::Index n = n_;
  if (rhs.rows() != n * K_) fail(ErrorCode::Argument, "shifted solve: dimension mismatch");
  MatrixXcd a = rhs;
  for (int k = K_ - 1; k >= 1; --k)
    a.middleRows((k - 1) * n, n) -=
        std::sqrt(h_ * k) * (At_ * adjoint_solve(S_[k], a.middleRows(k * n, n)));
  MatrixXcd y(rhs.rows(), rhs.cols());
  y.topRows(n) = adjoint_solve(S_[0], a.topRows(n));
  for (int k = 1; k < K_; ++k)
    y.middleRows(k * n, n) = adjoint_solve(
        S_[k], a.middleRows(k * n, n) + std::sqrt(h_ * k) * (A_ * y.middleRows((k - 1) * n, n)));
  return y;
}

}  // namespace bgk::linalg
