#include "hypocoercivity.hpp"

#include "linalg/krylov.hpp"
#include "linalg/lapack.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bgk {

namespace {

double dense_norm(const MatrixXd& M) {
  auto r = linalg::operator_norm<double>([&](const VectorXd& v) -> VectorXd { return M * v; },
                                         [&](const VectorXd& v) -> VectorXd { return M.transpose() * v; },
                                         M.cols(), 17, 1e-8, 300);
  return r.value;
}

SpMat identity(Eigen::Index n) {
  SpMat I(n, n);
  I.setIdentity();
  return I;
}

SpMat diagonal(const VectorXd& d) {
  SpMat D(d.size(), d.size());
  D.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (Eigen::Index i = 0; i < d.size(); ++i) D.insert(i, i) = d[i];
  D.makeCompressed();
  return D;
}

// Smallest eigenpair of Q^T S Q where Q spans the orthogonal complement of range(G).
FormMinimum complement_minimum(MatrixXd S, const MatrixXd& G) {
  const Eigen::Index n = S.rows(), k = G.cols();
  if (k >= n) fail(ErrorCode::Argument, "test space is empty");
  if (k == 0) {
    auto e = linalg::smallest_symmetric_eigenpair(0.5 * (S + S.transpose()));
    return {e.value, e.vector};
  }
  Eigen::HouseholderQR<MatrixXd> qr(G);
  auto H = qr.householderQ();
  S = H.transpose() * S;
  S = (H.transpose() * S.transpose()).transpose();
  MatrixXd C = S.bottomRightCorner(n - k, n - k);
  C = 0.5 * (C + C.transpose());
  auto e = linalg::smallest_symmetric_eigenpair(C);
  FormMinimum out;
  out.value = e.value;
  VectorXd y = VectorXd::Zero(n);
  y.tail(n - k) = e.vector;
  out.vector = H * y;
  return out;
}

}  // namespace

AuxiliaryOperator build_auxiliary(const OperatorBundle& b) {
  SpMat At = b.A.transpose();
  SpMat ab = Eigen::kroneckerProduct(b.B, At);
  AuxiliaryOperator out;
  out.matrix = b.lambda2_solver->solve(MatrixXd(ab));
  if (!out.matrix.allFinite()) fail(ErrorCode::Numerical, "Lambda^2 solve produced non-finite entries");
  out.norm = dense_norm(out.matrix);
  return out;
}

SpMat commutator_defect(const OperatorBundle& b) {
  const Eigen::Index N = b.N();
  const double h = b.h();
  SpMat C = SpMat(b.Lambda2 * b.X0) - SpMat(b.X0 * b.Lambda2);
  SpMat Hm = diagonal(b.d2V) - identity(N);
  SpMat HA = Hm * b.A;
  SpMat AH = SpMat(b.A.transpose()) * Hm;
  SpMat Bt = b.B.transpose();
  SpMat t1 = Eigen::kroneckerProduct(Bt, HA);
  SpMat t2 = Eigen::kroneckerProduct(b.B, AH);
  return C + h * (t1 + t2);
}

AuxiliaryOperator build_A_operator(const OperatorBundle& b, const MatrixXd& L) {
  const double h = b.h();
  SpMat C = SpMat(b.Lambda2 * b.X0) - SpMat(b.X0 * b.Lambda2);
  SpMat BtB = b.B.transpose() * b.B;
  SpMat hess = Eigen::kroneckerProduct(BtB, diagonal(b.d2V));
  MatrixXd rhs = (-1.0 / h) * (C * L);
  rhs -= MatrixXd(hess);
  AuxiliaryOperator out;
  out.matrix = b.lambda2_solver->solve(rhs);
  if (!out.matrix.allFinite()) fail(ErrorCode::Numerical, "Lambda^2 solve produced non-finite entries");
  out.norm = dense_norm(out.matrix);
  return out;
}

double commutator_residual(const OperatorBundle& b) {
  VectorXd m = build_maxwellian(b.potential, b.grid).head(b.N());
  VectorXd probe = lift(m / m.norm(), b.K(), 1);
  return (commutator_defect(b) * probe).norm();
}

double auxiliary_norm_bound(const OperatorBundle& b) {
  double nA = linalg::spectral_norm_dense(MatrixXd(b.A));
  double nB = std::sqrt(b.h() * (b.K() - 1));
  // Lambda^2 >= h
  return nA * nB / b.h();
}

double choose_epsilon(double norm_L, double norm_A, double tau_hat) {
  if (!(norm_L > 0.0) || !(norm_A > 0.0) || !(tau_hat > 0.0))
    fail(ErrorCode::Argument, "epsilon selection needs positive norms and gap");
  return std::min({1.0 / 8.0, 1.0 / (2.0 * norm_L), tau_hat / (8.0 * (norm_A * norm_A + norm_L * norm_L))});
}

FormMinimum modified_form_minimum(const OperatorBundle& b, const MatrixXd& L, double epsilon,
                                  const MatrixXd& G) {
  const Eigen::Index n = b.size();
  MatrixXd Bm = epsilon * (L + L.transpose());
  Bm.diagonal().array() += 1.0;
  // symmetric part of Bm P, Bm symmetric
  MatrixXd PtB = SpMat(b.P.transpose()) * Bm;
  MatrixXd M = 0.5 * (PtB + PtB.transpose());
  Bm.resize(0, 0);
  PtB.resize(0, 0);
  if (G.rows() != n) fail(ErrorCode::Argument, "test space dimension mismatch");
  return complement_minimum(std::move(M), G);
}

FormMinimum gap_form_minimum(const OperatorBundle& b, const MatrixXd& position_quasimodes) {
  MatrixXd W = MatrixXd(SpMat(b.A.transpose() * b.A));
  MatrixXd Wh = W;
  Wh.diagonal().array() += b.h();
  MatrixXd F = Wh.llt().solve(W);
  return complement_minimum(0.5 * (F + F.transpose()), position_quasimodes);
}

HypoCertificate certificate(const OperatorBundle& b, const QuasimodeFamily& q, double tau_hat,
                            const CertificateOptions& opts) {
  HypoCertificate c;
  c.h = b.h();
  c.tau_hat = tau_hat;
  auto L = build_auxiliary(b);
  c.norm_L = L.norm;
  c.norm_A = build_A_operator(b, L.matrix).norm;
  c.epsilon = choose_epsilon(c.norm_L, c.norm_A, tau_hat);
  auto km = modified_form_minimum(b, L.matrix, c.epsilon, q.vectors);
  c.kappa_min = km.value;
  c.implied_A = c.h / c.kappa_min;
  auto gm = gap_form_minimum(b, q.position);
  c.gap_lemma_min = gm.value;
  c.commutator_residual = commutator_residual(b);
  if (opts.validate) {
    if (!(c.kappa_min > 0.0)) {
      std::ostringstream os;
      os << "modified form not coercive on the quasimode complement at h = " << c.h << " (kappa_min "
         << c.kappa_min << ")";
      throw CertificateError(ErrorCode::CertificateFailure, os.str(), km.vector);
    }
    if (c.gap_lemma_min < tau_hat / 4.0 - opts.gap_tolerance) {
      std::ostringstream os;
      os << "gap form minimum " << c.gap_lemma_min << " below tau_hat/4 - " << opts.gap_tolerance
         << " at h = " << c.h;
      throw CertificateError(ErrorCode::GapFailure, os.str(), gm.vector);
    }
  }
  return c;
}

}  // namespace bgk
