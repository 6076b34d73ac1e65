#include "spectral.hpp"

#include "linalg/krylov.hpp"
#include "linalg/shifted_solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace bgk {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

void sort_by_modulus(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return a.imag() < b.imag();
  });
}

void fill_gap(SmallSpectrum& s) {
  s.inside_max_abs = 0.0;
  for (cplx z : s.small_eigenvalues) s.inside_max_abs = std::max(s.inside_max_abs, std::abs(z));
  s.outside_min_re = std::numeric_limits<double>::infinity();
  for (cplx z : s.outside_eigenvalues) s.outside_min_re = std::min(s.outside_min_re, std::abs(z.real()));
  s.gap_ratio = s.small_eigenvalues.empty() ? 0.0
                : s.inside_max_abs > 0.0   ? s.outside_min_re / s.inside_max_abs
                                           : std::numeric_limits<double>::infinity();
}

// Dominant eigenvalues of (P - sigma)^{-1} by subspace iteration with Rayleigh-Ritz.
std::vector<cplx> shift_invert_eigenvalues(const OperatorBundle& b, double sigma, double radius,
                                           const SpectralOptions& opts) {
  linalg::ShiftedSolver solver(b.A, b.K(), b.h(), cplx(sigma, 0.0));
  const Eigen::Index n = b.size();
  int p = 12;
  for (int attempt = 0; attempt < 6; ++attempt, p *= 2) {
    MatrixXcd X(n, p);
    for (int j = 0; j < p; ++j) X.col(j) = linalg::random_start<cplx>(n, opts.seed + j);
    std::vector<cplx> lambdas;
    bool converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
      Eigen::HouseholderQR<MatrixXcd> qr(X);
      MatrixXcd Q = qr.householderQ() * MatrixXcd::Identity(n, p);
      MatrixXcd SQ = solver.solve(Q);
      MatrixXcd H = Q.adjoint() * SQ;
      Eigen::ComplexEigenSolver<MatrixXcd> es(H);
      MatrixXcd Y = Q * es.eigenvectors();
      MatrixXcd SY = SQ * es.eigenvectors();
      // order Ritz values by |theta| descending
      std::vector<int> idx(p);
      for (int j = 0; j < p; ++j) idx[j] = j;
      std::sort(idx.begin(), idx.end(), [&](int a, int c) {
        return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[c]);
      });
      lambdas.clear();
      double worst = 0.0;
      // Ritz values enclosing the disk plus two beyond it; the rest are guards
      int want = 0;
      while (want < p && std::abs(1.0 / es.eigenvalues()[idx[want]]) <= 2.0 * radius) ++want;
      want = std::min(want + 2, p / 2);
      for (int r = 0; r < want; ++r) {
        int j = idx[r];
        cplx theta = es.eigenvalues()[j];
        double res = (SY.col(j) - theta * Y.col(j)).norm() / (std::abs(theta) * Y.col(j).norm());
        // the two beyond the disk only feed the gap ratio
        worst = std::max(worst, std::abs(1.0 / theta) <= 2.0 * radius ? res : 1e-4 * res);
        lambdas.push_back(sigma + 1.0 / theta);
      }
      if (worst <= 1e-10) {
        converged = true;
        break;
      }
      X = SY;
    }
    if (!converged) fail(ErrorCode::Numerical, "shift-invert subspace iteration did not converge");
    // every eigenvalue in the disk sits within 2 radius of the shift
    if (std::abs(lambdas.back() - sigma) > 2.0 * radius || p >= n) return lambdas;
  }
  fail(ErrorCode::Numerical, "shift-invert: could not enclose the disk with the subspace");
}

}  // namespace

SmallSpectrum small_eigenvalues(const OperatorBundle& b, double delta_hat, const SpectralOptions& opts,
                                bool validate) {
  if (!(delta_hat > 0.0)) fail(ErrorCode::Argument, "delta_hat must be positive");
  SmallSpectrum s;
  s.h = b.h();
  s.delta_hat = delta_hat;
  const double radius = delta_hat * b.h();
  if (b.size() <= opts.dense_eigen_limit) {
    s.dense = true;
    s.schur = linalg::ordered_schur(MatrixXd(b.P), radius);
    const auto& ev = s.schur->eigenvalues;
    for (int i = 0; i < s.schur->selected; ++i) s.small_eigenvalues.push_back(ev[i]);
    for (std::size_t i = s.schur->selected; i < ev.size(); ++i) s.outside_eigenvalues.push_back(ev[i]);
  } else {
    s.dense = false;
    auto lambdas = shift_invert_eigenvalues(b, -radius, radius, opts);
    for (cplx l : lambdas) (std::abs(l) < radius ? s.small_eigenvalues : s.outside_eigenvalues).push_back(l);
  }
  sort_by_modulus(s.small_eigenvalues);
  sort_by_modulus(s.outside_eigenvalues);
  fill_gap(s);
  if (validate && !(s.gap_ratio >= opts.separation_threshold)) {
    std::ostringstream os;
    os << "cluster separation failed at h = " << b.h() << ": gap ratio " << s.gap_ratio << " < "
       << opts.separation_threshold << " with " << s.small_eigenvalues.size()
       << " eigenvalues inside |z| < " << radius << "; choose a different delta_hat";
    throw ClusterSeparationError(os.str(), std::move(s));
  }
  return s;
}

double resolvent_norm(const OperatorBundle& b, cplx z, const SpectralOptions& opts) {
  const Eigen::Index n = b.size();
  if (n <= opts.dense_svd_limit) {
    MatrixXcd M = MatrixXd(b.P).cast<cplx>();
    M.diagonal().array() -= z;
    Eigen::BDCSVD<MatrixXcd> svd(M);
    double smin = svd.singularValues()[n - 1];
    if (smin <= std::numeric_limits<double>::epsilon() * svd.singularValues()[0])
      fail(ErrorCode::SpectrumHit, "shift lies on the spectrum");
    return 1.0 / smin;
  }
  linalg::ShiftedSolver solver(b.A, b.K(), b.h(), z);
  auto r = linalg::lanczos_largest<cplx>(
      [&](const VectorXcd& v) -> VectorXcd { return solver.solve_adjoint(solver.solve(v)); }, n,
      opts.seed, 1e-2 * opts.sigma_rel_tol, opts.max_iterations);
  if (!r.converged) fail(ErrorCode::Numerical, "inverse Lanczos for sigma_min did not converge");
  return std::sqrt(r.value);
}

ResolventSweep resolvent_sweep(const OperatorBundle& b, double delta1, double delta_hat, int n_angles,
                               int n_radii, int n_line, const SpectralOptions& opts) {
  if (!(delta1 > 0.0) || delta1 > delta_hat) fail(ErrorCode::Argument, "need 0 < delta1 <= delta_hat");
  if (n_angles < 1 || n_radii < 1) fail(ErrorCode::Argument, "sweep needs at least one sample");
  const double h = b.h();
  ResolventSweep out;
  out.h = h;
  out.r_inner = delta1 * h;
  out.r_outer = delta_hat * h;
  auto radius = [&](int i) {
    return n_radii == 1 ? out.r_outer : out.r_inner + (out.r_outer - out.r_inner) * i / (n_radii - 1);
  };
  for (int i = 0; i < n_radii; ++i) {
    for (int k = 0; k < n_angles; ++k) {
      double th = 2.0 * std::numbers::pi * k / n_angles;
      cplx z = std::polar(radius(i), th);
      double nrm = resolvent_norm(b, z, opts);
      out.samples.push_back({z, 1.0 / nrm, nrm, false});
      out.summary = std::max(out.summary, h * nrm);
    }
  }
  for (int j = 1; j <= n_line; ++j) {
    double y = out.r_outer * j / n_line;
    for (double sgn : {1.0, -1.0}) {
      cplx z(0.0, sgn * y);
      double nrm = resolvent_norm(b, z, opts);
      out.samples.push_back({z, 1.0 / nrm, nrm, true});
      out.line_summary = std::max(out.line_summary, h * nrm);
    }
  }
  return out;
}

ProjectorData spectral_projector(const SmallSpectrum& s) {
  if (!s.schur) fail(ErrorCode::Argument, "spectral projector needs the dense Schur path");
  const auto& sch = *s.schur;
  const Eigen::Index n = sch.T.rows();
  const int k = sch.selected;
  if (k < 1) fail(ErrorCode::ClusterSeparation, "no eigenvalue inside the disk");
  ProjectorData p;
  p.rank = k;
  p.Q1 = sch.Z.leftCols(k);
  p.Q2 = sch.Z.rightCols(n - k);
  p.T11 = sch.T.topLeftCorner(k, k);
  p.R = linalg::solve_sylvester(p.T11, sch.T.bottomRightCorner(n - k, n - k), sch.T.topRightCorner(k, n - k));
  p.Pi0 = p.Q1 * (p.Q1.transpose() + p.R * p.Q2.transpose());
  double sr = linalg::spectral_norm_dense(p.R);
  p.norm = std::sqrt(1.0 + sr * sr);
  p.idempotency = operator_norm_dense(MatrixXd(p.Pi0 * p.Pi0 - p.Pi0));
  return p;
}

MatrixXd contour_projector(const OperatorBundle& b, double radius, int nodes) {
  if (nodes < 2 || nodes % 2 != 0) fail(ErrorCode::Argument, "contour needs an even node count");
  const Eigen::Index n = b.size();
  MatrixXd acc = MatrixXd::Zero(n, n);
  const MatrixXcd I = MatrixXcd::Identity(n, n);
  // nodes at half-integer angles come in conjugate pairs; sum the upper half twice
  for (int k = 0; k < nodes / 2; ++k) {
    double th = 2.0 * std::numbers::pi * (k + 0.5) / nodes;
    cplx z = std::polar(radius, th);
    linalg::ShiftedSolver solver(b.A, b.K(), b.h(), z);
    MatrixXcd Rz = solver.solve(I);
    acc -= (2.0 / nodes) * (z * Rz).real();
  }
  return acc;
}

double operator_norm_dense(const MatrixXd& M, std::uint64_t seed) {
  auto r = linalg::operator_norm<double>([&](const VectorXd& v) -> VectorXd { return M * v; },
                                         [&](const VectorXd& v) -> VectorXd { return M.transpose() * v; },
                                         M.cols(), seed, 1e-10, 300);
  return r.value;
}

double pt_check(const SpMat& P, const SpMat& U) {
  if (P.rows() != U.rows()) fail(ErrorCode::Argument, "PT check: dimension mismatch");
  SpMat d = SpMat(U * P * U) - SpMat(P.transpose());
  return d.norm();
}

KappaGram kappa_gram(const ProjectorData& p, const SpMat& U, double h) {
  if (p.rank < 1) fail(ErrorCode::Argument, "empty cluster space");
  KappaGram kg;
  MatrixXd UQ = U * p.Q1;
  kg.gram = p.Q1.transpose() * UQ;
  MatrixXd G = 0.5 * (kg.gram + kg.gram.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> gs(G, Eigen::EigenvaluesOnly);
  kg.min_eig = gs.eigenvalues()[0];
  if (!(kg.min_eig > 0.0)) {
    std::ostringstream os;
    os << "kappa form is not positive on the cluster space at h = " << h << " (min eigenvalue "
       << kg.min_eig << ")";
    fail(ErrorCode::KappaDegenerate, os.str());
  }
  // G T11 is symmetric in exact arithmetic since U P U = P^T
  MatrixXd GT = G * p.T11;
  MatrixXd S = 0.5 * (GT + GT.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(S, G);
  if (es.info() != Eigen::Success) fail(ErrorCode::KappaDegenerate, "kappa diagonalization failed");
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) kg.eigenvalues.push_back(es.eigenvalues()[i]);
  kg.X = es.eigenvectors();
  Eigen::JacobiSVD<MatrixXd> svd(kg.X);
  kg.eigvec_condition = svd.singularValues()[0] / svd.singularValues()[svd.singularValues().size() - 1];
  for (Eigen::Index j = 0; j < kg.X.cols(); ++j) {
    VectorXd x = kg.X.col(j);
    VectorXd y = G * x;
    VectorXd ry = p.R.transpose() * y;
    kg.mode_projector_norms.push_back(x.norm() * std::sqrt(y.squaredNorm() + ry.squaredNorm()));
  }
  return kg;
}

VectorXd mode_projection(const ProjectorData& p, const KappaGram& kg, int j, const VectorXd& u) {
  MatrixXd G = 0.5 * (kg.gram + kg.gram.transpose());
  VectorXd x = kg.X.col(j);
  double coeff = x.dot(G * p.coordinates(u));
  return p.Q1 * (coeff * x);
}

ScalingBridge scaling_bridge(const PotentialSpec& spec, const GridSpec& grid, double delta_hat, double floor,
                             const SpectralOptions& opts) {
  const double h = grid.h;
  ScalingBridge out;
  out.h = h;
  auto scaled = small_eigenvalues(assemble(spec, grid), delta_hat, opts, false);
  GridSpec unit = grid;
  unit.x_min = grid.x_min / std::sqrt(h);
  unit.x_max = grid.x_max / std::sqrt(h);
  unit.h = 1.0;
  auto u = small_eigenvalues(assemble(rescale_potential(spec, h), unit), delta_hat, opts, false);
  out.scaled = scaled.small_eigenvalues;
  for (cplx z : u.small_eigenvalues) out.unit_scale.push_back(h * z);
  out.count_match = out.scaled.size() == out.unit_scale.size();
  if (!out.count_match) return out;
  for (std::size_t i = 0; i < out.scaled.size(); ++i) {
    double d = std::abs(out.scaled[i] - out.unit_scale[i]);
    double ref = std::abs(out.scaled[i]);
    if (ref > floor * h) out.max_relative = std::max(out.max_relative, d / ref);
    else out.kernel_abs = std::max(out.kernel_abs, d);
  }
  return out;
}

}  // namespace bgk
