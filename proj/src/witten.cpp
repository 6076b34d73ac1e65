#include "witten.hpp"

#include "error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace bgk {

SpMat assemble_witten(const SpMat& A) {
  SpMat W = A.transpose() * A;
  // symmetrize the accumulated product so W == W^T holds bit for bit
  SpMat Wt = W.transpose();
  SpMat out = 0.5 * (W + Wt);
  out.makeCompressed();
  return out;
}

SpMat assemble_witten_direct(const PotentialSpec& spec, const GridSpec& grid) {
  validate(grid);
  VectorXd x = grid_points(grid);
  VectorXd dV = evaluate(spec, x, 1), d2V = evaluate(spec, x, 2);
  SpMat D = centered_difference(grid.N, grid.dx());
  SpMat W = -grid.h * grid.h * SpMat(D * D);
  for (int i = 0; i < grid.N; ++i)
    W.coeffRef(i, i) += 0.25 * dV[i] * dV[i] - 0.5 * grid.h * d2V[i];
  W.makeCompressed();
  return W;
}

WittenReport witten_small_spectrum(const SpMat& W, int n0, double h) {
  if (n0 < 1) fail(ErrorCode::Argument, "n0 must be positive");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(MatrixXd(W), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorCode::Numerical, "Witten eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  WittenReport r;
  r.h = h;
  r.n0 = n0;
  const Eigen::Index keep = std::min<Eigen::Index>(n0 + 5, ev.size());
  for (Eigen::Index i = 0; i < keep; ++i) r.eigenvalues.push_back(ev[i]);
  if (ev.size() <= n0) fail(ErrorCode::Numerical, "grid too small for the requested n0");
  r.tau_raw = ev[n0] / h;
  r.tau_hat = std::min(r.tau_raw, 1.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) r.small_count += ev[i] < 0.5 * r.tau_hat * h;
  return r;
}

std::vector<double> quasimode_residual(const SpMat& W, const MatrixXd& E) {
  std::vector<double> out;
  for (Eigen::Index j = 0; j < E.cols(); ++j)
    out.push_back((W * E.col(j)).norm() / E.col(j).norm());
  return out;
}

std::vector<double> quasimode_residual(const SpMat& W, const CriticalPointCatalog& catalog,
                                       const PotentialSpec& spec, const GridSpec& grid,
                                       const std::vector<Cutoff>& cutoffs) {
  return quasimode_residual(W, position_quasimodes(spec, grid, catalog, cutoffs));
}

WittenReport witten_report(const OperatorBundle& bundle, const CriticalPointCatalog& catalog,
                           const CutoffParams& cutoffs) {
  SpMat W = assemble_witten(bundle.A);
  WittenReport r = witten_small_spectrum(W, catalog.n0, bundle.h());
  r.quasimode_residuals = quasimode_residual(W, catalog, bundle.potential, bundle.grid,
                                             make_cutoffs(catalog, cutoffs));
  return r;
}

}  // namespace bgk
