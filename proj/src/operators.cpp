#include "operators.hpp"

#include "error.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bgk {

namespace {

SpMat identity(Eigen::Index n) {
  SpMat I(n, n);
  I.setIdentity();
  return I;
}

SpMat kron(const SpMat& a, const SpMat& b) {
  SpMat out = Eigen::kroneckerProduct(a, b);
  out.makeCompressed();
  return out;
}

double quintic_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double quintic_step_slope(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

// Outermost crossing of V - vmin = level beyond the critical point c, moving in direction dir.
double outer_crossing(const PotentialSpec& spec, double c, double dir, double vmin, double level) {
  auto f = [&](double x) { return evaluate(spec, x, 0) - vmin - level; };
  double step = 1.0;
  double far = c + dir * step;
  while (f(far) < 0.0) {
    step *= 2.0;
    far = c + dir * step;
    if (step > 1e8) fail(ErrorCode::Domain, "potential does not reach the confinement level");
  }
  double near = c;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (near + far);
    if (f(mid) < 0.0) near = mid; else far = mid;
    if (std::abs(far - near) < 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (near + far);
}

}  // namespace

void validate(const GridSpec& g) {
  if (g.N < 16) fail(ErrorCode::Argument, "grid needs N >= 16");
  if (g.K < 4) fail(ErrorCode::Argument, "velocity basis needs K >= 4");
  if (!(g.h > 0.0) || g.h > 1.0) fail(ErrorCode::Argument, "h must satisfy 0 < h <= 1");
  if (!(g.x_min < g.x_max)) fail(ErrorCode::Argument, "grid needs x_min < x_max");
  if (!(g.doubler_scale >= 0.0)) fail(ErrorCode::Argument, "doubler_scale must be >= 0");
}

VectorXd grid_points(const GridSpec& g) {
  VectorXd x(g.N);
  const double dx = g.dx();
  for (int i = 0; i < g.N; ++i) x[i] = g.x_min + dx * i;
  x[g.N - 1] = g.x_max;
  return x;
}

Interval default_domain(const PotentialSpec& spec, double h, double tol) {
  if (!(h > 0.0)) fail(ErrorCode::Argument, "h must be positive");
  auto cat = find_critical_points(spec);
  auto all = cat.sorted();
  double vmin = cat.global_minimum().value;
  double level = 2.0 * h * std::log(1.0 / tol);
  double left = all.front().location, right = all.back().location;
  // an outer well already above the level keeps a full margin of its own
  auto margin = [&](double c) {
    double above = evaluate(spec, c, 0) - vmin;
    return above < level ? level : above + level;
  };
  double lo_level = margin(left), hi_level = margin(right);
  return {outer_crossing(spec, left, -1.0, vmin, lo_level),
          outer_crossing(spec, right, 1.0, vmin, hi_level)};
}

SpMat centered_difference(int N, double dx) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * N);
  for (int i = 0; i < N; ++i) {
    if (i + 1 < N) t.emplace_back(i, i + 1, 0.5 / dx);
    if (i > 0) t.emplace_back(i, i - 1, -0.5 / dx);
  }
  SpMat D(N, N);
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

SpMat fourth_difference(int N, double dx) {
  static const double stencil[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * N);
  for (int i = 0; i < N; ++i)
    for (int o = -2; o <= 2; ++o)
      if (i + o >= 0 && i + o < N) t.emplace_back(i, i + o, stencil[o + 2] / dx);
  SpMat S(N, N);
  S.setFromTriplets(t.begin(), t.end());
  return S;
}

double doubler_coefficient(const PotentialSpec& spec, const GridSpec& g) {
  // Mass of the alternating grid mode equals max|V'|, twice what it needs to dominate V'/2.
  VectorXd dV = evaluate(spec, grid_points(g), 1);
  return g.doubler_scale * dV.cwiseAbs().maxCoeff() * g.dx() / (16.0 * g.h);
}

SpMat build_position_ladder(const PotentialSpec& spec, const GridSpec& g) {
  validate(g);
  const double dx = g.dx();
  const double w = doubler_coefficient(spec, g);
  VectorXd dV = evaluate(spec, grid_points(g), 1);
  SpMat D = centered_difference(g.N, dx);
  if (w > 0.0) D += w * fourth_difference(g.N, dx);
  SpMat A = g.h * D;
  for (int i = 0; i < g.N; ++i) A.coeffRef(i, i) += 0.5 * dV[i];
  A.makeCompressed();
  return A;
}

SpMat build_velocity_ladder(int K, double h) {
  if (K < 2) fail(ErrorCode::Argument, "velocity ladder needs K >= 2");
  if (!(h > 0.0)) fail(ErrorCode::Argument, "h must be positive");
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 1; k < K; ++k) t.emplace_back(k - 1, k, std::sqrt(h * k));
  SpMat B(K, K);
  B.setFromTriplets(t.begin(), t.end());
  return B;
}

SpMat assemble_transport(const SpMat& A, const SpMat& B) {
  if (A.rows() != A.cols() || B.rows() != B.cols())
    fail(ErrorCode::Argument, "ladder matrices must be square");
  SpMat Bt = B.transpose(), At = A.transpose();
  SpMat X0 = kron(Bt, A) - kron(B, At);
  X0.prune(0.0);
  return X0;
}

SpMat assemble_transport_direct(const SpMat& A, const SpMat& B) {
  if (A.rows() != A.cols() || B.rows() != B.cols())
    fail(ErrorCode::Argument, "ladder matrices must be square");
  SpMat Bt = B.transpose(), At = A.transpose();
  SpMat v = B + Bt;          // multiplication by v
  SpMat hdv = 0.5 * (B - Bt);  // h d/dv
  SpMat hdx = 0.5 * (A - At);  // h d/dx
  SpMat dV = A + At;           // V'
  SpMat X0 = kron(v, hdx) - kron(hdv, dV);
  X0.prune(0.0);
  return X0;
}

BgkPair assemble_bgk(const SpMat& X0, int K, double h) {
  if (X0.rows() != X0.cols() || X0.rows() % K != 0)
    fail(ErrorCode::Argument, "transport matrix does not match the velocity basis");
  const Eigen::Index N = X0.rows() / K;
  SpMat e0(K, K);
  e0.insert(0, 0) = 1.0;
  BgkPair out;
  out.Pi = kron(e0, identity(N));
  SpMat collision = identity(X0.rows()) - out.Pi;
  collision.prune(0.0);
  out.P = X0 + h * collision;
  out.P.makeCompressed();
  return out;
}

Lambda2Solver::Lambda2Solver(const SpMat& A, int K, double h) : n_(static_cast<int>(A.rows())) {
  MatrixXd AtA = MatrixXd(SpMat(A.transpose() * A));
  blocks_.reserve(K);
  for (int k = 0; k < K; ++k) {
    MatrixXd block = AtA;
    block.diagonal().array() += h * (k + 1);
    blocks_.emplace_back(block);
    if (blocks_.back().info() != Eigen::Success)
      fail(ErrorCode::Numerical, "Cholesky factorization of Lambda^2 failed");
  }
}

MatrixXd Lambda2Solver::solve(const MatrixXd& rhs) const {
  if (rhs.rows() != static_cast<Eigen::Index>(n_) * K())
    fail(ErrorCode::Argument, "Lambda^2 solve: dimension mismatch");
  MatrixXd out(rhs.rows(), rhs.cols());
  for (int k = 0; k < K(); ++k)
    out.middleRows(static_cast<Eigen::Index>(k) * n_, n_) =
        blocks_[k].solve(rhs.middleRows(static_cast<Eigen::Index>(k) * n_, n_));
  return out;
}

VectorXd Lambda2Solver::solve(const VectorXd& rhs) const {
  return solve(MatrixXd(rhs)).col(0);
}

Lambda2Pair assemble_lambda2(const SpMat& A, const SpMat& B, double h) {
  const Eigen::Index N = A.rows(), K = B.rows();
  SpMat AtA = A.transpose() * A;
  SpMat BtB = B.transpose() * B;
  Lambda2Pair out;
  out.Lambda2 = kron(identity(K), AtA) + kron(BtB, identity(N)) + h * identity(N * K);
  out.Lambda2.prune(0.0);
  out.solver = std::make_shared<const Lambda2Solver>(A, static_cast<int>(K), h);
  return out;
}

SpMat velocity_reversal(int N, int K) {
  SpMat sig(K, K);
  for (int k = 0; k < K; ++k) sig.insert(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return kron(sig, identity(N));
}

VectorXd lift(const VectorXd& position, int K, int mode) {
  VectorXd out = VectorXd::Zero(position.size() * K);
  out.segment(position.size() * mode, position.size()) = position;
  return out;
}

OperatorBundle assemble(const PotentialSpec& spec, const GridSpec& grid) {
  validate(spec);
  validate(grid);
  OperatorBundle b;
  b.grid = grid;
  b.potential = spec;
  b.x = grid_points(grid);
  b.dV = evaluate(spec, b.x, 1);
  b.d2V = evaluate(spec, b.x, 2);
  b.doubler = doubler_coefficient(spec, grid);
  b.A = build_position_ladder(spec, grid);
  b.B = build_velocity_ladder(grid.K, grid.h);
  b.X0 = assemble_transport(b.A, b.B);
  auto bgk = assemble_bgk(b.X0, grid.K, grid.h);
  b.P = std::move(bgk.P);
  b.Pi = std::move(bgk.Pi);
  auto l2 = assemble_lambda2(b.A, b.B, grid.h);
  b.Lambda2 = std::move(l2.Lambda2);
  b.lambda2_solver = std::move(l2.solver);
  b.Ukappa = velocity_reversal(grid.N, grid.K);

  double vmin = find_critical_points(spec).global_minimum().value;
  for (double xb : {grid.x_min, grid.x_max}) {
    double weight = std::exp(-(evaluate(spec, xb, 0) - vmin) / (2.0 * grid.h));
    if (weight > 1e-14) {
      std::ostringstream os;
      os << "boundary weight e^{-V/2h} = " << weight << " at x = " << xb << " exceeds 1e-14";
      b.warnings.push_back(os.str());
    }
  }
  return b;
}

VectorXd build_maxwellian(const PotentialSpec& spec, const GridSpec& grid) {
  validate(grid);
  double vmin = find_critical_points(spec).global_minimum().value;
  VectorXd x = grid_points(grid);
  VectorXd m(grid.N);
  for (int i = 0; i < grid.N; ++i) m[i] = std::exp(-(evaluate(spec, x[i], 0) - vmin) / (2.0 * grid.h));
  double n = m.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    fail(ErrorCode::Domain, "Maxwellian underflows on the grid; the domain is too far from the wells");
  return lift(m / n, grid.K, 0);
}

double Cutoff::operator()(double x) const {
  if (!std::isfinite(radius)) return 1.0;
  return 1.0 - quintic_step((std::abs(x - center) - radius) / width);
}

double Cutoff::derivative(double x) const {
  if (!std::isfinite(radius)) return 0.0;
  const double s = x >= center ? 1.0 : -1.0;
  return -s * quintic_step_slope((std::abs(x - center) - radius) / width) / width;
}

std::vector<Cutoff> make_cutoffs(const CriticalPointCatalog& catalog, const CutoffParams& params) {
  auto all = catalog.sorted();
  std::vector<Cutoff> out;
  for (int j = 0; j < catalog.n0; ++j) {
    const double m = catalog.minima[j].location;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& c : all)
      if (std::abs(c.location - m) > 1e-12) nearest = std::min(nearest, std::abs(c.location - m));
    double r = params.radii.empty() ? params.radius_factor * nearest : params.radii.at(j);
    if (!(r > 0.0)) fail(ErrorCode::Configuration, "cutoff radius must be positive");
    out.push_back({m, r, std::isfinite(r) ? params.width_factor * r : 0.0});
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      double reach = out[i].radius + out[i].width + out[j].radius + out[j].width;
      if (std::abs(out[i].center - out[j].center) < reach)
        fail(ErrorCode::Configuration, "cutoff supports of distinct minima overlap");
    }
  return out;
}

MatrixXd position_quasimodes(const PotentialSpec& spec, const GridSpec& grid,
                             const CriticalPointCatalog& catalog, const std::vector<Cutoff>& cutoffs) {
  VectorXd x = grid_points(grid);
  MatrixXd E(grid.N, catalog.n0);
  for (int j = 0; j < catalog.n0; ++j) {
    const double vj = catalog.minima[j].value;
    for (int i = 0; i < grid.N; ++i)
      E(i, j) = cutoffs[j](x[i]) * std::exp(-(evaluate(spec, x[i], 0) - vj) / (2.0 * grid.h));
    double n = E.col(j).norm();
    if (!(n > 0.0)) fail(ErrorCode::Domain, "quasimode vanishes on the grid");
    E.col(j) /= n;
  }
  return E;
}

QuasimodeFamily build_quasimodes(const CriticalPointCatalog& catalog, const OperatorBundle& bundle,
                                 const CutoffParams& params) {
  if (catalog.n0 < 1) fail(ErrorCode::Argument, "catalog has no minima");
  QuasimodeFamily q;
  q.cutoffs = make_cutoffs(catalog, params);
  q.position = position_quasimodes(bundle.potential, bundle.grid, catalog, q.cutoffs);
  q.vectors = MatrixXd::Zero(bundle.size(), catalog.n0);
  q.vectors.topRows(bundle.N()) = q.position;
  for (int j = 0; j < catalog.n0; ++j)
    q.residual_norms.push_back((bundle.P * q.vectors.col(j)).norm());
  q.gram = q.vectors.transpose() * q.vectors;
  return q;
}

std::vector<double> quasimode_consistency(const CriticalPointCatalog& catalog, const OperatorBundle& bundle,
                                          const QuasimodeFamily& q) {
  // P (g (x) e_0) = sqrt(h) e_1 (x) A g, and a_h (chi e^{-(V - v)/2h}) = h chi' e^{-(V - v)/2h}
  const double h = bundle.h();
  const int N = bundle.N();
  std::vector<double> out;
  for (int j = 0; j < q.n0(); ++j) {
    const double vj = catalog.minima[j].value;
    double n = 0.0;
    VectorXd exact = VectorXd::Zero(bundle.size());
    for (int i = 0; i < N; ++i) {
      const double e = std::exp(-(evaluate(bundle.potential, bundle.x[i], 0) - vj) / (2.0 * h));
      n += std::pow(q.cutoffs[j](bundle.x[i]) * e, 2);
      exact[N + i] = std::sqrt(h) * h * q.cutoffs[j].derivative(bundle.x[i]) * e;
    }
    exact /= std::sqrt(n);
    out.push_back((bundle.P * q.vectors.col(j) - exact).norm());
  }
  return out;
}

}  // namespace bgk
