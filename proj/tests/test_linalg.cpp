#include "doctest.h"

#include "linalg/krylov.hpp"
#include "linalg/lapack.hpp"
#include "linalg/shifted_solver.hpp"
#include "operators.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace bgk;
using namespace bgk::linalg;

namespace {

OperatorBundle small_bundle(const PotentialSpec& spec, double h, int N = 32, int K = 6) {
  Interval d = default_domain(spec, h);
  GridSpec g;
  g.x_min = d.lo;
  g.x_max = d.hi;
  g.N = N;
  g.K = K;
  g.h = h;
  return assemble(spec, g);
}

}  // namespace

TEST_CASE("shifted solver matches a dense solve") {
  auto b = small_bundle(double_well(), 0.1);
  Eigen::MatrixXcd P = MatrixXd(b.P).cast<cplx>();
  const Eigen::Index n = b.size();
  for (cplx z : {cplx(-1.0, 0.0), cplx(0.003, 0.004), cplx(0.0, -0.02), cplx(0.05, 0.0)}) {
    ShiftedSolver s(b.A, b.K(), b.h(), z);
    Eigen::MatrixXcd M = P - z * Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Random(n, 3);
    Eigen::MatrixXcd x = s.solve(rhs);
    CHECK((M * x - rhs).norm() <= 1e-10 * rhs.norm() * (1.0 + x.norm()));
    Eigen::MatrixXcd y = s.solve_adjoint(rhs);
    CHECK((M.adjoint() * y - rhs).norm() <= 1e-10 * rhs.norm() * (1.0 + y.norm()));
  }
}

TEST_CASE("Lanczos norm estimates") {
  Eigen::MatrixXd M = Eigen::MatrixXd::Random(60, 60);
  auto r = operator_norm<double>([&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return M * v; },
                                 [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return M.transpose() * v; },
                                 60, 7);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(spectral_norm_dense(M)).epsilon(1e-8));

  // smallest singular value through the inverse
  auto b = small_bundle(harmonic(), 0.1);
  cplx z(0.01, 0.02);
  ShiftedSolver s(b.A, b.K(), b.h(), z);
  auto inv = lanczos_largest<cplx>(
      [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return s.solve_adjoint(s.solve(v)); },
      b.size(), 11);
  const Eigen::Index n = b.size();
  Eigen::MatrixXcd Pz = MatrixXd(b.P).cast<cplx>() - z * Eigen::MatrixXcd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Pz);
  double smin = svd.singularValues()[n - 1];
  CHECK(1.0 / std::sqrt(inv.value) == doctest::Approx(smin).epsilon(1e-6));
}

TEST_CASE("ordered Schur and Sylvester") {
  auto b = small_bundle(double_well(), 0.1);
  MatrixXd P = MatrixXd(b.P);
  auto s = ordered_schur(P, 0.25 * 0.1);
  CHECK(s.selected == 2);
  CHECK((s.Z * s.T * s.Z.transpose() - P).norm() <= 1e-12 * P.norm());
  CHECK((s.Z.transpose() * s.Z - MatrixXd::Identity(P.rows(), P.cols())).norm() <= 1e-12);
  for (int i = 0; i < s.selected; ++i) CHECK(std::abs(s.eigenvalues[i]) < 0.025);
  for (std::size_t i = s.selected; i < s.eigenvalues.size(); ++i) CHECK(std::abs(s.eigenvalues[i]) >= 0.025);

  const int k = s.selected;
  const Eigen::Index n = P.rows();
  MatrixXd T11 = s.T.topLeftCorner(k, k), T22 = s.T.bottomRightCorner(n - k, n - k);
  MatrixXd T12 = s.T.topRightCorner(k, n - k);
  MatrixXd R = solve_sylvester(T11, T22, T12);
  CHECK((T11 * R - R * T22 - T12).norm() <= 1e-10 * (1.0 + T12.norm()));

  Eigen::MatrixXd S = Eigen::MatrixXd::Random(30, 30);
  S = (S + S.transpose()).eval();
  auto e = smallest_symmetric_eigenpair(S);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  CHECK(e.value == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-12));
  CHECK((S * e.vector - e.value * e.vector).norm() <= 1e-10);
}

TEST_CASE("Krylov exponential action against the dense exponential") {
  auto b = small_bundle(double_well(), 0.1, 40, 8);
  MatrixXd P = MatrixXd(b.P);
  VectorXd u0 = random_start<double>(b.size(), 3);
  auto apply = [&](const VectorXd& v) -> VectorXd { return -(b.P * v); };
  double anorm = P.cwiseAbs().rowwise().sum().maxCoeff();
  for (double t : {0.0, 0.5, 7.0, 80.0}) {
    ExpmvStats st;
    VectorXd w = expmv(apply, anorm, t, u0, 1e-8, 30, &st);
    VectorXd ref = MatrixXd((-t * P).exp()) * u0;
    CHECK((w - ref).norm() <= 1e-6 * u0.norm());
    if (t == 0.0) CHECK((w - u0).norm() == 0.0);
  }
}
