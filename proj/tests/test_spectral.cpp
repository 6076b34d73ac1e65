#include "doctest.h"

#include "fit.hpp"
#include "linalg/krylov.hpp"
#include "spectral.hpp"

#include <cmath>

using namespace bgk;

namespace {

OperatorBundle bundle_at(const PotentialSpec& spec, double h, int N = 60, int K = 8) {
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

TEST_CASE("harmonic kernel is isolated") {
  auto b = bundle_at(harmonic(), 0.1);
  auto s = small_eigenvalues(b, 0.25);
  REQUIRE(s.small_eigenvalues.size() == 1);
  CHECK(std::abs(s.small_eigenvalues[0]) <= 1e-6);
  CHECK(s.gap_ratio >= 10.0);

  auto p = spectral_projector(s);
  CHECK(p.rank == 1);
  CHECK(p.norm <= 1.01);
  CHECK(p.idempotency <= 1e-8);
  // ranges over the discrete Maxwellian up to discretization error
  VectorXd M = build_maxwellian(harmonic(), b.grid);
  double coarse = (M - p.Pi0 * M).norm();
  CHECK(coarse <= 2e-2);
  auto fine = bundle_at(harmonic(), 0.1, 120, 8);
  VectorXd Mf = build_maxwellian(harmonic(), fine.grid);
  double ratio = coarse / (Mf - spectral_projector(small_eigenvalues(fine, 0.25)).Pi0 * Mf).norm();
  CHECK(ratio >= 3.0);
}

TEST_CASE("double well has two real small eigenvalues") {
  auto b = bundle_at(double_well(), 0.1);
  auto s = small_eigenvalues(b, 0.25);
  REQUIRE(s.small_eigenvalues.size() == 2);
  for (cplx z : s.small_eigenvalues) CHECK(std::abs(z.imag()) <= 1e-10 * 0.1);
  CHECK(std::abs(s.small_eigenvalues[0]) <= 1e-6);
  CHECK(s.small_eigenvalues[1].real() > 1e-5);
}

TEST_CASE("spectrum is closed under conjugation and PT symmetric") {
  auto b = bundle_at(tilted_double_well(0.2), 0.1, 40, 6);
  CHECK(pt_check(b.P, b.Ukappa) <= 1e-13 * b.P.norm());
  auto s = small_eigenvalues(b, 0.25, {}, false);
  std::vector<cplx> all = s.small_eigenvalues;
  all.insert(all.end(), s.outside_eigenvalues.begin(), s.outside_eigenvalues.end());
  for (cplx z : all) {
    double best = 1e300;
    for (cplx w : all) best = std::min(best, std::abs(w - std::conj(z)));
    CHECK(best <= 1e-8 * (1.0 + std::abs(z)));
  }
}

TEST_CASE("contour and Schur projectors agree") {
  auto b = bundle_at(double_well(), 0.1, 40, 6);
  auto s = small_eigenvalues(b, 0.25);
  auto p = spectral_projector(s);
  MatrixXd C = contour_projector(b, 0.25 * 0.1, 64);
  CHECK((C - p.Pi0).norm() <= 1e-6 * p.Pi0.norm());
  CHECK(p.idempotency <= 1e-8);
  CHECK((p.Pi0 * MatrixXd(b.P) - MatrixXd(b.P) * p.Pi0).norm() <= 1e-8 * b.P.norm());
}

TEST_CASE("quasimodes lie almost in the projector range") {
  double prev = 1e300;
  for (double h : {0.2, 0.1}) {
    auto b = bundle_at(double_well(), h);
    auto cat = find_critical_points(double_well(), default_search_box(double_well()));
    auto q = build_quasimodes(cat, b, {});
    auto p = spectral_projector(small_eigenvalues(b, 0.25, {}, false));
    double worst = 0.0;
    for (Eigen::Index j = 0; j < q.vectors.cols(); ++j) {
      VectorXd g = q.vectors.col(j);
      worst = std::max(worst, (p.Pi0 * g - g).norm());
    }
    CHECK(worst <= 0.5);
    CHECK(worst < prev);
    prev = worst;
  }
}

TEST_CASE("resolvent norm") {
  auto b = bundle_at(double_well(), 0.1, 30, 6);
  SpectralOptions dense, iter;
  iter.dense_svd_limit = 0;
  // accretive: |(P + 1)^{-1}| <= 1
  CHECK(resolvent_norm(b, cplx(-1.0, 0.0), dense) <= 1.0 + 1e-12);
  for (cplx z : {cplx(0.01, 0.02), cplx(-0.02, 0.0), cplx(0.0, 0.015)}) {
    double a = resolvent_norm(b, z, dense);
    double c = resolvent_norm(b, z, iter);
    CHECK(c == doctest::Approx(a).epsilon(1e-6));
  }
  auto s = small_eigenvalues(b, 0.25);
  double mu2 = std::abs(s.small_eigenvalues[1]);
  // half way to the second eigenvalue the norm is at least the inverse distance
  CHECK(resolvent_norm(b, cplx(mu2 / 2, 0.0), dense) >= 1.0 / (mu2 / 2) * (1.0 - 1e-12));
}

TEST_CASE("resolvent sweep on the annulus") {
  std::vector<double> summaries;
  for (double h : {0.2, 0.1, 0.05}) {
    auto b = bundle_at(harmonic(), h, 30, 6);
    auto sw = resolvent_sweep(b, 0.05, 0.25, 16, 3, 4);
    CHECK(sw.samples.size() == 16 * 3 + 8);
    // the kernel sits at distance r_outer from the outer circle
    CHECK(sw.summary >= 0.99 / 0.25);
    for (const auto& smp : sw.samples) CHECK(smp.norm * smp.sigma_min == doctest::Approx(1.0));
    summaries.push_back(sw.summary);
  }
  for (double v : summaries) CHECK(v <= 3.0 * summaries.front());
  for (double v : summaries) CHECK(v >= summaries.front() / 3.0);
}

TEST_CASE("iterative small spectrum matches the dense one") {
  auto b = bundle_at(double_well(), 0.1, 40, 6);
  SpectralOptions iter;
  iter.dense_eigen_limit = 0;
  auto d = small_eigenvalues(b, 0.25);
  auto s = small_eigenvalues(b, 0.25, iter);
  CHECK_FALSE(s.dense);
  REQUIRE(s.small_eigenvalues.size() == d.small_eigenvalues.size());
  for (std::size_t i = 0; i < d.small_eigenvalues.size(); ++i)
    CHECK(std::abs(s.small_eigenvalues[i] - d.small_eigenvalues[i]) <= 1e-10);
  CHECK(s.gap_ratio == doctest::Approx(d.gap_ratio).epsilon(1e-8));
}

TEST_CASE("kappa gram on the cluster space") {
  {
    auto b = bundle_at(harmonic(), 0.1);
    auto p = spectral_projector(small_eigenvalues(b, 0.25));
    auto kg = kappa_gram(p, b.Ukappa, 0.1);
    CHECK(kg.gram(0, 0) == doctest::Approx(1.0).epsilon(1e-4));
  }
  auto b = bundle_at(double_well(), 0.1);
  auto s = small_eigenvalues(b, 0.25);
  auto p = spectral_projector(s);
  auto kg = kappa_gram(p, b.Ukappa, 0.1);
  CHECK(kg.min_eig >= 0.9);
  REQUIRE(kg.eigenvalues.size() == 2);
  for (int j = 0; j < 2; ++j)
    CHECK(kg.eigenvalues[j] == doctest::Approx(s.small_eigenvalues[j].real()).epsilon(1e-8).scale(1e-12));
  // mode projections sum to the cluster projection
  VectorXd u = linalg::random_start<double>(b.size(), 5);
  VectorXd sum = mode_projection(p, kg, 0, u) + mode_projection(p, kg, 1, u);
  CHECK((sum - p.Pi0 * u).norm() <= 1e-10 * u.norm());
  for (double nrm : kg.mode_projector_norms) CHECK(nrm >= 1.0 - 1e-10);
  CHECK(kg.eigvec_condition >= 1.0);
}

TEST_CASE("small eigenvalue follows the barrier law") {
  std::vector<double> inv_h, logmu;
  for (double h : {0.2, 0.15, 0.12, 0.1}) {
    auto s = small_eigenvalues(bundle_at(double_well(), h), 0.25, {}, false);
    REQUIRE(s.small_eigenvalues.size() >= 2);
    inv_h.push_back(1.0 / h);
    logmu.push_back(std::log(s.small_eigenvalues[1].real()));
  }
  auto f = fit_line(inv_h, logmu);
  CHECK(f.r_squared >= 0.99);
  CHECK(f.slope < 0.0);
}

TEST_CASE("cluster separation failure carries the spectrum") {
  auto b = bundle_at(double_well(), 0.1, 40, 6);
  SpectralOptions strict;
  strict.separation_threshold = 1e6;
  try {
    small_eigenvalues(b, 0.25, strict);
    FAIL("expected a separation failure");
  } catch (const ClusterSeparationError& e) {
    CHECK(e.code() == ErrorCode::ClusterSeparation);
    CHECK(e.spectrum().small_eigenvalues.size() == 2);
    CHECK(e.spectrum().gap_ratio < 1e6);
  }
}

TEST_CASE("scaling bridge to the unit-scale operator") {
  for (double h : {0.2, 0.1}) {
    Interval d = default_domain(double_well(), h);
    GridSpec g;
    g.x_min = d.lo;
    g.x_max = d.hi;
    g.N = 50;
    g.K = 6;
    g.h = h;
    auto br = scaling_bridge(double_well(), g, 0.25);
    CHECK(br.count_match);
    CHECK(br.scaled.size() == 2);
    CHECK(br.max_relative <= 1e-8);
    CHECK(br.kernel_abs <= 1e-12 * h);
  }
}
