#include "doctest.h"

#include "hypocoercivity.hpp"
#include "linalg/krylov.hpp"
#include "witten.hpp"

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

struct Setup {
  OperatorBundle b;
  CriticalPointCatalog cat;
  QuasimodeFamily q;
  double tau_hat;
};

Setup setup(const PotentialSpec& spec, double h, int N = 60, int K = 8) {
  Setup s{bundle_at(spec, h, N, K), find_critical_points(spec, default_search_box(spec)), {}, 0.0};
  s.q = build_quasimodes(s.cat, s.b, {});
  s.tau_hat = witten_report(s.b, s.cat).tau_hat;
  return s;
}

}  // namespace

TEST_CASE("epsilon selection") {
  CHECK(choose_epsilon(1.0, 1.0, 1.0) == doctest::Approx(1.0 / 16.0));
  CHECK(choose_epsilon(10.0, 1.0, 1.0) <= 1.0 / 20.0);
  CHECK(choose_epsilon(0.1, 0.1, 1.0) == doctest::Approx(1.0 / 8.0));
  CHECK_THROWS_AS(choose_epsilon(0.0, 1.0, 1.0), Error);
}

TEST_CASE("auxiliary operators vanish on velocity mode zero") {
  auto b = bundle_at(double_well(), 0.1, 40, 6);
  auto L = build_auxiliary(b);
  auto Aop = build_A_operator(b, L.matrix);
  VectorXd f = linalg::random_start<double>(b.N(), 9);
  VectorXd u = lift(f, b.K(), 0);
  CHECK((L.matrix * u).norm() == 0.0);
  CHECK((Aop.matrix * u).norm() <= 1e-13);
  CHECK(L.norm <= auxiliary_norm_bound(b));
  CHECK(L.norm > 0.0);
}

TEST_CASE("auxiliary norms are uniform in h") {
  for (auto spec : {harmonic(), double_well()}) {
    std::vector<double> nl, na;
    for (double h : {0.2, 0.1, 0.05}) {
      auto b = bundle_at(spec, h, 50, 8);
      auto L = build_auxiliary(b);
      nl.push_back(L.norm);
      na.push_back(build_A_operator(b, L.matrix).norm);
    }
    CHECK(*std::max_element(nl.begin(), nl.end()) <= 2.0 * *std::min_element(nl.begin(), nl.end()));
    CHECK(*std::max_element(na.begin(), na.end()) <= 2.0 * *std::min_element(na.begin(), na.end()));
  }
}

TEST_CASE("commutator identity holds at second order") {
  double r[3];
  int Ns[3] = {100, 200, 400};
  for (int i = 0; i < 3; ++i) r[i] = commutator_residual(bundle_at(double_well(), 0.1, Ns[i], 4));
  for (int i = 0; i < 2; ++i) {
    double ratio = r[i] / r[i + 1];
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
  }
}

TEST_CASE("unmodified form degenerates") {
  auto s = setup(harmonic(), 0.1, 40, 6);
  auto L = build_auxiliary(s.b);
  auto m = modified_form_minimum(s.b, L.matrix, 0.0, s.q.vectors);
  CHECK(std::abs(m.value) <= 1e-10);
}

TEST_CASE("harmonic certificate is uniform in h") {
  std::vector<double> ratios;
  for (double h : {0.2, 0.1, 0.05}) {
    auto s = setup(harmonic(), h);
    auto c = certificate(s.b, s.q, s.tau_hat);
    CHECK(c.kappa_min > 0.0);
    CHECK(c.epsilon <= 0.125);
    CHECK(c.epsilon * c.norm_L <= 0.5);
    CHECK(c.gap_lemma_min >= s.tau_hat / 4.0 - 0.05);
    CHECK(c.gap_lemma_min <= 1.0 + 1e-12);
    // the proof's lower bound is not tight but should be of the right size
    double predicted = c.epsilon * c.tau_hat / 8.0;
    CHECK(c.kappa_min / h <= 10.0 * predicted);
    CHECK(c.kappa_min / h >= predicted / 10.0);
    ratios.push_back(c.kappa_min / h);
  }
  CHECK(*std::max_element(ratios.begin(), ratios.end()) <= 2.0 * *std::min_element(ratios.begin(), ratios.end()));
}

TEST_CASE("double well certificate needs both quasimodes") {
  auto s = setup(double_well(), 0.1);
  auto c = certificate(s.b, s.q, s.tau_hat);
  CHECK(c.kappa_min > 0.0);
  auto L = build_auxiliary(s.b);
  MatrixXd one = s.q.vectors.leftCols(1);
  auto m = modified_form_minimum(s.b, L.matrix, c.epsilon, one);
  CHECK(m.value < 0.1 * c.kappa_min);
}

TEST_CASE("gap form") {
  auto s = setup(harmonic(), 0.1);
  auto g = gap_form_minimum(s.b, s.q.position);
  CHECK(g.value >= s.tau_hat / 4.0);
  CHECK(g.value <= 1.0);
  // without removing the kernel direction the minimum collapses
  MatrixXd none = MatrixXd::Zero(s.b.N(), 0);
  auto g0 = gap_form_minimum(s.b, none);
  CHECK(g0.value <= 1e-3);
}
