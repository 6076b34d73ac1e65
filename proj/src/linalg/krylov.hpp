#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>

namespace bgk::linalg {

struct LanczosResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> random_start(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      v[i] = nd(rng);
    } else {
      double re = nd(rng);
      double im = nd(rng);
      v[i] = Scalar(re, im);
    }
  }
  return v / v.norm();
}

// Largest eigenvalue of a Hermitian positive semidefinite operator by Lanczos
// with full reorthogonalization.
template <class Scalar, class Apply>
LanczosResult lanczos_largest(Apply&& apply, Eigen::Index n, std::uint64_t seed, double tol = 1e-10,
                              int max_iter = 200) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int m_max = static_cast<int>(std::min<Eigen::Index>(max_iter, n));
  Mat V(n, m_max + 1);
  V.col(0) = random_start<Scalar>(n, seed);
  std::vector<double> alpha, beta;
  LanczosResult out;
  double previous = 0.0;
  for (int j = 0; j < m_max; ++j) {
    Vec w = apply(Vec(V.col(j)));
    double a = std::real(V.col(j).dot(w));
    alpha.push_back(a);
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass) {
      Vec c = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * c;
    }
    double b = w.norm();

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(j + 1, j + 1);
    for (int i = 0; i <= j; ++i) {
      T(i, i) = alpha[i];
      if (i < j) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    double theta = es.eigenvalues()[j];
    double resid = b * std::abs(es.eigenvectors()(j, j));
    out.value = theta;
    out.iterations = j + 1;
    if (resid <= tol * std::abs(theta) || b <= 1e-300 ||
        (j > 2 && std::abs(theta - previous) <= 1e-3 * tol * std::abs(theta))) {
      out.converged = true;
      return out;
    }
    previous = theta;
    beta.push_back(b);
    V.col(j + 1) = w / b;
  }
  out.converged = m_max == n;
  return out;
}

// Operator norm of a linear map given its action and adjoint action.
template <class Scalar, class Apply, class ApplyAdjoint>
LanczosResult operator_norm(Apply&& apply, ApplyAdjoint&& apply_adjoint, Eigen::Index n,
                            std::uint64_t seed, double tol = 1e-10, int max_iter = 200) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  auto normal = [&](const Vec& v) -> Vec { return apply_adjoint(apply(v)); };
  LanczosResult r = lanczos_largest<Scalar>(normal, n, seed, tol, max_iter);
  r.value = std::sqrt(std::max(r.value, 0.0));
  return r;
}

struct ExpmvStats {
  int steps = 0;
  int rejections = 0;
  int matvecs = 0;
};

// w = exp(t A) v by Krylov projection with local error control (Sidje's scheme),
// tol relative to |v|.
Eigen::VectorXd expmv(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                      double anorm, double t, const Eigen::VectorXd& v, double tol = 1e-8,
                      int m = 30, ExpmvStats* stats = nullptr);

}  // namespace bgk::linalg
