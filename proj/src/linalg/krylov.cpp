#include "linalg/krylov.hpp"

#include "error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bgk::linalg {

namespace {

double round_two_digits(double x) {
  if (x <= 0.0) return x;
  double s = std::pow(10.0, std::floor(std::log10(x)) - 1.0);
  return std::ceil(x / s) * s;
}

}  // namespace

Eigen::VectorXd expmv(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                      double anorm, double t, const Eigen::VectorXd& v, double tol, int m,
                      ExpmvStats* stats) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  if (t < 0.0) fail(ErrorCode::Argument, "propagation time must be nonnegative");
  const Eigen::Index n = v.size();
  VectorXd w = v;
  double beta = w.norm();
  if (t == 0.0 || beta == 0.0) return w;
  m = static_cast<int>(std::min<Eigen::Index>(m, n));
  anorm = std::max(anorm, 1e-300);

  const double btol = tol * beta;
  // local error budget per unit time, so the accumulated error stays near btol
  const double rate_tol = btol / t;
  const double gamma = 0.9, delta = 1.2;
  const int max_reject = 20;
  const double mp1 = m + 1.0;
  const double fact = std::pow(mp1 / std::numbers::e, mp1) * std::sqrt(2.0 * std::numbers::pi * mp1);
  double t_new = (1.0 / anorm) * std::pow((fact * btol) / (4.0 * beta * anorm), 1.0 / m);
  t_new = round_two_digits(t_new);

  ExpmvStats local;
  double t_now = 0.0;
  MatrixXd V(n, m + 1);
  while (t_now < t) {
    double t_step = std::min(t - t_now, t_new);
    MatrixXd H = MatrixXd::Zero(m + 2, m + 2);
    V.col(0) = w / beta;
    int mb = m, k1 = 2;
    double avnorm = 0.0;
    for (int j = 0; j < m; ++j) {
      VectorXd p = apply(V.col(j));
      ++local.matvecs;
      for (int i = 0; i <= j; ++i) {
        H(i, j) = V.col(i).dot(p);
        p -= H(i, j) * V.col(i);
      }
      double s = p.norm();
      if (s < btol) {  // happy breakdown: the Krylov space is invariant
        k1 = 0;
        mb = j + 1;
        t_step = t - t_now;
        break;
      }
      H(j + 1, j) = s;
      V.col(j + 1) = p / s;
    }
    if (k1 != 0) {
      H(m + 1, m) = 1.0;
      avnorm = apply(V.col(m)).norm();
      ++local.matvecs;
    }

    double err_loc = 0.0, xm = 1.0 / m;
    MatrixXd F;
    int rejects = 0;
    for (;;) {
      const int mx = mb + k1;
      F = (t_step * H.topLeftCorner(mx, mx)).exp();
      if (k1 == 0) {
        err_loc = btol;
        break;
      }
      double phi1 = std::abs(beta * F(m, 0));
      double phi2 = std::abs(beta * F(m + 1, 0) * avnorm);
      if (phi1 > 10.0 * phi2) { err_loc = phi2; xm = 1.0 / m; }
      else if (phi1 > phi2) { err_loc = (phi1 * phi2) / (phi1 - phi2); xm = 1.0 / m; }
      else { err_loc = phi1; xm = 1.0 / (m - 1); }
      if (err_loc <= delta * t_step * rate_tol) break;
      t_step = round_two_digits(gamma * t_step * std::pow(t_step * rate_tol / err_loc, xm));
      ++rejects;
      ++local.rejections;
      if (rejects > max_reject || !(t_step > 0.0) || t_now + t_step == t_now) {
        std::ostringstream os;
        os << "exponential action: step size collapsed at t = " << t_now << " (last step " << t_step
           << ", local error " << err_loc << ")";
        fail(ErrorCode::Numerical, os.str());
      }
    }
    const int mx = mb + std::max(0, k1 - 1);
    w = V.leftCols(mx) * (beta * F.col(0).head(mx));
    beta = w.norm();
    t_now += t_step;
    ++local.steps;
    t_new = round_two_digits(gamma * t_step * std::pow(t_step * rate_tol / std::max(err_loc, 1e-300), xm));
    if (beta == 0.0) break;
  }
  if (stats) *stats = local;
  return w;
}

}  // namespace bgk::linalg
