#include "semigroup.hpp"

#include "fit.hpp"
#include "linalg/krylov.hpp"

#include <algorithm>
#include <cmath>

namespace bgk {

namespace {

double one_norm(const SpMat& P) {
  VectorXd cols = VectorXd::Zero(P.cols());
  for (int k = 0; k < P.outerSize(); ++k)
    for (SpMat::InnerIterator it(P, k); it; ++it) cols[it.col()] += std::abs(it.value());
  return cols.maxCoeff();
}

int well_of(double x, const CriticalPointCatalog& catalog) {
  int n = 0;
  for (const auto& m : catalog.maxima)
    if (m.location < x) ++n;
  return n;
}

}  // namespace

VectorXd propagate(const SpMat& P, const VectorXd& u0, double t, const PropagateOptions& opts) {
  auto apply = [&](const VectorXd& v) -> VectorXd { return -(P * v); };
  return linalg::expmv(apply, one_norm(P), t, u0, opts.tol, opts.krylov_dim);
}

std::vector<VectorXd> propagate_series(const SpMat& P, const VectorXd& u0, const std::vector<double>& times,
                                       const PropagateOptions& opts) {
  auto apply = [&](const VectorXd& v) -> VectorXd { return -(P * v); };
  const double anorm = one_norm(P);
  std::vector<VectorXd> out;
  out.reserve(times.size());
  VectorXd w = u0;
  double t_prev = 0.0;
  for (double t : times) {
    if (t < t_prev) fail(ErrorCode::Argument, "time grid must be nondecreasing and nonnegative");
    w = linalg::expmv(apply, anorm, t - t_prev, w, opts.tol, opts.krylov_dim);
    out.push_back(w);
    t_prev = t;
  }
  return out;
}

std::vector<double> decay_times(double rate, int n, double span) {
  if (!(rate > 0.0) || n < 2) fail(ErrorCode::Argument, "decay grid needs a positive rate and two points");
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = span / rate * i / (n - 1);
  return t;
}

std::vector<double> log_times(double t_min, double t_max, int per_decade) {
  if (!(t_min > 0.0) || !(t_max > t_min) || per_decade < 1) fail(ErrorCode::Argument, "bad log time grid");
  const int n = static_cast<int>(std::ceil(std::log10(t_max / t_min) * per_decade));
  std::vector<double> t;
  for (int i = 0; i <= n; ++i) t.push_back(t_min * std::pow(10.0, static_cast<double>(i) / per_decade));
  return t;
}

std::size_t tail_start(std::size_t n) { return n / 5; }

DecayFit decay_experiment(const OperatorBundle& b, const SmallSpectrum& s, const ProjectorData& p,
                          const KappaGram& kg, const VectorXd& u0, const std::vector<double>& times,
                          const PropagateOptions& opts, const std::vector<int>* basins, int n_wells) {
  if (times.size() < 5) fail(ErrorCode::Argument, "decay experiment needs at least five times");
  DecayFit f;
  f.times = times;
  f.predicted_rate = s.outside_min_re;
  f.mode_eigenvalues = kg.eigenvalues;
  const double unorm = u0.norm();
  VectorXd pu = p.Pi0 * u0;
  VectorXd r0 = u0 - pu;
  auto full = propagate_series(b.P, u0, times, opts);
  auto rem = propagate_series(b.P, r0, times, opts);
  auto cl = propagate_series(b.P, pu, times, opts);

  const int n0 = static_cast<int>(kg.eigenvalues.size());
  std::vector<VectorXd> modes;
  for (int j = 0; j < n0; ++j) modes.push_back(mode_projection(p, kg, j, u0));
  f.mode_projections.assign(n0, {});

  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    VectorXd sum = VectorXd::Zero(u0.size());
    for (int j = 0; j < n0; ++j) {
      VectorXd term = std::exp(-t * kg.eigenvalues[j]) * modes[j];
      f.mode_projections[j].push_back(term.norm());
      sum += term;
    }
    f.remainder_norms.push_back(rem[i].norm());
    if (basins) f.masses.push_back(well_masses(full[i], b.N(), *basins, n_wells));
    f.decomposition_residuals.push_back((full[i] - sum).norm());
    f.consistency_residuals.push_back((full[i] - sum - rem[i]).norm());
    f.contraction = std::max(f.contraction, full[i].norm() / unorm);
    f.commutation = std::max(f.commutation, (p.Pi0 * full[i] - cl[i]).norm() / unorm);
  }

  std::vector<double> tx, ly;
  const std::size_t i0 = tail_start(times.size());
  for (std::size_t i = i0; i < times.size(); ++i) {
    if (!(f.remainder_norms[i] > 0.0)) break;
    tx.push_back(times[i]);
    ly.push_back(std::log(f.remainder_norms[i]));
    if (i > i0 && f.remainder_norms[i] > f.remainder_norms[i - 1] * (1.0 + 1e-6)) f.transient_warning = true;
  }
  if (tx.size() < 2) fail(ErrorCode::Numerical, "remainder vanished before the fit window");
  auto fit = fit_line(tx, ly);
  f.fitted_rate = -fit.slope;
  f.r_squared = fit.r_squared;
  for (std::size_t i = i0; i < times.size(); ++i)
    f.residual_constant = std::max(
        f.residual_constant, f.decomposition_residuals[i] / (std::exp(-f.fitted_rate * times[i]) * unorm));
  return f;
}

double steady_state_drift(const OperatorBundle& b, double t_max, int samples) {
  VectorXd M = build_maxwellian(b.potential, b.grid);
  std::vector<double> t(samples);
  for (int i = 0; i < samples; ++i) t[i] = t_max * i / (samples - 1);
  double drift = 0.0;
  for (const auto& w : propagate_series(b.P, M, t)) drift = std::max(drift, (w - M).norm());
  return drift;
}

std::vector<int> basin_labels(const VectorXd& x, const CriticalPointCatalog& catalog) {
  std::vector<int> labels(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) labels[i] = well_of(x[i], catalog);
  return labels;
}

std::vector<double> well_masses(const VectorXd& u, int N, const std::vector<int>& labels, int n0) {
  std::vector<double> m(n0, 0.0);
  for (int i = 0; i < N; ++i) m[labels[i]] += u[i] * u[i];
  double total = 0.0;
  for (double v : m) total += v;
  if (total > 0.0)
    for (double& v : m) v /= total;
  return m;
}

MetastableReport metastable_experiment(const OperatorBundle& b, const CriticalPointCatalog& catalog,
                                       const QuasimodeFamily& q, const SmallSpectrum& s,
                                       const ProjectorData& p, const KappaGram& kg, int start_well,
                                       const MetastableOptions& opts, const PropagateOptions& popts) {
  const int n0 = catalog.n0;
  if (n0 < 2) fail(ErrorCode::Argument, "metastability needs at least two minima");
  if (static_cast<int>(kg.eigenvalues.size()) != n0 || q.n0() != n0)
    fail(ErrorCode::Argument, "cluster dimension does not match the number of minima");
  MetastableReport r;
  if (start_well < 0) {
    start_well = 0;
    for (int j = 1; j < n0; ++j)
      if (catalog.minima[j].value > catalog.minima[start_well].value) start_well = j;
  }
  if (start_well >= n0) fail(ErrorCode::Argument, "start well out of range");
  r.start_well = well_of(catalog.minima[start_well].location, catalog);
  r.mu2 = std::abs(s.small_eigenvalues.at(1));
  r.t_eq_bound = 1.0 / (10.0 * r.mu2);

  VectorXd u0 = q.vectors.col(start_well);
  auto labels = basin_labels(b.x, catalog);
  r.limit_masses = well_masses(mode_projection(p, kg, 0, u0), b.N(), labels, n0);
  r.times = log_times(opts.t_min, opts.late_factor / r.mu2, opts.per_decade);
  std::vector<VectorXd> modes;
  for (int j = 0; j < n0; ++j) modes.push_back(mode_projection(p, kg, j, u0));
  auto full = propagate_series(b.P, u0, r.times, popts);
  auto rem = propagate_series(b.P, u0 - p.Pi0 * u0, r.times, popts);
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    r.masses.push_back(well_masses(full[i], b.N(), labels, n0));
    VectorXd sum = VectorXd::Zero(u0.size());
    for (int j = 0; j < n0; ++j) sum += std::exp(-r.times[i] * kg.eigenvalues[j]) * modes[j];
    r.remainder_norms.push_back(rem[i].norm());
    r.decomposition_residuals.push_back((full[i] - sum).norm());
  }

  const std::size_t n = r.times.size();
  auto close = [&](std::size_t i) {
    for (int j = 0; j < n0; ++j)
      if (std::abs(r.masses[i][j] - r.limit_masses[j]) > opts.mass_tolerance) return false;
    return true;
  };
  std::size_t eq = n;
  for (std::size_t i = n; i-- > 0;) {
    if (!close(i)) break;
    eq = i;
  }
  r.equilibrated = eq < n;
  r.t_eq = r.equilibrated ? r.times[eq] : r.times.back();

  // first decade-long window, ending before equilibration, over which the masses move by < 1%
  for (std::size_t i = 0; i < n && !r.plateau_found; ++i) {
    std::size_t e = i;
    while (e < n && r.times[e] < 10.0 * r.times[i]) ++e;
    if (e >= n || e >= eq) break;
    double ref = *std::max_element(r.masses[i].begin(), r.masses[i].end());
    double change = 0.0;
    for (std::size_t k = i; k <= e; ++k)
      for (int j = 0; j < n0; ++j) change = std::max(change, std::abs(r.masses[k][j] - r.masses[i][j]));
    if (change < opts.plateau_tolerance * ref) {
      r.plateau_found = true;
      r.plateau_start = r.times[i];
      r.plateau_end = r.times[e];
    }
  }
  return r;
}

}  // namespace bgk
