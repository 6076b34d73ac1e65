#pragma once

#include "spectral.hpp"

#include <vector>

namespace bgk {

struct PropagateOptions {
  double tol = 1e-8;
  int krylov_dim = 30;
};

// e^{-tP} u0.
VectorXd propagate(const SpMat& P, const VectorXd& u0, double t, const PropagateOptions& opts = {});

// e^{-t_i P} u0 for a nondecreasing time grid, reusing each state as the next start.
std::vector<VectorXd> propagate_series(const SpMat& P, const VectorXd& u0, const std::vector<double>& times,
                                       const PropagateOptions& opts = {});

// Uniform grid on [0, span / rate] with n points.
std::vector<double> decay_times(double rate, int n = 60, double span = 15.0);

// Log grid from t_min to t_max with the given density.
std::vector<double> log_times(double t_min, double t_max, int per_decade = 20);

struct DecayFit {
  std::vector<double> times;
  std::vector<double> remainder_norms;
  double fitted_rate = 0.0;
  double r_squared = 0.0;
  double predicted_rate = 0.0;  // smallest |Re| outside the cluster
  std::vector<double> mode_eigenvalues;
  std::vector<std::vector<double>> mode_projections;  // |e^{-t mu_j} Pi_j u0| per j, per t
  std::vector<double> decomposition_residuals;        // |e^{-tP}u0 - sum_j e^{-t mu_j} Pi_j u0|
  std::vector<double> consistency_residuals;          // the same minus the propagated remainder
  double residual_constant = 0.0;  // max on the tail of residual / (e^{-rate t} |u0|)
  double contraction = 0.0;        // max |e^{-tP}u0| / |u0|
  double commutation = 0.0;        // max |Pi0 e^{-tP}u0 - e^{-tP} Pi0 u0| / |u0|
  bool transient_warning = false;  // remainder not monotone on the tail
  std::vector<std::vector<double>> masses;  // well masses of e^{-tP}u0, when basins are given
};

// Index of the first sample in the fit window (the first 20% are dropped).
std::size_t tail_start(std::size_t n);

DecayFit decay_experiment(const OperatorBundle& bundle, const SmallSpectrum& spectrum,
                          const ProjectorData& projector, const KappaGram& kappa, const VectorXd& u0,
                          const std::vector<double>& times, const PropagateOptions& opts = {},
                          const std::vector<int>* basins = nullptr, int n_wells = 0);

// Largest |e^{-tP}M - M| over times in [0, t_max], M the discrete Maxwellian.
double steady_state_drift(const OperatorBundle& bundle, double t_max, int samples = 11);

// Basin index per grid point: basins are separated by the maxima of V.
std::vector<int> basin_labels(const VectorXd& x, const CriticalPointCatalog& catalog);

// Squared mode-0 norm per basin, normalized to sum 1.
std::vector<double> well_masses(const VectorXd& u, int N, const std::vector<int>& labels, int n0);

struct MetastableReport {
  int start_well = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> masses;  // per t, per well
  std::vector<double> limit_masses;         // from the kernel mode projection of u0
  std::vector<double> remainder_norms;      // |e^{-tP}(I - Pi0)u0|
  std::vector<double> decomposition_residuals;
  double mu2 = 0.0;
  bool plateau_found = false;
  double plateau_start = 0.0;
  double plateau_end = 0.0;
  double t_eq = 0.0;
  bool equilibrated = false;
  double t_eq_bound = 0.0;  // 1 / (10 |mu_2|)
};

struct MetastableOptions {
  double plateau_tolerance = 0.01;
  double mass_tolerance = 0.05;
  double t_min = 1e-2;
  double late_factor = 50.0;  // propagate to late_factor / |mu_2|
  int per_decade = 20;
};

// Start well default: the shallowest minimum.
MetastableReport metastable_experiment(const OperatorBundle& bundle, const CriticalPointCatalog& catalog,
                                       const QuasimodeFamily& quasimodes, const SmallSpectrum& spectrum,
                                       const ProjectorData& projector, const KappaGram& kappa,
                                       int start_well = -1, const MetastableOptions& opts = {},
                                       const PropagateOptions& popts = {});

}  // namespace bgk
