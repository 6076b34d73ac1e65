#pragma once

#include "operators.hpp"

#include <vector>

namespace bgk {

struct WittenReport {
  double h = 0.0;
  int n0 = 0;
  std::vector<double> eigenvalues;
  double tau_raw = 0.0;
  double tau_hat = 0.0;
  std::vector<double> quasimode_residuals;
  // eigenvalues strictly below tau_hat * h / 2
  int small_count = 0;
};

SpMat assemble_witten(const SpMat& A);

// -h^2 Dc^2 + V'^2/4 - h V''/2 on the same grid, for comparison with A^T A.
SpMat assemble_witten_direct(const PotentialSpec& spec, const GridSpec& grid);

WittenReport witten_small_spectrum(const SpMat& W, int n0, double h);

std::vector<double> quasimode_residual(const SpMat& W, const MatrixXd& position_quasimodes);
std::vector<double> quasimode_residual(const SpMat& W, const CriticalPointCatalog& catalog,
                                       const PotentialSpec& spec, const GridSpec& grid,
                                       const std::vector<Cutoff>& cutoffs);

WittenReport witten_report(const OperatorBundle& bundle, const CriticalPointCatalog& catalog,
                           const CutoffParams& cutoffs = {});

}  // namespace bgk
