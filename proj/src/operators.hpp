#pragma once

#include "potential.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <memory>
#include <string>
#include <vector>

namespace bgk {

using SpMat = Eigen::SparseMatrix<double>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  int N = 200;
  int K = 24;
  double h = 0.1;
  // Multiplier on the fourth-difference term that lifts the grid doubler.
  // 1 is the calibrated default, 0 gives the bare centered difference.
  double doubler_scale = 1.0;

  double dx() const { return (x_max - x_min) / (N - 1); }
  Eigen::Index size() const { return static_cast<Eigen::Index>(N) * K; }
};

void validate(const GridSpec& grid);
VectorXd grid_points(const GridSpec& grid);

// Interval where V - min V <= 2 h log(1/tol), i.e. e^{-(V - min V)/2h} >= tol.
Interval default_domain(const PotentialSpec& spec, double h, double tol = 1e-14);

// Position derivative pieces: the antisymmetric centered difference and the
// symmetric fourth difference scaled by 1/dx.
SpMat centered_difference(int N, double dx);
SpMat fourth_difference(int N, double dx);
double doubler_coefficient(const PotentialSpec& spec, const GridSpec& grid);

SpMat build_position_ladder(const PotentialSpec& spec, const GridSpec& grid);
SpMat build_velocity_ladder(int K, double h);
SpMat assemble_transport(const SpMat& A, const SpMat& B);
SpMat assemble_transport_direct(const SpMat& A, const SpMat& B);

struct BgkPair {
  SpMat P;
  SpMat Pi;
};
BgkPair assemble_bgk(const SpMat& X0, int K, double h);

// Cholesky factors of the velocity-diagonal blocks A^T A + h (k + 1) I of Lambda^2.
class Lambda2Solver {
public:
  Lambda2Solver(const SpMat& A, int K, double h);
  MatrixXd solve(const MatrixXd& rhs) const;
  VectorXd solve(const VectorXd& rhs) const;
  int N() const { return n_; }
  int K() const { return static_cast<int>(blocks_.size()); }

private:
  int n_;
  std::vector<Eigen::LLT<MatrixXd>> blocks_;
};

struct Lambda2Pair {
  SpMat Lambda2;
  std::shared_ptr<const Lambda2Solver> solver;
};
Lambda2Pair assemble_lambda2(const SpMat& A, const SpMat& B, double h);

SpMat velocity_reversal(int N, int K);

struct OperatorBundle {
  GridSpec grid;
  PotentialSpec potential;
  VectorXd x;
  VectorXd dV;
  VectorXd d2V;
  double doubler = 0.0;
  SpMat A;
  SpMat B;
  SpMat X0;
  SpMat Pi;
  SpMat P;
  SpMat Lambda2;
  SpMat Ukappa;
  std::shared_ptr<const Lambda2Solver> lambda2_solver;
  std::vector<std::string> warnings;

  int N() const { return grid.N; }
  int K() const { return grid.K; }
  double h() const { return grid.h; }
  Eigen::Index size() const { return grid.size(); }
};

OperatorBundle assemble(const PotentialSpec& spec, const GridSpec& grid);

// Embed a position vector into velocity mode k.
VectorXd lift(const VectorXd& position, int K, int mode = 0);

VectorXd build_maxwellian(const PotentialSpec& spec, const GridSpec& grid);

struct CutoffParams {
  double radius_factor = 0.5;
  double width_factor = 0.5;
  // Explicit inner radii per minimum; empty means derived from radius_factor.
  std::vector<double> radii;
};

struct Cutoff {
  double center = 0.0;
  double radius = 0.0;
  double width = 0.0;
  double operator()(double x) const;
  double derivative(double x) const;
};

std::vector<Cutoff> make_cutoffs(const CriticalPointCatalog& catalog, const CutoffParams& params);

// Discretized chi_j e^{-V/2h}, unit norm, one column per minimum.
MatrixXd position_quasimodes(const PotentialSpec& spec, const GridSpec& grid,
                             const CriticalPointCatalog& catalog, const std::vector<Cutoff>& cutoffs);

struct QuasimodeFamily {
  MatrixXd vectors;
  MatrixXd position;
  std::vector<Cutoff> cutoffs;
  std::vector<double> residual_norms;
  MatrixXd gram;
  int n0() const { return static_cast<int>(vectors.cols()); }
};

QuasimodeFamily build_quasimodes(const CriticalPointCatalog& catalog, const OperatorBundle& bundle,
                                 const CutoffParams& params = {});

// Grid-norm distance between the discrete residuals P g_j and the exact
// continuum residuals sampled on the grid; second order in dx.
std::vector<double> quasimode_consistency(const CriticalPointCatalog& catalog, const OperatorBundle& bundle,
                                          const QuasimodeFamily& q);

}  // namespace bgk
