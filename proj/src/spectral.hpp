#pragma once

#include "error.hpp"
#include "linalg/lapack.hpp"
#include "operators.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace bgk {

using cplx = std::complex<double>;

struct SpectralOptions {
  // Unknown counts up to which dense methods are used.
  Eigen::Index dense_eigen_limit = 6000;
  Eigen::Index dense_svd_limit = 400;
  double separation_threshold = 10.0;
  double sigma_rel_tol = 1e-6;
  int max_iterations = 200;
  std::uint64_t seed = 20240521;
  int contour_nodes = 64;
};

struct SmallSpectrum {
  double h = 0.0;
  double delta_hat = 0.0;
  std::vector<cplx> small_eigenvalues;  // sorted by modulus
  std::vector<cplx> outside_eigenvalues;  // nearest outside eigenvalues (all, on the dense path)
  double inside_max_abs = 0.0;
  double outside_min_re = 0.0;
  double gap_ratio = 0.0;
  bool dense = true;
  // dense path only: ordered real Schur form with the cluster leading
  std::optional<linalg::OrderedSchur> schur;
};

class ClusterSeparationError : public Error {
public:
  ClusterSeparationError(const std::string& what, SmallSpectrum s)
      : Error(ErrorCode::ClusterSeparation, what), spectrum_(std::move(s)) {}
  const SmallSpectrum& spectrum() const { return spectrum_; }

private:
  SmallSpectrum spectrum_;
};

// All eigenvalues of P in |z| < delta_hat h; throws ClusterSeparationError
// when the gap ratio falls below the separation threshold, unless validate is false.
SmallSpectrum small_eigenvalues(const OperatorBundle& bundle, double delta_hat,
                                const SpectralOptions& opts = {}, bool validate = true);

double resolvent_norm(const OperatorBundle& bundle, cplx z, const SpectralOptions& opts = {});

struct ResolventSample {
  cplx z;
  double sigma_min = 0.0;
  double norm = 0.0;
  bool on_line = false;
};

struct ResolventSweep {
  double h = 0.0;
  double r_inner = 0.0;
  double r_outer = 0.0;
  std::vector<ResolventSample> samples;
  double summary = 0.0;       // max of h * norm on the annulus
  double line_summary = 0.0;  // max of h * norm on the imaginary-axis samples
};

ResolventSweep resolvent_sweep(const OperatorBundle& bundle, double delta1, double delta_hat,
                               int n_angles = 32, int n_radii = 4, int n_line = 8,
                               const SpectralOptions& opts = {});

struct ProjectorData {
  MatrixXd Pi0;
  MatrixXd Q1;   // orthonormal basis of the range
  MatrixXd T11;  // P restricted to the range, in the Q1 basis
  MatrixXd R;    // Sylvester coupling: Pi0 = Q1 (Q1^T + R Q2^T)
  MatrixXd Q2;
  double norm = 0.0;
  int rank = 0;
  double idempotency = 0.0;  // |Pi0^2 - Pi0|_2

  // Coordinates c with Pi0 u = Q1 c.
  VectorXd coordinates(const VectorXd& u) const { return Q1.transpose() * u + R * (Q2.transpose() * u); }
};

ProjectorData spectral_projector(const SmallSpectrum& spectrum);

// Trapezoidal rule with M nodes for (1/2 pi i) of the resolvent on |z| = radius.
MatrixXd contour_projector(const OperatorBundle& bundle, double radius, int nodes = 64);

double operator_norm_dense(const MatrixXd& M, std::uint64_t seed = 1);

double pt_check(const SpMat& P, const SpMat& Ukappa);

struct KappaGram {
  MatrixXd gram;
  double min_eig = 0.0;
  std::vector<double> eigenvalues;  // real eigenvalues of P on the cluster space, ascending
  MatrixXd X;                       // kappa-orthonormal eigenvectors in Q1 coordinates
  double eigvec_condition = 0.0;
  std::vector<double> mode_projector_norms;
};

// Throws KappaDegenerate if the symmetrized gram is not positive definite.
KappaGram kappa_gram(const ProjectorData& projector, const SpMat& Ukappa, double h);

// Per-eigenvalue projector Pi_j applied to u.
VectorXd mode_projection(const ProjectorData& projector, const KappaGram& kg, int j, const VectorXd& u);

struct ScalingBridge {
  double h = 0.0;
  std::vector<cplx> scaled;      // eigenvalues of P_h in the disk
  std::vector<cplx> unit_scale;  // h times those of the unit-scale operator with V_h on y = x / sqrt(h)
  bool count_match = false;
  double max_relative = 0.0;  // over eigenvalues above floor * h
  double kernel_abs = 0.0;    // largest |difference| among those below it
};

// Kernel-level eigenvalues below floor * h are compared absolutely.
ScalingBridge scaling_bridge(const PotentialSpec& spec, const GridSpec& grid, double delta_hat,
                             double floor = 1e-12, const SpectralOptions& opts = {});

}  // namespace bgk
