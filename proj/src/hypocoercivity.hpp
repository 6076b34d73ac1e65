#pragma once

#include "error.hpp"
#include "operators.hpp"

#include <vector>

namespace bgk {

struct AuxiliaryOperator {
  MatrixXd matrix;
  double norm = 0.0;
};

// L = Lambda^{-2} a* b.
AuxiliaryOperator build_auxiliary(const OperatorBundle& bundle);

// -(1/h) Lambda^{-2} [Lambda^2, X0] L - Lambda^{-2} b* Hess(V) b at the h-scale.
AuxiliaryOperator build_A_operator(const OperatorBundle& bundle, const MatrixXd& L);

// [Lambda^2, X0] + h (b*(H - I) a + a*(H - I) b), which vanishes in the continuum.
SpMat commutator_defect(const OperatorBundle& bundle);

// |defect * probe| / |probe| for the smooth probe m (x) e_1, m the discrete Maxwellian profile.
double commutator_residual(const OperatorBundle& bundle);

// Submultiplicative bound |Lambda^{-2}| |A| |B| for |L|.
double auxiliary_norm_bound(const OperatorBundle& bundle);

double choose_epsilon(double norm_L, double norm_A, double tau_hat);

struct HypoCertificate {
  double h = 0.0;
  double epsilon = 0.0;
  double norm_L = 0.0;
  double norm_A = 0.0;
  double tau_hat = 0.0;
  double kappa_min = 0.0;
  double implied_A = 0.0;
  double gap_lemma_min = 0.0;
  double commutator_residual = 0.0;
};

class CertificateError : public Error {
public:
  CertificateError(ErrorCode code, const std::string& what, VectorXd v)
      : Error(code, what), vector_(std::move(v)) {}
  const VectorXd& minimizer() const { return vector_; }

private:
  VectorXd vector_;
};

struct FormMinimum {
  double value = 0.0;
  VectorXd vector;  // minimizer in the full space
};

// Smallest eigenvalue of the symmetric part of (I + eps (L + L^T)) P on the
// flat orthogonal complement of the columns of G.
FormMinimum modified_form_minimum(const OperatorBundle& bundle, const MatrixXd& L, double epsilon,
                                  const MatrixXd& G);

// Smallest Rayleigh quotient of (W + h)^{-1} W on the complement of the
// position quasimodes, W = A^T A.
FormMinimum gap_form_minimum(const OperatorBundle& bundle, const MatrixXd& position_quasimodes);

struct CertificateOptions {
  double gap_tolerance = 0.05;
  bool validate = true;
};

// Throws CertificateError (CertificateFailure / GapFailure) when validate is set.
HypoCertificate certificate(const OperatorBundle& bundle, const QuasimodeFamily& quasimodes,
                            double tau_hat, const CertificateOptions& opts = {});

}  // namespace bgk
