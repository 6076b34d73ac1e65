#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bgk {

enum class PotentialKind { Harmonic, DoubleWell, TiltedDoubleWell, Polynomial };

const char* kind_name(PotentialKind kind);
PotentialKind kind_from_name(const std::string& name);

// Polynomial potential in one space dimension, coefficients in ascending degree.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::Polynomial;
  std::vector<double> coefficients;
  int dimension = 1;
  double tilt = 0.0;
};

PotentialSpec harmonic();
PotentialSpec double_well();
PotentialSpec tilted_double_well(double tilt = 0.2);
PotentialSpec polynomial(std::vector<double> coefficients);
PotentialSpec preset(const std::string& name, double tilt = 0.2);

void validate(const PotentialSpec& spec);
int degree(const PotentialSpec& spec);

double evaluate(const PotentialSpec& spec, double x, int order);
Eigen::VectorXd evaluate(const PotentialSpec& spec, const Eigen::VectorXd& x, int order);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct CriticalPoint {
  double location = 0.0;
  double value = 0.0;
  double second_derivative = 0.0;
};

struct CriticalPointCatalog {
  std::vector<CriticalPoint> minima;
  std::vector<CriticalPoint> maxima;
  int n0 = 0;
  // barriers(i, j): max of V between minima i and j, minus V at minimum i.
  Eigen::MatrixXd barriers;

  // All critical points sorted along the axis.
  std::vector<CriticalPoint> sorted() const;
  const CriticalPoint& global_minimum() const;
};

// Box enclosing every root of V' (Cauchy bound on the derivative polynomial).
Interval default_search_box(const PotentialSpec& spec);

CriticalPointCatalog find_critical_points(const PotentialSpec& spec, Interval box,
                                          int seed_count = 4001);
CriticalPointCatalog find_critical_points(const PotentialSpec& spec);

struct HypothesisThresholds {
  double min_gradient_outside = 1e-3;
  double max_derivative_inside = 1e12;
};

struct HypothesisDiagnostics {
  Interval box;
  double min_gradient_outside = 0.0;
  double max_second_derivative = 0.0;
  double max_third_derivative = 0.0;
  std::vector<double> h_values;
  std::vector<double> boltzmann_integrals;
  bool gradient_ok = false;
  bool derivatives_ok = false;
  bool integrable_ok = false;
  bool pass() const { return gradient_ok && derivatives_ok && integrable_ok; }
};

HypothesisDiagnostics check_hypothesis(const PotentialSpec& spec, Interval box, int samples,
                                       const std::vector<double>& h_values,
                                       const HypothesisThresholds& thresholds = {});

// V_h(x) = V(sqrt(h) x) / h as an exact coefficient map.
PotentialSpec rescale_potential(const PotentialSpec& spec, double h);

}  // namespace bgk
