#include "potential.hpp"

#include "error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bgk {

namespace {

constexpr double kRootTol = 1e-10;
constexpr double kMorseTol = 1e-8;

std::vector<double> derivative_coefficients(const std::vector<double>& c, int order) {
  std::vector<double> d = c;
  for (int o = 0; o < order; ++o) {
    if (d.size() <= 1) return {0.0};
    std::vector<double> next(d.size() - 1);
    for (std::size_t k = 1; k < d.size(); ++k) next[k - 1] = static_cast<double>(k) * d[k];
    d = std::move(next);
  }
  return d;
}

double horner(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// Safeguarded Newton inside a sign-changing bracket of V'.
double refine_root(const PotentialSpec& spec, double lo, double hi) {
  double flo = evaluate(spec, lo, 1);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double f = evaluate(spec, x, 1);
    if (f == 0.0) return x;
    if ((f < 0) == (flo < 0)) { lo = x; flo = f; } else { hi = x; }
    double df = evaluate(spec, x, 2);
    double newton = df != 0.0 ? x - f / df : lo - 1.0;
    x = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  // polish without the bracket: quadratic convergence from here
  for (int it = 0; it < 3; ++it) {
    double df = evaluate(spec, x, 2);
    if (df == 0.0) break;
    double next = x - evaluate(spec, x, 1) / df;
    if (std::abs(evaluate(spec, next, 1)) > std::abs(evaluate(spec, x, 1))) break;
    x = next;
  }
  return x;
}

// Golden-section minimization of |V'| on [lo, hi].
double minimize_gradient(const PotentialSpec& spec, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  auto f = [&](double x) { return std::abs(evaluate(spec, x, 1)); };
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (fc < fd) { b = d; d = c; fd = fc; c = b - g * (b - a); fc = f(c); }
    else { a = c; c = d; fc = fd; d = a + g * (b - a); fd = f(d); }
  }
  return 0.5 * (a + b);
}

}  // namespace

const char* kind_name(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Harmonic: return "harmonic";
    case PotentialKind::DoubleWell: return "double_well";
    case PotentialKind::TiltedDoubleWell: return "tilted_double_well";
    case PotentialKind::Polynomial: return "polynomial";
  }
  return "polynomial";
}

PotentialKind kind_from_name(const std::string& name) {
  if (name == "harmonic") return PotentialKind::Harmonic;
  if (name == "double_well") return PotentialKind::DoubleWell;
  if (name == "tilted_double_well") return PotentialKind::TiltedDoubleWell;
  if (name == "polynomial") return PotentialKind::Polynomial;
  fail(ErrorCode::Argument, "unknown potential kind '" + name + "'");
}

PotentialSpec harmonic() {
  return {PotentialKind::Harmonic, {0.0, 0.0, 0.5}, 1, 0.0};
}

PotentialSpec double_well() {
  return {PotentialKind::DoubleWell, {0.25, 0.0, -0.5, 0.0, 0.25}, 1, 0.0};
}

PotentialSpec tilted_double_well(double tilt) {
  return {PotentialKind::TiltedDoubleWell, {0.25, tilt, -0.5, 0.0, 0.25}, 1, tilt};
}

PotentialSpec polynomial(std::vector<double> coefficients) {
  PotentialSpec spec{PotentialKind::Polynomial, std::move(coefficients), 1, 0.0};
  validate(spec);
  return spec;
}

PotentialSpec preset(const std::string& name, double tilt) {
  switch (kind_from_name(name)) {
    case PotentialKind::Harmonic: return harmonic();
    case PotentialKind::DoubleWell: return double_well();
    case PotentialKind::TiltedDoubleWell: return tilted_double_well(tilt);
    case PotentialKind::Polynomial: break;
  }
  fail(ErrorCode::Argument, "'polynomial' is not a preset; give coefficients instead");
}

int degree(const PotentialSpec& spec) {
  int d = static_cast<int>(spec.coefficients.size()) - 1;
  while (d > 0 && spec.coefficients[d] == 0.0) --d;
  return d;
}

void validate(const PotentialSpec& spec) {
  if (spec.dimension != 1)
    fail(ErrorCode::Argument, "only one space dimension is implemented");
  if (spec.coefficients.empty())
    fail(ErrorCode::Argument, "potential has no coefficients");
  for (double c : spec.coefficients)
    if (!std::isfinite(c)) fail(ErrorCode::Argument, "non-finite potential coefficient");
  int d = degree(spec);
  if (d < 2 || d % 2 != 0)
    fail(ErrorCode::Argument, "potential degree must be even and at least 2");
  if (spec.coefficients[d] <= 0.0)
    fail(ErrorCode::Argument, "leading coefficient must be positive for confinement");
}

double evaluate(const PotentialSpec& spec, double x, int order) {
  if (order < 0 || order > 3)
    fail(ErrorCode::Argument, "derivative order must be 0..3, got " + std::to_string(order));
  return horner(derivative_coefficients(spec.coefficients, order), x);
}

Eigen::VectorXd evaluate(const PotentialSpec& spec, const Eigen::VectorXd& x, int order) {
  if (order < 0 || order > 3)
    fail(ErrorCode::Argument, "derivative order must be 0..3, got " + std::to_string(order));
  auto d = derivative_coefficients(spec.coefficients, order);
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = horner(d, x[i]);
  return out;
}

std::vector<CriticalPoint> CriticalPointCatalog::sorted() const {
  std::vector<CriticalPoint> all(minima);
  all.insert(all.end(), maxima.begin(), maxima.end());
  std::sort(all.begin(), all.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.location < b.location; });
  return all;
}

const CriticalPoint& CriticalPointCatalog::global_minimum() const {
  return *std::min_element(minima.begin(), minima.end(),
                           [](const CriticalPoint& a, const CriticalPoint& b) {
                             return a.value < b.value;
                           });
}

Interval default_search_box(const PotentialSpec& spec) {
  validate(spec);
  auto d = derivative_coefficients(spec.coefficients, 1);
  int n = static_cast<int>(d.size()) - 1;
  while (n > 0 && d[n] == 0.0) --n;
  double bound = 0.0;
  for (int k = 0; k < n; ++k) bound = std::max(bound, std::abs(d[k] / d[n]));
  double r = 1.0 + bound;
  // small margin so roots on the bound stay strictly inside
  return {-1.05 * r, 1.05 * r};
}

CriticalPointCatalog find_critical_points(const PotentialSpec& spec) {
  return find_critical_points(spec, default_search_box(spec));
}

CriticalPointCatalog find_critical_points(const PotentialSpec& spec, Interval box,
                                          int seed_count) {
  validate(spec);
  if (!(box.lo < box.hi)) fail(ErrorCode::Argument, "empty search box");
  if (seed_count < 3) fail(ErrorCode::Argument, "seed_count must be at least 3");

  std::vector<double> xs(seed_count), fs(seed_count);
  for (int i = 0; i < seed_count; ++i) {
    xs[i] = box.lo + box.width() * i / (seed_count - 1);
    fs[i] = evaluate(spec, xs[i], 1);
  }

  std::vector<double> roots;
  auto push = [&](double r) {
    for (double q : roots)
      if (std::abs(q - r) < 1e-9) return;
    roots.push_back(r);
  };
  for (int i = 0; i + 1 < seed_count; ++i) {
    if (fs[i] == 0.0) { push(xs[i]); continue; }
    if ((fs[i] < 0) != (fs[i + 1] < 0) && fs[i + 1] != 0.0) push(refine_root(spec, xs[i], xs[i + 1]));
  }
  if (fs.back() == 0.0) push(xs.back());

  // touching roots of V' have no sign change; look for local minima of |V'| reaching zero
  for (int i = 1; i + 1 < seed_count; ++i) {
    double a = std::abs(fs[i - 1]), b = std::abs(fs[i]), c = std::abs(fs[i + 1]);
    if (!(b <= a && b <= c)) continue;
    if ((fs[i - 1] < 0) != (fs[i + 1] < 0)) continue;
    double x = minimize_gradient(spec, xs[i - 1], xs[i + 1]);
    double curvature = std::abs(evaluate(spec, x, 2));
    if (std::abs(evaluate(spec, x, 1)) <= 1e-8 && curvature < kMorseTol)
      fail(ErrorCode::MorseViolation,
           "degenerate critical point near x = " + std::to_string(x) + " (|V''| < 1e-8)");
  }

  std::sort(roots.begin(), roots.end());
  CriticalPointCatalog cat;
  for (double r : roots) {
    CriticalPoint cp{r, evaluate(spec, r, 0), evaluate(spec, r, 2)};
    if (std::abs(cp.second_derivative) < kMorseTol)
      fail(ErrorCode::MorseViolation,
           "degenerate critical point at x = " + std::to_string(r) + " (|V''| < 1e-8)");
    if (std::abs(evaluate(spec, r, 1)) > kRootTol * std::max(1.0, std::abs(cp.second_derivative)))
      fail(ErrorCode::Numerical, "critical point refinement stalled at x = " + std::to_string(r));
    (cp.second_derivative > 0 ? cat.minima : cat.maxima).push_back(cp);
  }
  cat.n0 = static_cast<int>(cat.minima.size());
  if (cat.n0 < 1) fail(ErrorCode::Numerical, "no minimum found in the search box");

  cat.barriers = Eigen::MatrixXd::Zero(cat.n0, cat.n0);
  for (int i = 0; i < cat.n0; ++i) {
    for (int j = 0; j < cat.n0; ++j) {
      if (i == j) continue;
      double lo = std::min(cat.minima[i].location, cat.minima[j].location);
      double hi = std::max(cat.minima[i].location, cat.minima[j].location);
      double top = -std::numeric_limits<double>::infinity();
      for (const auto& m : cat.maxima)
        if (m.location > lo && m.location < hi) top = std::max(top, m.value);
      cat.barriers(i, j) = top - cat.minima[i].value;
    }
  }
  return cat;
}

HypothesisDiagnostics check_hypothesis(const PotentialSpec& spec, Interval box, int samples,
                                       const std::vector<double>& h_values,
                                       const HypothesisThresholds& thresholds) {
  validate(spec);
  if (samples < 2) samples = 2;
  HypothesisDiagnostics out;
  out.box = box;

  // annulus of half the box width on each side
  double width = 0.5 * box.width();
  double gmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    double t = width * i / (samples - 1);
    gmin = std::min({gmin, std::abs(evaluate(spec, box.lo - t, 1)),
                     std::abs(evaluate(spec, box.hi + t, 1))});
  }
  out.min_gradient_outside = gmin;

  double m2 = 0.0, m3 = 0.0;
  for (int i = 0; i < samples; ++i) {
    double x = box.lo + box.width() * i / (samples - 1);
    m2 = std::max(m2, std::abs(evaluate(spec, x, 2)));
    m3 = std::max(m3, std::abs(evaluate(spec, x, 3)));
  }
  out.max_second_derivative = m2;
  out.max_third_derivative = m3;

  double vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i)
    vmin = std::min(vmin, evaluate(spec, box.lo + box.width() * i / (samples - 1), 0));
  out.integrable_ok = true;
  for (double h : h_values) {
    if (!(h > 0)) fail(ErrorCode::Argument, "h must be positive");
    // integrate the shifted Boltzmann factor, then restore the shift
    auto f = [&](double x) { return std::exp(-(evaluate(spec, x, 0) - vmin) / h); };
    double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, box.lo, box.hi, 15, 1e-13);
    value *= std::exp(-vmin / h);
    out.h_values.push_back(h);
    out.boltzmann_integrals.push_back(value);
    if (!std::isfinite(value) || value <= 0.0) out.integrable_ok = false;
  }
  out.gradient_ok = gmin >= thresholds.min_gradient_outside;
  out.derivatives_ok = std::isfinite(m2) && std::isfinite(m3) &&
                       m2 <= thresholds.max_derivative_inside &&
                       m3 <= thresholds.max_derivative_inside;
  return out;
}

PotentialSpec rescale_potential(const PotentialSpec& spec, double h) {
  if (!(h > 0.0) || h > 1.0) fail(ErrorCode::Argument, "rescaling needs 0 < h <= 1");
  validate(spec);
  PotentialSpec out = spec;
  out.kind = spec.kind == PotentialKind::Harmonic ? PotentialKind::Harmonic : PotentialKind::Polynomial;
  for (std::size_t k = 0; k < out.coefficients.size(); ++k)
    out.coefficients[k] = spec.coefficients[k] * std::pow(h, 0.5 * static_cast<double>(k) - 1.0);
  return out;
}

}  // namespace bgk
