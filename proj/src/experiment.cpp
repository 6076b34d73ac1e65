#include "experiment.hpp"

#include "error.hpp"
#include "fit.hpp"
#include "hypocoercivity.hpp"
#include "json_out.hpp"
#include "semigroup.hpp"
#include "spectral.hpp"
#include "witten.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

namespace bgk {

using nlohmann::json;

namespace {

class Csv {
public:
  explicit Csv(std::string header) : text_(std::move(header) + "\n") {}
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) text_ += ',';
      text_ += format_double(values[i]);
    }
    text_ += '\n';
  }
  const std::string& text() const { return text_; }

private:
  std::string text_;
};

std::string h_tag(double h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", h);
  return buf;
}

json complex_list(const std::vector<cplx>& zs) {
  json a = json::array();
  for (cplx z : zs) a.push_back({z.real(), z.imag()});
  return a;
}

double spread(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

struct Stage {
  double h = 0.0;
  GridSpec grid;
  OperatorBundle b;
  QuasimodeFamily q;
  WittenReport w;
  double delta_hat = 0.0;
  std::optional<SmallSpectrum> s;
  std::optional<ProjectorData> p;
  std::optional<KappaGram> kg;
};

class Runner {
public:
  explicit Runner(const ExperimentConfig& c) : c_(c) {
    const auto& t = c.tolerances;
    opts_.dense_eigen_limit = t.dense_eigen_limit;
    opts_.dense_svd_limit = t.dense_svd_limit;
    opts_.separation_threshold = t.separation_threshold;
    opts_.sigma_rel_tol = t.sigma_rel_tol;
    opts_.max_iterations = t.max_iterations;
    opts_.seed = c.arnoldi_seed;
    opts_.contour_nodes = t.contour_nodes;
    popts_.tol = t.expmv_tol;
  }

  RunResult run() {
    catalog_ = find_critical_points(c_.potential, default_search_box(c_.potential));
    json per_h = json::array();
    for (double h : c_.h_values) per_h.push_back(run_h(h));
    json global = run_global();

    json pot = {{"coefficients", c_.potential.coefficients}, {"kind", kind_name(c_.potential.kind)}, {"n0", catalog_.n0}};
    json mins = json::array(), maxs = json::array();
    for (const auto& m : catalog_.minima) mins.push_back({{"location", m.location}, {"value", m.value}});
    for (const auto& m : catalog_.maxima) maxs.push_back({{"location", m.location}, {"value", m.value}});
    pot["minima"] = mins;
    pot["maxima"] = maxs;

    json checks = json::array();
    for (const auto& ch : r_.checks) {
      json e = {{"name", ch.name}, {"passed", ch.passed}, {"value", ch.value}, {"threshold", ch.threshold}};
      e["h"] = ch.h ? json(*ch.h) : json(nullptr);
      if (!ch.detail.empty()) e["detail"] = ch.detail;
      checks.push_back(e);
    }
    r_.summary = {{"schema", kSchemaVersion},
                  {"config", json::parse(config_to_json(c_))},
                  {"potential", pot},
                  {"per_h", per_h},
                  {"global", global},
                  {"checks", checks},
                  {"errors", r_.errors},
                  {"passed", r_.passed()}};
    flush_csv();
    return std::move(r_);
  }

private:
  void check(const std::string& name, std::optional<double> h, bool ok, double value, double threshold,
             std::string detail = {}) {
    r_.checks.push_back({name, h, ok, value, threshold, std::move(detail)});
  }

  // Runs body, turning library errors into a failed "<name>.completed" check.
  void guarded(const std::string& name, std::optional<double> h, json& out, const std::function<void()>& body) {
    try {
      body();
    } catch (const Error& e) {
      std::string where = h ? " at h = " + h_tag(*h) : std::string();
      r_.errors.push_back(name + where + ": [" + error_name(e.code()) + "] " + e.what());
      out["error"] = {{"code", error_name(e.code())}, {"message", e.what()}};
      check(name + ".completed", h, false, 0.0, 0.0, e.what());
    }
  }

  void cluster(Stage& st) {
    if (st.s) return;
    st.s = small_eigenvalues(st.b, st.delta_hat, opts_, false);
    if (!st.s->dense) fail(ErrorCode::Configuration, "spectral projector needs the dense path; raise dense_eigen_limit");
    st.p = spectral_projector(*st.s);
    st.kg = kappa_gram(*st.p, st.b.Ukappa, st.h);
  }

  json run_h(double h) {
    json out = {{"h", h}};
    Stage st;
    st.h = h;
    guarded("setup", h, out, [&] {
      st.grid = grid_for(c_, h);
      st.b = assemble(c_.potential, st.grid);
      st.q = build_quasimodes(catalog_, st.b, {});
      st.w = witten_report(st.b, catalog_);
      st.delta_hat = c_.tolerances.delta_hat.value_or(st.w.tau_hat / 4.0);
    });
    if (out.contains("error")) {
      out["pt_residual"] = nullptr;
      return out;
    }
    out["grid"] = {{"N", st.grid.N}, {"K", st.grid.K}, {"x_min", st.grid.x_min}, {"x_max", st.grid.x_max},
                   {"doubler", st.b.doubler}};
    out["warnings"] = st.b.warnings;
    const double pt = pt_check(st.b.P, st.b.Ukappa);
    const double pnorm = st.b.P.norm();
    out["pt_residual"] = pt;
    out["pt_relative"] = pt / pnorm;
    out["delta_hat"] = st.delta_hat;
    out["tau_hat"] = st.w.tau_hat;

    json ex = json::object();
    for (const auto& name : c_.experiments) {
      json e = json::object();
      guarded(name, h, e, [&] {
        if (name == "witten") witten(st, e);
        else if (name == "spectrum") spectrum(st, e);
        else if (name == "resolvent") resolvent(st, e);
        else if (name == "hypo") hypo(st, e);
        else if (name == "ptsym") ptsym(st, e, pt, pnorm);
        else if (name == "semigroup") semigroup(st, e);
        else if (name == "metastable") metastable(st, e);
      });
      ex[name] = e;
    }
    out["experiments"] = ex;
    return out;
  }

  void witten(Stage& st, json& e) {
    const auto& w = st.w;
    e = {{"eigenvalues", w.eigenvalues}, {"tau_raw", w.tau_raw}, {"tau_hat", w.tau_hat},
         {"quasimode_residuals", w.quasimode_residuals}, {"small_count", w.small_count}};
    for (std::size_t i = 0; i < w.eigenvalues.size(); ++i)
      witten_csv_.row({st.h, static_cast<double>(i), w.eigenvalues[i]});
    check("witten.small_count", st.h, w.small_count == catalog_.n0, w.small_count, catalog_.n0);
    if (c_.potential.kind == PotentialKind::Harmonic && w.eigenvalues.size() >= 5) {
      // shifted oscillator: k h for k = 0..4
      double rel = 0.0;
      for (int k = 1; k < 5; ++k) rel = std::max(rel, std::abs(w.eigenvalues[k] - k * st.h) / (k * st.h));
      const double zero = std::abs(w.eigenvalues[0]);
      e["closed_form_relative"] = rel;
      e["closed_form_zero"] = zero;
      check("witten.closed_form", st.h, rel <= 1e-4 && zero <= 1e-6, rel, 1e-4);
    }
  }

  void spectrum(Stage& st, json& e) {
    const auto& t = c_.tolerances;
    cluster(st);
    const auto& s = *st.s;
    const auto& p = *st.p;
    const auto& kg = *st.kg;
    double max_im = 0.0;
    for (cplx z : s.small_eigenvalues) max_im = std::max(max_im, std::abs(z.imag()));
    std::vector<cplx> near(s.outside_eigenvalues.begin(),
                           s.outside_eigenvalues.begin() + std::min<std::size_t>(8, s.outside_eigenvalues.size()));
    e = {{"delta_hat", st.delta_hat},     {"small_eigenvalues", complex_list(s.small_eigenvalues)},
         {"nearest_outside", complex_list(near)}, {"gap_ratio", s.gap_ratio},
         {"inside_max_abs", s.inside_max_abs}, {"outside_min_re", s.outside_min_re},
         {"dense", s.dense},             {"max_abs_imag", max_im}};
    for (std::size_t i = 0; i < s.small_eigenvalues.size(); ++i)
      eig_csv_.row({st.h, s.small_eigenvalues[i].real(), s.small_eigenvalues[i].imag(), static_cast<double>(i)});

    check("spectrum.count", st.h, static_cast<int>(s.small_eigenvalues.size()) == catalog_.n0,
          static_cast<double>(s.small_eigenvalues.size()), catalog_.n0);
    check("spectrum.gap_ratio", st.h, s.gap_ratio >= t.separation_threshold, s.gap_ratio, t.separation_threshold);
    check("spectrum.realness", st.h, max_im <= t.realness_tol * st.h, max_im, t.realness_tol * st.h);

    MatrixXd C = contour_projector(st.b, st.delta_hat * st.h, t.contour_nodes);
    double contour_diff = operator_norm_dense(MatrixXd(C - p.Pi0), opts_.seed);
    double max_mode = 0.0;
    for (double v : kg.mode_projector_norms) max_mode = std::max(max_mode, v);
    e["projector"] = {{"norm", p.norm},
                      {"rank", p.rank},
                      {"idempotency", p.idempotency},
                      {"contour_difference", contour_diff},
                      {"mode_projector_norms", kg.mode_projector_norms}};
    e["kappa"] = {{"gram_min_eig", kg.min_eig}, {"eigenvalues", kg.eigenvalues},
                  {"eigvec_condition", kg.eigvec_condition}};
    check("projector.contour", st.h, contour_diff <= t.projector_tol, contour_diff, t.projector_tol);
    check("projector.idempotency", st.h, p.idempotency <= t.idempotency_tol, p.idempotency, t.idempotency_tol);
    check("projector.rank", st.h, p.rank == catalog_.n0, p.rank, catalog_.n0);
    if (st.h <= t.kappa_gram_h_max + 1e-12) {
      check("spectrum.kappa_gram", st.h, kg.min_eig >= t.kappa_gram_min, kg.min_eig, t.kappa_gram_min);
      check("projector.norm", st.h, p.norm <= t.projector_norm_max, p.norm, t.projector_norm_max);
      check("projector.mode_norms", st.h, max_mode <= t.projector_norm_max, max_mode, t.projector_norm_max);
    }

    e["quasimode_residual_norms"] = st.q.residual_norms;
    qres_h_.push_back(st.h);
    qres_.push_back(st.q.residual_norms);
    if (s.small_eigenvalues.size() >= 2) {
      mu2_h_.push_back(st.h);
      mu2_.push_back(std::abs(s.small_eigenvalues[1]));
    }

    auto br = scaling_bridge(c_.potential, st.grid, st.delta_hat, 1e-12, opts_);
    e["scaling_bridge"] = {{"count_match", br.count_match}, {"max_relative", br.max_relative},
                           {"kernel_abs", br.kernel_abs}, {"unit_scale", complex_list(br.unit_scale)}};
    check("spectrum.scaling_bridge", st.h,
          br.count_match && br.max_relative <= t.bridge_rel_tol && br.kernel_abs <= 1e-12 * st.h, br.max_relative,
          t.bridge_rel_tol);
  }

  void resolvent(Stage& st, json& e) {
    const double d1 = c_.tolerances.delta1_fraction * st.delta_hat;
    auto sw = resolvent_sweep(st.b, d1, st.delta_hat, c_.resolvent.n_angles, c_.resolvent.n_radii,
                              c_.resolvent.n_line, opts_);
    for (const auto& smp : sw.samples) res_csv_.row({smp.z.real(), smp.z.imag(), smp.sigma_min, smp.norm, st.h});
    double acc = resolvent_norm(st.b, cplx(-1.0, 0.0), opts_);
    e = {{"r_inner", sw.r_inner}, {"r_outer", sw.r_outer}, {"summary", sw.summary},
         {"line_summary", sw.line_summary}, {"samples", sw.samples.size()}, {"accretive_norm", acc}};
    check("resolvent.accretive", st.h, acc <= 1.0 + 1e-12, acc, 1.0);
    res_summary_.push_back(sw.summary);
  }

  void hypo(Stage& st, json& e) {
    CertificateOptions o;
    o.gap_tolerance = c_.tolerances.gap_tolerance;
    o.validate = false;
    auto cert = certificate(st.b, st.q, st.w.tau_hat, o);
    e = {{"epsilon", cert.epsilon},
         {"norm_L", cert.norm_L},
         {"norm_A", cert.norm_A},
         {"tau_hat", cert.tau_hat},
         {"kappa_min", cert.kappa_min},
         {"implied_A", cert.implied_A},
         {"gap_lemma_min", cert.gap_lemma_min},
         {"commutator_residual", cert.commutator_residual},
         {"norm_L_bound", auxiliary_norm_bound(st.b)}};
    hypo_csv_.row({st.h, cert.epsilon, cert.norm_L, cert.norm_A, cert.kappa_min, cert.implied_A});
    check("hypo.kappa_positive", st.h, cert.kappa_min > 0.0, cert.kappa_min, 0.0);
    double gap_floor = cert.tau_hat / 4.0 - o.gap_tolerance;
    check("hypo.gap_lemma", st.h, cert.gap_lemma_min >= gap_floor, cert.gap_lemma_min, gap_floor);
    check("hypo.epsilon", st.h, cert.epsilon <= 0.125 && cert.epsilon * cert.norm_L <= 0.5,
          cert.epsilon * cert.norm_L, 0.5);
    kappa_h_.push_back(cert.kappa_min / st.h);
    norm_L_.push_back(cert.norm_L);
    norm_A_.push_back(cert.norm_A);
  }

  void ptsym(Stage& st, json& e, double pt, double pnorm) {
    e = {{"pt_residual", pt}, {"p_frobenius", pnorm}};
    check("ptsym.residual", st.h, pt <= c_.tolerances.pt_rel_tol * pnorm, pt / pnorm, c_.tolerances.pt_rel_tol);
  }

  VectorXd semigroup_start(const Stage& st) const {
    VectorXd m = build_maxwellian(c_.potential, st.grid).head(st.b.N());
    VectorXd u0 = lift(m / m.norm(), st.b.K(), 1);
    if (catalog_.n0 > 1) u0 += st.q.vectors.col(0);
    return u0 / u0.norm();
  }

  void write_series(const std::string& file, int n0, const std::vector<double>& t, const std::vector<double>& rem,
                    const std::vector<std::vector<double>>& masses, const std::vector<double>& dec) {
    std::string header = "t,remainder_norm";
    for (int j = 1; j <= n0; ++j) header += ",mass_well_" + std::to_string(j);
    header += ",decomposition_residual";
    Csv csv(header);
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::vector<double> row{t[i], rem[i]};
      row.insert(row.end(), masses[i].begin(), masses[i].end());
      row.push_back(dec[i]);
      csv.row(row);
    }
    r_.files[file] = csv.text();
  }

  void semigroup(Stage& st, json& e) {
    const auto& t = c_.tolerances;
    cluster(st);
    auto labels = basin_labels(st.b.x, catalog_);
    auto times = decay_times(st.s->outside_min_re, c_.semigroup.n_times, c_.semigroup.span);
    auto f = decay_experiment(st.b, *st.s, *st.p, *st.kg, semigroup_start(st), times, popts_, &labels, catalog_.n0);
    double drift = steady_state_drift(st.b, t.steady_state_time);
    double ratio = f.fitted_rate / f.predicted_rate;
    e = {{"fitted_rate", f.fitted_rate},
         {"predicted_rate", f.predicted_rate},
         {"rate_ratio", ratio},
         {"r_squared", f.r_squared},
         {"residual_constant", f.residual_constant},
         {"contraction", f.contraction},
         {"commutation", f.commutation},
         {"transient_warning", f.transient_warning},
         {"mode_eigenvalues", f.mode_eigenvalues},
         {"steady_state_drift", drift}};
    write_series("semigroup_h" + h_tag(st.h) + ".csv", catalog_.n0, f.times, f.remainder_norms, f.masses,
                 f.decomposition_residuals);
    check("semigroup.rate", st.h, ratio >= 0.5 && ratio <= 2.0, ratio, 2.0);
    check("semigroup.decomposition", st.h, f.residual_constant <= 10.0, f.residual_constant, 10.0);
    check("semigroup.contraction", st.h, f.contraction <= 1.0 + 1e-10, f.contraction, 1.0 + 1e-10);
    check("semigroup.commutation", st.h, f.commutation <= 1e-8, f.commutation, 1e-8);
    check("semigroup.steady_state", st.h, drift <= t.steady_state_tol, drift, t.steady_state_tol);
    rate_h_.push_back(f.fitted_rate / st.h);
  }

  void metastable(Stage& st, json& e) {
    if (catalog_.n0 < 2) {
      e = {{"skipped", "single minimum: no metastability"}};
      return;
    }
    cluster(st);
    MetastableOptions mo;
    mo.late_factor = c_.metastable.late_factor;
    mo.per_decade = c_.metastable.per_decade;
    auto r = metastable_experiment(st.b, catalog_, st.q, *st.s, *st.p, *st.kg, c_.metastable.start_well, mo, popts_);
    e = {{"start_well", r.start_well},       {"mu2", r.mu2},
         {"plateau_found", r.plateau_found}, {"plateau_start", r.plateau_start},
         {"plateau_end", r.plateau_end},     {"t_eq", r.t_eq},
         {"equilibrated", r.equilibrated},   {"t_eq_bound", r.t_eq_bound},
         {"limit_masses", r.limit_masses},   {"late_masses", r.masses.back()}};
    write_series("metastable_h" + h_tag(st.h) + ".csv", catalog_.n0, r.times, r.remainder_norms, r.masses,
                 r.decomposition_residuals);
    check("metastable.plateau", st.h, r.plateau_found, r.plateau_found ? 1.0 : 0.0, 1.0);
    check("metastable.t_eq", st.h, r.equilibrated && r.t_eq >= r.t_eq_bound, r.t_eq, r.t_eq_bound);
    double late = 0.0;
    for (int j = 0; j < catalog_.n0; ++j) late = std::max(late, std::abs(r.masses.back()[j] - r.limit_masses[j]));
    check("metastable.late_masses", st.h, late <= mo.mass_tolerance, late, mo.mass_tolerance);
  }

  json run_global() {
    json g = json::object();
    if (c_.wants("spectrum") && mu2_.size() >= 3) {
      std::vector<double> x, y;
      for (std::size_t i = 0; i < mu2_.size(); ++i) {
        x.push_back(1.0 / mu2_h_[i]);
        y.push_back(std::log(mu2_[i]));
      }
      auto f = fit_line(x, y);
      g["mu2_fit"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
      check("spectrum.mu2_exponential", std::nullopt, f.slope < 0.0 && f.r_squared >= 0.99, f.r_squared, 0.99);
    }
    if (c_.wants("spectrum") && catalog_.n0 >= 2 && qres_.size() >= 3) {
      json fits = json::array();
      for (int j = 0; j < catalog_.n0; ++j) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < qres_.size(); ++i) {
          x.push_back(1.0 / qres_h_[i]);
          y.push_back(std::log(qres_[i][j]));
        }
        auto f = fit_line(x, y);
        fits.push_back({{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}});
        check("spectrum.quasimode_exponential_" + std::to_string(j + 1), std::nullopt,
              f.slope < 0.0 && f.r_squared >= 0.98, f.r_squared, 0.98);
      }
      g["quasimode_fits"] = fits;
    }
    auto uniform = [&](const std::string& name, const std::vector<double>& v, double factor) {
      if (v.size() < 2) return;
      double sp = spread(v);
      g[name + "_spread"] = sp;
      check(name, std::nullopt, sp <= factor, sp, factor);
    };
    if (c_.wants("resolvent")) uniform("resolvent.uniformity", res_summary_, 3.0);
    if (c_.wants("hypo")) {
      uniform("hypo.kappa_uniform", kappa_h_, 2.0);
      uniform("hypo.norm_L_uniform", norm_L_, 2.0);
      uniform("hypo.norm_A_uniform", norm_A_, 2.0);
    }
    if (c_.wants("semigroup")) uniform("semigroup.rate_scaling", rate_h_, 2.0);
    return g;
  }

  void flush_csv() {
    if (c_.wants("spectrum")) r_.files["eigenvalues.csv"] = eig_csv_.text();
    if (c_.wants("resolvent")) r_.files["resolvent.csv"] = res_csv_.text();
    if (c_.wants("hypo")) r_.files["hypo.csv"] = hypo_csv_.text();
    if (c_.wants("witten")) r_.files["witten.csv"] = witten_csv_.text();
  }

  const ExperimentConfig& c_;
  SpectralOptions opts_;
  PropagateOptions popts_;
  CriticalPointCatalog catalog_;
  RunResult r_;
  Csv eig_csv_{"h,re_mu,im_mu,index"};
  Csv res_csv_{"re_z,im_z,sigma_min,norm,h"};
  Csv hypo_csv_{"h,epsilon,norm_L,norm_A,kappa_min,implied_A"};
  Csv witten_csv_{"h,index,eigenvalue"};
  std::vector<double> mu2_h_, mu2_, qres_h_, res_summary_, kappa_h_, norm_L_, norm_A_, rate_h_;
  std::vector<std::vector<double>> qres_;
};

}  // namespace

bool RunResult::passed() const {
  if (!errors.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

RunResult run(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  validate(c);
  return Runner(c).run();
}

void emit_report(const RunResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& text) {
    fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
  };
  write("summary.json", dump_json(result.summary));
  for (const auto& [name, text] : result.files) write(name, text);
}

}  // namespace bgk
