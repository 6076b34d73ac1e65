#include "config.hpp"

#include "error.hpp"
#include "json_out.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bgk {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  fail(ErrorCode::ConfigParse, "config key '" + path + "': " + msg);
}

// Object reader that tracks consumed keys so leftovers can be rejected.
class Reader {
public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void number(const std::string& key, double& out) {
    if (auto* v = find(key)) {
      if (!v->is_number()) bad(key_path(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_integer()) bad(key_path(key), "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) out = v->get<Int>();
        else if (v->get<long long>() < 0) bad(key_path(key), "expected a nonnegative integer");
        else out = static_cast<Int>(v->get<long long>());
      } else {
        out = v->get<Int>();
      }
    }
  }

  void string(const std::string& key, std::string& out) {
    if (auto* v = find(key)) {
      if (!v->is_string()) bad(key_path(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  Reader child(const std::string& key) {
    const json* v = find(key);
    static const json empty = json::object();
    return Reader(v ? *v : empty, key_path(key));
  }

  std::vector<double> numbers(const std::string& key, const json& v) {
    if (!v.is_array()) bad(key_path(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) bad(key_path(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) bad(key_path(it.key()), "unknown key");
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string domain_mode_name(DomainMode m) {
  switch (m) {
    case DomainMode::PerH: return "per_h";
    case DomainMode::Shared: return "shared";
    case DomainMode::Explicit: return "explicit";
  }
  return "per_h";
}

Interval read_interval(Reader& r, const std::string& key, const json& v) {
  auto xs = r.numbers(key, v);
  if (xs.size() != 2 || !(xs[0] < xs[1])) bad(r.key_path(key), "expected [x_min, x_max] with x_min < x_max");
  return {xs[0], xs[1]};
}

void read_potential(Reader r, ExperimentConfig& c) {
  std::string preset_name;
  r.string("preset", preset_name);
  r.number("tilt", c.tilt);
  int dim = 1;
  r.integer("dimension", dim);
  const json* coeffs = r.find("coefficients");
  r.finish();
  if (dim != 1) bad(r.key_path("dimension"), "only dimension 1 is supported");
  if (coeffs && !preset_name.empty()) bad(r.key_path("coefficients"), "give either a preset or coefficients");
  if (coeffs) {
    c.preset.clear();
    try {
      c.potential = polynomial(r.numbers("coefficients", *coeffs));
    } catch (const Error& e) {
      bad(r.key_path("coefficients"), e.what());
    }
  } else if (!preset_name.empty()) {
    try {
      c.preset = preset_name;
      c.potential = preset(preset_name, c.tilt);
    } catch (const Error& e) {
      bad(r.key_path("preset"), e.what());
    }
  } else if (!c.preset.empty()) {
    c.potential = preset(c.preset, c.tilt);
  }
}

void read_grid(Reader r, GridConfig& g) {
  r.integer("N", g.N);
  r.integer("K", g.K);
  r.number("doubler_scale", g.doubler_scale);
  if (const json* d = r.find("domain")) {
    if (d->is_string()) {
      auto s = d->get<std::string>();
      if (s == "per_h") g.mode = DomainMode::PerH;
      else if (s == "shared") g.mode = DomainMode::Shared;
      else bad(r.key_path("domain"), "expected \"per_h\", \"shared\" or [x_min, x_max]");
    } else {
      g.mode = DomainMode::Explicit;
      g.domain = read_interval(r, "domain", *d);
    }
  }
  if (const json* o = r.find("domain_overrides")) {
    if (!o->is_array()) bad(r.key_path("domain_overrides"), "expected an array");
    for (std::size_t i = 0; i < o->size(); ++i) {
      Reader e((*o)[i], r.key_path("domain_overrides") + "[" + std::to_string(i) + "]");
      DomainOverride ov;
      e.number("h", ov.h);
      const json* d = e.find("domain");
      if (!d) bad(e.key_path("domain"), "missing");
      ov.domain = read_interval(e, "domain", *d);
      e.finish();
      g.overrides.push_back(ov);
    }
  }
  r.finish();
}

void read_tolerances(Reader r, Tolerances& t) {
  if (const json* d = r.find("delta_hat")) {
    if (!d->is_null()) {
      if (!d->is_number()) bad(r.key_path("delta_hat"), "expected a number or null");
      t.delta_hat = d->get<double>();
    }
  }
  r.number("delta1_fraction", t.delta1_fraction);
  r.number("separation_threshold", t.separation_threshold);
  r.number("sigma_rel_tol", t.sigma_rel_tol);
  r.integer("max_iterations", t.max_iterations);
  r.integer("dense_eigen_limit", t.dense_eigen_limit);
  r.integer("dense_svd_limit", t.dense_svd_limit);
  r.integer("contour_nodes", t.contour_nodes);
  r.number("expmv_tol", t.expmv_tol);
  r.number("gap_tolerance", t.gap_tolerance);
  r.number("pt_rel_tol", t.pt_rel_tol);
  r.number("realness_tol", t.realness_tol);
  r.number("projector_tol", t.projector_tol);
  r.number("idempotency_tol", t.idempotency_tol);
  r.number("kappa_gram_min", t.kappa_gram_min);
  r.number("kappa_gram_h_max", t.kappa_gram_h_max);
  r.number("projector_norm_max", t.projector_norm_max);
  r.number("bridge_rel_tol", t.bridge_rel_tol);
  r.number("steady_state_tol", t.steady_state_tol);
  r.number("steady_state_time", t.steady_state_time);
  r.finish();
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') { ++line; col = 1; }
    else ++col;
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

bool ExperimentConfig::wants(const std::string& name) const {
  return std::find(experiments.begin(), experiments.end(), name) != experiments.end();
}

void set_preset(ExperimentConfig& c, const std::string& name) {
  c.potential = preset(name, c.tilt);
  c.preset = name;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigParse, "config syntax error at " + line_col(text, e.byte) + ": " + e.what());
  }
  ExperimentConfig c;
  Reader r(j, "");
  read_potential(r.child("potential"), c);
  read_grid(r.child("grid"), c.grid);
  if (const json* h = r.find("h_values")) c.h_values = r.numbers("h_values", *h);
  if (const json* e = r.find("experiments")) {
    if (!e->is_array()) bad("experiments", "expected an array of names");
    c.experiments.clear();
    for (const auto& x : *e) {
      if (!x.is_string()) bad("experiments", "expected an array of names");
      c.experiments.push_back(x.get<std::string>());
    }
  }
  r.string("output_dir", c.output_dir);
  r.integer("arnoldi_seed", c.arnoldi_seed);
  read_tolerances(r.child("tolerances"), c.tolerances);
  {
    Reader s = r.child("resolvent");
    s.integer("n_angles", c.resolvent.n_angles);
    s.integer("n_radii", c.resolvent.n_radii);
    s.integer("n_line", c.resolvent.n_line);
    s.finish();
  }
  {
    Reader s = r.child("semigroup");
    s.integer("n_times", c.semigroup.n_times);
    s.number("span", c.semigroup.span);
    s.finish();
  }
  {
    Reader s = r.child("metastable");
    s.integer("start_well", c.metastable.start_well);
    s.number("late_factor", c.metastable.late_factor);
    s.integer("per_decade", c.metastable.per_decade);
    s.finish();
  }
  r.finish();
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

void validate(ExperimentConfig& c) {
  auto cfg = [](const std::string& msg) { fail(ErrorCode::Configuration, msg); };
  if (c.h_values.empty()) cfg("h_values must not be empty");
  for (double h : c.h_values)
    if (!(h > 0.0) || h > 1.0) cfg("h values must lie in (0, 1]");
  std::sort(c.h_values.begin(), c.h_values.end(), std::greater<>());
  if (std::adjacent_find(c.h_values.begin(), c.h_values.end()) != c.h_values.end()) cfg("h values must be distinct");
  if (c.experiments.empty()) cfg("experiments must not be empty");
  std::vector<std::string> seen;
  for (const auto& e : c.experiments) {
    if (std::find(experiment_names().begin(), experiment_names().end(), e) == experiment_names().end())
      cfg("unknown experiment '" + e + "'");
    if (std::find(seen.begin(), seen.end(), e) != seen.end()) cfg("experiment '" + e + "' listed twice");
    seen.push_back(e);
  }
  if (c.grid.N < 8) cfg("grid.N must be at least 8");
  if (c.grid.K < 2) cfg("grid.K must be at least 2");
  if (!(c.grid.doubler_scale >= 0.0)) cfg("grid.doubler_scale must be nonnegative");
  const auto& t = c.tolerances;
  if (t.delta_hat && !(*t.delta_hat > 0.0)) cfg("tolerances.delta_hat must be positive");
  if (!(t.delta1_fraction > 0.0) || t.delta1_fraction > 1.0) cfg("tolerances.delta1_fraction must lie in (0, 1]");
  if (t.contour_nodes < 2 || t.contour_nodes % 2) cfg("tolerances.contour_nodes must be even and >= 2");
  if (c.resolvent.n_angles < 1 || c.resolvent.n_radii < 1 || c.resolvent.n_line < 0)
    cfg("resolvent sample counts must be positive");
  if (c.semigroup.n_times < 5) cfg("semigroup.n_times must be at least 5");
  if (!(c.semigroup.span > 0.0)) cfg("semigroup.span must be positive");
  if (!(c.metastable.late_factor > 0.0) || c.metastable.per_decade < 1) cfg("metastable grid must be positive");
  bgk::validate(c.potential);
}

GridSpec grid_for(const ExperimentConfig& c, double h) {
  GridSpec g;
  g.N = c.grid.N;
  g.K = c.grid.K;
  g.h = h;
  g.doubler_scale = c.grid.doubler_scale;
  Interval d;
  auto ov = std::find_if(c.grid.overrides.begin(), c.grid.overrides.end(),
                         [&](const DomainOverride& o) { return std::abs(o.h - h) <= 1e-12 * h; });
  if (ov != c.grid.overrides.end()) d = ov->domain;
  else if (c.grid.mode == DomainMode::Explicit) d = c.grid.domain;
  else if (c.grid.mode == DomainMode::Shared) d = default_domain(c.potential, c.h_values.front());
  else d = default_domain(c.potential, h);
  g.x_min = d.lo;
  g.x_max = d.hi;
  return g;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  if (!c.preset.empty()) j["potential"] = {{"preset", c.preset}, {"tilt", c.tilt}};
  else j["potential"] = {{"coefficients", c.potential.coefficients}};
  json g = {{"N", c.grid.N}, {"K", c.grid.K}, {"doubler_scale", c.grid.doubler_scale}};
  if (c.grid.mode == DomainMode::Explicit) g["domain"] = {c.grid.domain.lo, c.grid.domain.hi};
  else g["domain"] = domain_mode_name(c.grid.mode);
  json ovs = json::array();
  for (const auto& o : c.grid.overrides) ovs.push_back({{"h", o.h}, {"domain", {o.domain.lo, o.domain.hi}}});
  g["domain_overrides"] = ovs;
  j["grid"] = g;
  j["h_values"] = c.h_values;
  j["experiments"] = c.experiments;
  j["output_dir"] = c.output_dir;
  j["arnoldi_seed"] = c.arnoldi_seed;
  const auto& t = c.tolerances;
  j["tolerances"] = {{"delta_hat", t.delta_hat ? json(*t.delta_hat) : json(nullptr)},
                     {"delta1_fraction", t.delta1_fraction},
                     {"separation_threshold", t.separation_threshold},
                     {"sigma_rel_tol", t.sigma_rel_tol},
                     {"max_iterations", t.max_iterations},
                     {"dense_eigen_limit", t.dense_eigen_limit},
                     {"dense_svd_limit", t.dense_svd_limit},
                     {"contour_nodes", t.contour_nodes},
                     {"expmv_tol", t.expmv_tol},
                     {"gap_tolerance", t.gap_tolerance},
                     {"pt_rel_tol", t.pt_rel_tol},
                     {"realness_tol", t.realness_tol},
                     {"projector_tol", t.projector_tol},
                     {"idempotency_tol", t.idempotency_tol},
                     {"kappa_gram_min", t.kappa_gram_min},
                     {"kappa_gram_h_max", t.kappa_gram_h_max},
                     {"projector_norm_max", t.projector_norm_max},
                     {"bridge_rel_tol", t.bridge_rel_tol},
                     {"steady_state_tol", t.steady_state_tol},
                     {"steady_state_time", t.steady_state_time}};
  j["resolvent"] = {{"n_angles", c.resolvent.n_angles}, {"n_radii", c.resolvent.n_radii}, {"n_line", c.resolvent.n_line}};
  j["semigroup"] = {{"n_times", c.semigroup.n_times}, {"span", c.semigroup.span}};
  j["metastable"] = {{"start_well", c.metastable.start_well},
                     {"late_factor", c.metastable.late_factor},
                     {"per_decade", c.metastable.per_decade}};
  return dump_json(j);
}

}  // namespace bgk
