#include "bgk/bgk.h"

#include "config.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "json_out.hpp"
#include "semigroup.hpp"
#include "spectral.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

struct bgk_config {
  bgk::ExperimentConfig cfg;
};

struct bgk_result {
  bgk::RunResult run;
};

struct bgk_operator {
  bgk::OperatorBundle bundle;
};

namespace {

thread_local std::string last_error;

int set_error(int code, const std::string& msg) {
  last_error = msg;
  return code;
}

template <class F>
int guard(F&& body) {
  try {
    body();
    last_error.clear();
    return BGK_OK;
  } catch (const bgk::Error& e) {
    return set_error(static_cast<int>(e.code()), e.what());
  } catch (const std::exception& e) {
    return set_error(BGK_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(BGK_ERR_INTERNAL, "unknown failure");
  }
}

void need(const void* p, const char* what) {
  if (!p) bgk::fail(bgk::ErrorCode::Argument, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bgk::GridSpec operator_grid(const bgk::PotentialSpec& spec, double h, int N, int K, double x_min, double x_max) {
  bgk::GridSpec g;
  g.N = N;
  g.K = K;
  g.h = h;
  if (x_min >= x_max) {
    auto d = bgk::default_domain(spec, h);
    x_min = d.lo;
    x_max = d.hi;
  }
  g.x_min = x_min;
  g.x_max = x_max;
  return g;
}

}  // namespace

extern "C" {

BGK_API const char* bgk_last_error(void) { return last_error.c_str(); }

BGK_API const char* bgk_status_name(int status) {
  if (status == BGK_OK) return "ok";
  if (status == BGK_ERR_INTERNAL) return "internal";
  if (status >= 1 && status <= 12) return bgk::error_name(static_cast<bgk::ErrorCode>(status));
  return "unknown";
}

BGK_API const char* bgk_version(void) { return "1.0.0"; }

BGK_API int bgk_config_default(bgk_config** out) {
  return guard([&] {
    need(out, "out");
    *out = new bgk_config{};
  });
}

BGK_API int bgk_config_from_file(const char* path, bgk_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new bgk_config{bgk::load_config(path)};
  });
}

BGK_API int bgk_config_from_string(const char* json, bgk_config** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new bgk_config{bgk::parse_config(json)};
  });
}

BGK_API void bgk_config_free(bgk_config* config) { delete config; }

BGK_API int bgk_config_set_preset(bgk_config* config, const char* name) {
  return guard([&] {
    need(config, "config");
    need(name, "name");
    bgk::set_preset(config->cfg, name);
  });
}

BGK_API int bgk_config_set_h_values(bgk_config* config, const double* h, size_t count) {
  return guard([&] {
    need(config, "config");
    if (count > 0) need(h, "h");
    auto copy = config->cfg;
    copy.h_values.assign(h, h + count);
    bgk::validate(copy);
    config->cfg = std::move(copy);
  });
}

BGK_API int bgk_config_set_experiments(bgk_config* config, const char* const* names, size_t count) {
  return guard([&] {
    need(config, "config");
    if (count > 0) need(names, "names");
    auto copy = config->cfg;
    copy.experiments.clear();
    for (size_t i = 0; i < count; ++i) {
      need(names[i], "experiment name");
      if (std::strcmp(names[i], "all") == 0) copy.experiments = bgk::experiment_names();
      else copy.experiments.emplace_back(names[i]);
    }
    bgk::validate(copy);
    config->cfg = std::move(copy);
  });
}

BGK_API int bgk_config_set_output_dir(bgk_config* config, const char* dir) {
  return guard([&] {
    need(config, "config");
    need(dir, "dir");
    config->cfg.output_dir = dir;
  });
}

BGK_API int bgk_config_set_seed(bgk_config* config, uint64_t seed) {
  return guard([&] {
    need(config, "config");
    config->cfg.arnoldi_seed = seed;
  });
}

BGK_API int bgk_config_set_grid(bgk_config* config, int N, int K) {
  return guard([&] {
    need(config, "config");
    auto copy = config->cfg;
    copy.grid.N = N;
    copy.grid.K = K;
    bgk::validate(copy);
    config->cfg = std::move(copy);
  });
}

BGK_API int bgk_config_grid(const bgk_config* config, int* N, int* K) {
  return guard([&] {
    need(config, "config");
    if (N) *N = config->cfg.grid.N;
    if (K) *K = config->cfg.grid.K;
  });
}

BGK_API int bgk_config_output_dir(const bgk_config* config, const char** dir) {
  return guard([&] {
    need(config, "config");
    need(dir, "dir");
    *dir = config->cfg.output_dir.c_str();
  });
}

BGK_API int bgk_config_to_json(const bgk_config* config, char** json) {
  return guard([&] {
    need(config, "config");
    need(json, "json");
    *json = dup_string(bgk::config_to_json(config->cfg));
  });
}

BGK_API int bgk_run(const bgk_config* config, bgk_result** out) {
  return guard([&] {
    need(config, "config");
    need(out, "out");
    *out = new bgk_result{bgk::run(config->cfg)};
  });
}

BGK_API void bgk_result_free(bgk_result* result) { delete result; }

BGK_API int bgk_result_passed(const bgk_result* result, int* passed) {
  return guard([&] {
    need(result, "result");
    need(passed, "passed");
    *passed = result->run.passed() ? 1 : 0;
  });
}

BGK_API int bgk_result_check_count(const bgk_result* result, size_t* count) {
  return guard([&] {
    need(result, "result");
    need(count, "count");
    *count = result->run.checks.size();
  });
}

BGK_API int bgk_result_check(const bgk_result* result, size_t index, const char** name, double* h, int* passed,
                             double* value, double* threshold) {
  return guard([&] {
    need(result, "result");
    if (index >= result->run.checks.size()) bgk::fail(bgk::ErrorCode::Argument, "check index out of range");
    const auto& c = result->run.checks[index];
    if (name) *name = c.name.c_str();
    if (h) *h = c.h ? *c.h : std::numeric_limits<double>::quiet_NaN();
    if (passed) *passed = c.passed ? 1 : 0;
    if (value) *value = c.value;
    if (threshold) *threshold = c.threshold;
  });
}

BGK_API int bgk_result_error_count(const bgk_result* result, size_t* count) {
  return guard([&] {
    need(result, "result");
    need(count, "count");
    *count = result->run.errors.size();
  });
}

BGK_API int bgk_result_error(const bgk_result* result, size_t index, const char** message) {
  return guard([&] {
    need(result, "result");
    need(message, "message");
    if (index >= result->run.errors.size()) bgk::fail(bgk::ErrorCode::Argument, "error index out of range");
    *message = result->run.errors[index].c_str();
  });
}

BGK_API int bgk_result_summary_json(const bgk_result* result, char** json) {
  return guard([&] {
    need(result, "result");
    need(json, "json");
    *json = dup_string(bgk::dump_json(result->run.summary));
  });
}

BGK_API int bgk_result_write(const bgk_result* result, const char* dir) {
  return guard([&] {
    need(result, "result");
    need(dir, "dir");
    bgk::emit_report(result->run, dir);
  });
}

BGK_API int bgk_operator_new_preset(const char* preset, double h, int N, int K, double x_min, double x_max,
                                    bgk_operator** out) {
  return guard([&] {
    need(preset, "preset");
    need(out, "out");
    auto spec = bgk::preset(preset);
    *out = new bgk_operator{bgk::assemble(spec, operator_grid(spec, h, N, K, x_min, x_max))};
  });
}

BGK_API int bgk_operator_new_polynomial(const double* coefficients, size_t count, double h, int N, int K,
                                        double x_min, double x_max, bgk_operator** out) {
  return guard([&] {
    need(coefficients, "coefficients");
    need(out, "out");
    auto spec = bgk::polynomial(std::vector<double>(coefficients, coefficients + count));
    *out = new bgk_operator{bgk::assemble(spec, operator_grid(spec, h, N, K, x_min, x_max))};
  });
}

BGK_API void bgk_operator_free(bgk_operator* op) { delete op; }

BGK_API int bgk_operator_size(const bgk_operator* op, size_t* unknowns) {
  return guard([&] {
    need(op, "op");
    need(unknowns, "unknowns");
    *unknowns = static_cast<size_t>(op->bundle.size());
  });
}

BGK_API int bgk_operator_pt_residual(const bgk_operator* op, double* residual, double* frobenius_norm) {
  return guard([&] {
    need(op, "op");
    need(residual, "residual");
    *residual = bgk::pt_check(op->bundle.P, op->bundle.Ukappa);
    if (frobenius_norm) *frobenius_norm = op->bundle.P.norm();
  });
}

BGK_API int bgk_operator_small_eigenvalues(const bgk_operator* op, double delta_hat, double* re, double* im,
                                           size_t capacity, size_t* count, double* gap_ratio) {
  return guard([&] {
    need(op, "op");
    need(count, "count");
    if (capacity > 0) {
      need(re, "re");
      need(im, "im");
    }
    auto s = bgk::small_eigenvalues(op->bundle, delta_hat, {}, false);
    *count = s.small_eigenvalues.size();
    for (size_t i = 0; i < std::min(capacity, *count); ++i) {
      re[i] = s.small_eigenvalues[i].real();
      im[i] = s.small_eigenvalues[i].imag();
    }
    if (gap_ratio) *gap_ratio = s.gap_ratio;
  });
}

BGK_API int bgk_operator_resolvent_norm(const bgk_operator* op, double re_z, double im_z, double* norm) {
  return guard([&] {
    need(op, "op");
    need(norm, "norm");
    *norm = bgk::resolvent_norm(op->bundle, bgk::cplx(re_z, im_z));
  });
}

BGK_API int bgk_operator_propagate(const bgk_operator* op, const double* x, double t, double* y) {
  return guard([&] {
    need(op, "op");
    need(x, "x");
    need(y, "y");
    const auto n = op->bundle.size();
    Eigen::Map<const Eigen::VectorXd> in(x, n);
    Eigen::Map<Eigen::VectorXd>(y, n) = bgk::propagate(op->bundle.P, in, t);
  });
}

BGK_API int bgk_operator_maxwellian(const bgk_operator* op, double* out) {
  return guard([&] {
    need(op, "op");
    need(out, "out");
    Eigen::VectorXd m = bgk::build_maxwellian(op->bundle.potential, op->bundle.grid);
    Eigen::Map<Eigen::VectorXd>(out, m.size()) = m;
  });
}

BGK_API void bgk_string_free(char* s) { delete[] s; }

}  // extern "C"
