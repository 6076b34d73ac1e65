#include <bgk/bgk.h>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config_path;
  std::string out;
  std::string preset;
  std::vector<double> h;
  long long seed = -1;
  int N = 0;
  int K = 0;
  bool quiet = false;
};

int report(int status, const char* what) {
  std::fprintf(stderr, "bgk: %s: %s (%s)\n", what, bgk_last_error(), bgk_status_name(status));
  return kExitUsage;
}

int execute(const Options& o, const std::string& experiment) {
  bgk_config* cfg = nullptr;
  int st = o.config_path.empty() ? bgk_config_default(&cfg) : bgk_config_from_file(o.config_path.c_str(), &cfg);
  if (st != BGK_OK) return report(st, "config");

  auto finish = [&](int code) {
    bgk_config_free(cfg);
    return code;
  };
  if (!o.preset.empty() && (st = bgk_config_set_preset(cfg, o.preset.c_str())) != BGK_OK)
    return finish(report(st, "--preset"));
  if (!o.h.empty() && (st = bgk_config_set_h_values(cfg, o.h.data(), o.h.size())) != BGK_OK)
    return finish(report(st, "--h"));
  if (o.seed >= 0 && (st = bgk_config_set_seed(cfg, static_cast<uint64_t>(o.seed))) != BGK_OK)
    return finish(report(st, "--seed"));
  if (o.N > 0 || o.K > 0) {
    int N = 0, K = 0;
    bgk_config_grid(cfg, &N, &K);
    if ((st = bgk_config_set_grid(cfg, o.N > 0 ? o.N : N, o.K > 0 ? o.K : K)) != BGK_OK)
      return finish(report(st, "grid"));
  }
  if (!o.out.empty() && (st = bgk_config_set_output_dir(cfg, o.out.c_str())) != BGK_OK)
    return finish(report(st, "--out"));
  if (experiment != "config") {
    const char* name = experiment.c_str();
    if ((st = bgk_config_set_experiments(cfg, &name, 1)) != BGK_OK) return finish(report(st, "experiments"));
  }

  bgk_result* res = nullptr;
  if ((st = bgk_run(cfg, &res)) != BGK_OK) return finish(report(st, "run"));
  const char* dir = nullptr;
  bgk_config_output_dir(cfg, &dir);
  if ((st = bgk_result_write(res, dir)) != BGK_OK) {
    bgk_result_free(res);
    return finish(report(st, "write"));
  }

  size_t n = 0, n_err = 0;
  bgk_result_check_count(res, &n);
  bgk_result_error_count(res, &n_err);
  size_t failed = 0;
  for (size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    double h = 0, value = 0, threshold = 0;
    int passed = 0;
    bgk_result_check(res, i, &name, &h, &passed, &value, &threshold);
    if (!passed) ++failed;
    if (o.quiet && passed) continue;
    if (std::isnan(h))
      std::printf("%s  %-28s         value=%.6g threshold=%.6g\n", passed ? "PASS" : "FAIL", name, value, threshold);
    else
      std::printf("%s  %-28s h=%-6g value=%.6g threshold=%.6g\n", passed ? "PASS" : "FAIL", name, h, value,
                  threshold);
  }
  for (size_t i = 0; i < n_err; ++i) {
    const char* msg = nullptr;
    bgk_result_error(res, i, &msg);
    std::printf("ERROR %s\n", msg);
  }
  int ok = 0;
  bgk_result_passed(res, &ok);
  std::printf("%zu checks, %zu failed, %zu errors; report in %s\n", n, failed, n_err, dir);
  bgk_result_free(res);
  return finish(ok ? 0 : kExitChecksFailed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral certification experiments for the semiclassical BGK operator"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(0, 1);
  Options o;
  app.add_option("--config", o.config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--seed", o.seed, "seed for Krylov start vectors")->check(CLI::NonNegativeNumber);
  app.add_option("--h", o.h, "comma-separated semiclassical parameters")->delimiter(',');
  app.add_option("--preset", o.preset, "harmonic, double_well or tilted_double_well");
  app.add_option("--N", o.N, "position grid points")->check(CLI::PositiveNumber);
  app.add_option("--K", o.K, "velocity Hermite modes")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", o.quiet, "print failing checks only");

  const std::vector<std::pair<const char*, const char*>> subs{
      {"spectrum", "small eigenvalue cluster, projector and scaling bridge"},
      {"resolvent", "resolvent norm sweep around the cluster"},
      {"hypo", "hypocoercivity certificate on the quasimode complement"},
      {"witten", "low spectrum of the Witten Laplacian"},
      {"ptsym", "conjugation identity residual"},
      {"semigroup", "semigroup decay and decomposition"},
      {"metastable", "well-mass dynamics from the shallow well"},
      {"all", "every experiment"},
  };
  for (const auto& [name, help] : subs) app.add_subcommand(name, help)->fallthrough();

  CLI11_PARSE(app, argc, argv);
  std::string experiment = "config";
  for (auto* s : app.get_subcommands()) experiment = s->get_name();
  return execute(o, experiment);
}
