// Command-line front end. Talks to the library only through the C API.
#include "qms/qms.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>

namespace {

enum Exit { kOk = 0, kConfigError = 1, kNumericalError = 2, kIoError = 3 };

int exit_code(qms_status s) {
  switch (s) {
    case QMS_OK: return kOk;
    case QMS_ERR_CONFIG:
    case QMS_ERR_INVALID_ARGUMENT: return kConfigError;
    case QMS_ERR_IO: return kIoError;
    default: return kNumericalError;
  }
}

int report(qms_status s) {
  std::fprintf(stderr, "qms: %s: %s\n", qms_status_name(s), qms_last_error());
  return exit_code(s);
}

struct Options {
  std::string config;
  std::string out;
  int threads = -1;
  std::int64_t seed = -1;
  bool verbose = false;
};

// Loads --config, or the built-in defaults when none was given.
qms_status open_config(const Options& o, qms_config** cfg) {
  return o.config.empty() ? qms_config_default(cfg) : qms_config_load(o.config.c_str(), cfg);
}

class ConfigHandle {
 public:
  ~ConfigHandle() { qms_config_free(ptr); }
  qms_config* ptr = nullptr;
};

int cmd_sweep(const Options& o) {
  ConfigHandle cfg;
  if (qms_status s = open_config(o, &cfg.ptr)) return report(s);
  std::string out = o.out.empty() ? qms_config_output(cfg.ptr) : o.out;
  if (out.empty() || out == "-") out = "/dev/stdout";

  qms_sweep* sweep = nullptr;
  if (qms_status s = qms_sweep_run(cfg.ptr, o.threads, &sweep)) return report(s);
  qms_status s = qms_sweep_write_csv(sweep, out.c_str());
  size_t failed = 0, entangled = 0;
  const size_t n = qms_sweep_row_count(sweep);
  for (size_t k = 0; k < n; ++k) {
    qms_sweep_row row;
    qms_sweep_get_row(sweep, k, &row);
    if (std::string(row.status) != "ok") ++failed;
    if (row.entangled) ++entangled;
  }
  qms_sweep_free(sweep);
  if (s) return report(s);
  std::fprintf(stderr, "qms: %zu points, %zu entangled, %zu failed\n", n, entangled, failed);
  return kOk;
}

int cmd_compass(const Options& o) {
  ConfigHandle cfg;
  if (qms_status s = open_config(o, &cfg.ptr)) return report(s);
  qms_compass* compass = nullptr;
  if (qms_status s = qms_compass_run(cfg.ptr, o.threads, &compass)) return report(s);
  qms_compass_summary sum;
  qms_compass_get_summary(compass, &sum);
  std::string out = o.out.empty() ? qms_config_output(cfg.ptr) : o.out;
  qms_status s = out.empty() ? QMS_OK : qms_compass_write_csv(compass, out.c_str());
  qms_compass_free(compass);
  if (s) return report(s);
  constexpr double kDeg = 57.29577951308232;
  if (sum.detected) {
    std::printf("detected: yes\nangle_deg: %.6f\neffective_width_deg: %.6f\nentangled_pairs: %zu/%zu\n",
                sum.angle * kDeg, sum.effective_width * kDeg, sum.entangled_pairs, sum.pair_count);
  } else {
    std::printf("detected: no\nentangled_pairs: 0/%zu\n", sum.pair_count);
  }
  return kOk;
}

int cmd_calibrate(const Options& o) {
  ConfigHandle cfg;
  if (qms_status s = open_config(o, &cfg.ptr)) return report(s);
  const std::filesystem::path json = o.out.empty() ? std::filesystem::path("data/calibration.json") : std::filesystem::path(o.out);
  const std::filesystem::path log = json.parent_path() / "calibration_search.log";
  qms_calibration_summary sum;
  if (qms_status s = qms_calibrate(cfg.ptr, o.threads, json.c_str(), log.c_str(), &sum)) return report(s);
  std::printf("e_c: %.17g\ne_omega: %.17g\ne_p0: %.17g\ng_int: %.17g\nmin_lambda: %.17g\nentangling_point_found: %s\n",
              sum.e_c, sum.e_omega, sum.e_p0, sum.g_int, sum.min_lambda,
              sum.entangling_point_found ? "true" : "false");
  std::printf("wrote %s and %s\n", json.c_str(), log.c_str());
  return kOk;
}

void print_check(const char* name, int passed, const char* detail, void*) {
  std::printf("%-30s %s  %s\n", name, passed ? "ok  " : "FAIL", detail);
}

int cmd_check(const Options& o) {
  ConfigHandle cfg;
  if (qms_status s = open_config(o, &cfg.ptr)) return report(s);
  const std::uint64_t seed = o.seed >= 0 ? static_cast<std::uint64_t>(o.seed) : qms_config_seed(cfg.ptr);
  int failures = 0;
  if (qms_status s = qms_check_run(cfg.ptr, seed, o.threads, print_check, nullptr, &failures)) return report(s);
  std::printf("%d check(s) failed\n", failures);
  return failures == 0 ? kOk : kNumericalError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement-based magnetic field sensor simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qms_version()));

  Options opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON run configuration");
    sub->add_option("--out", opts.out, "output path");
    sub->add_option("--threads", opts.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", opts.seed, "random seed for the check suite")->check(CLI::NonNegativeNumber);
    sub->add_flag("-v,--verbose", opts.verbose, "log progress to stderr");
  };
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep and write CSV");
  CLI::App* compass = app.add_subcommand("compass", "estimate a field direction with a sensor ring");
  CLI::App* calibrate = app.add_subcommand("calibrate", "search drive amplitudes and write the calibration file");
  CLI::App* check = app.add_subcommand("check", "run the invariant suite");
  for (CLI::App* sub : {sweep, compass, calibrate, check}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  qms_set_log_level(opts.verbose ? QMS_LOG_INFO : QMS_LOG_WARNING);

  if (*sweep) return cmd_sweep(opts);
  if (*compass) return cmd_compass(opts);
  if (*calibrate) return cmd_calibrate(opts);
  return cmd_check(opts);
}
