#include "qms/qms.h"

#include "qms/calibration.hpp"
#include "qms/checks.hpp"
#include "qms/config.hpp"
#include "qms/error.hpp"
#include "qms/gaussian.hpp"
#include "qms/log.hpp"
#include "qms/sweep.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

struct qms_config {
  qms::RunConfig config;
};

struct qms_sweep {
  qms::RunConfig config;
  std::vector<qms::SweepRow> rows;
};

struct qms_compass {
  qms::DirectionEstimate estimate;
};

namespace {

thread_local std::string g_last_error;

qms_status status_of(qms::ErrorCode code) {
  using qms::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return QMS_ERR_INVALID_ARGUMENT;
    case ErrorCode::SymmetryViolation: return QMS_ERR_SYMMETRY;
    case ErrorCode::Unphysical: return QMS_ERR_UNPHYSICAL;
    case ErrorCode::SolverFailure: return QMS_ERR_SOLVER;
    case ErrorCode::Unstable: return QMS_ERR_UNSTABLE;
    case ErrorCode::NumericalFailure: return QMS_ERR_NUMERICAL;
    case ErrorCode::Resonance: return QMS_ERR_RESONANCE;
    case ErrorCode::Inconsistency: return QMS_ERR_INCONSISTENCY;
    case ErrorCode::Config: return QMS_ERR_CONFIG;
    case ErrorCode::Io: return QMS_ERR_IO;
  }
  return QMS_ERR_INTERNAL;
}

qms_status fail(qms_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class Fn>
qms_status guarded(Fn&& fn) {
  try {
    fn();
    return QMS_OK;
  } catch (const qms::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QMS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QMS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QMS_ERR_INTERNAL, "unknown error");
  }
}

#define QMS_REQUIRE(cond, what) \
  if (!(cond)) return fail(QMS_ERR_INVALID_ARGUMENT, what)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

qms::CovarianceMatrix cov4_from(const double* cov) {
  Eigen::MatrixXd m(4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = cov[r * 4 + c];
  }
  return qms::CovarianceMatrix(m);
}

void write_text(const char* path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw qms::Error(qms::ErrorCode::Io, std::string("cannot open ") + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw qms::Error(qms::ErrorCode::Io, std::string("write to ") + path + " failed");
}

}  // namespace

extern "C" {

const char* qms_version(void) { return "1.0.0"; }

const char* qms_status_name(qms_status status) {
  switch (status) {
    case QMS_OK: return "ok";
    case QMS_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case QMS_ERR_CONFIG: return "config_error";
    case QMS_ERR_IO: return "io_error";
    case QMS_ERR_SOLVER: return "solver_failure";
    case QMS_ERR_UNSTABLE: return "unstable";
    case QMS_ERR_NUMERICAL: return "numerical_failure";
    case QMS_ERR_RESONANCE: return "resonance";
    case QMS_ERR_INCONSISTENCY: return "inconsistency";
    case QMS_ERR_UNPHYSICAL: return "unphysical";
    case QMS_ERR_SYMMETRY: return "symmetry_violation";
    case QMS_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* qms_last_error(void) { return g_last_error.c_str(); }

void qms_set_log_level(qms_log_level level) {
  qms::set_log_level(static_cast<qms::LogLevel>(level));
}

qms_status qms_config_default(qms_config** out) {
  QMS_REQUIRE(out, "out is NULL");
  return guarded([&] { *out = new qms_config{qms::RunConfig{}}; });
}

qms_status qms_config_load(const char* path, qms_config** out) {
  QMS_REQUIRE(path && out, "path or out is NULL");
  return guarded([&] { *out = new qms_config{qms::load_config(path)}; });
}

qms_status qms_config_parse(const char* json, const char* base_dir, qms_config** out) {
  QMS_REQUIRE(json && out, "json or out is NULL");
  return guarded([&] {
    *out = new qms_config{qms::parse_config(json, base_dir ? std::filesystem::path(base_dir) : std::filesystem::path())};
  });
}

void qms_config_free(qms_config* config) { delete config; }

qms_status qms_config_to_json(const qms_config* config, char** out) {
  QMS_REQUIRE(config && out, "config or out is NULL");
  return guarded([&] { *out = dup_string(qms::serialize_config(config->config)); });
}

qms_status qms_config_set_param(qms_config* config, const char* name, double value) {
  QMS_REQUIRE(config && name, "config or name is NULL");
  return guarded([&] {
    qms::PhysicalParams p = config->config.params;
    std::ostringstream doc;
    doc.precision(17);
    doc << "{\"" << name << "\": " << value << "}";
    qms::apply_params_json(doc.str(), p);
    qms::RunConfig trial = config->config;
    trial.params = p;
    trial.validate();
    config->config = std::move(trial);
  });
}

qms_status qms_config_get_param(const qms_config* config, const char* name, double* out) {
  QMS_REQUIRE(config && name && out, "config, name or out is NULL");
  return guarded([&] {
    const auto doc = nlohmann::json::parse(qms::serialize_config(config->config));
    const auto& params = doc.at("params");
    if (!params.contains(name) || !params.at(name).is_number()) {
      throw qms::Error(qms::ErrorCode::Config, std::string("/params/") + name + ": unknown numeric parameter");
    }
    *out = params.at(name).get<double>();
  });
}

qms_status qms_config_set_field(qms_config* config, double v_h1, double v_h2) {
  QMS_REQUIRE(config, "config is NULL");
  return guarded([&] {
    qms::RunConfig trial = config->config;
    trial.field.v_h1 = v_h1;
    trial.field.v_h2 = v_h2;
    trial.validate();
    config->config = std::move(trial);
  });
}

qms_mode qms_config_mode(const qms_config* config) {
  return config && config->config.mode == qms::RunMode::Compass ? QMS_MODE_COMPASS : QMS_MODE_SWEEP;
}

const char* qms_config_output(const qms_config* config) { return config ? config->config.output.c_str() : ""; }
uint64_t qms_config_seed(const qms_config* config) { return config ? config->config.seed : 0; }
int qms_config_threads(const qms_config* config) { return config ? config->config.threads : 0; }

void qms_string_free(char* s) { std::free(s); }

qms_status qms_sweep_run(const qms_config* config, int threads, qms_sweep** out) {
  QMS_REQUIRE(config && out, "config or out is NULL");
  return guarded([&] {
    auto rows = qms::run_sweep(config->config, threads);
    *out = new qms_sweep{config->config, std::move(rows)};
  });
}

size_t qms_sweep_row_count(const qms_sweep* sweep) { return sweep ? sweep->rows.size() : 0; }

qms_status qms_sweep_get_row(const qms_sweep* sweep, size_t index, qms_sweep_row* out) {
  QMS_REQUIRE(sweep && out, "sweep or out is NULL");
  QMS_REQUIRE(index < sweep->rows.size(), "row index out of range");
  const qms::SweepRow& r = sweep->rows[index];
  *out = qms_sweep_row{r.value,  r.detuning_ratio, r.lambda, r.entangled ? 1 : 0, r.stable ? 1 : 0,
                       r.fp_residual, r.det_a, r.det_b, r.det_c, r.lyapunov_residual, r.status.c_str()};
  return QMS_OK;
}

qms_status qms_sweep_write_csv(const qms_sweep* sweep, const char* path) {
  QMS_REQUIRE(sweep && path, "sweep or path is NULL");
  return guarded([&] { qms::write_sweep_csv(std::filesystem::path(path), sweep->config, sweep->rows); });
}

void qms_sweep_free(qms_sweep* sweep) { delete sweep; }

qms_status qms_compass_run(const qms_config* config, int threads, qms_compass** out) {
  QMS_REQUIRE(config && out, "config or out is NULL");
  return guarded([&] { *out = new qms_compass{qms::run_compass(config->config, threads)}; });
}

qms_status qms_compass_get_summary(const qms_compass* compass, qms_compass_summary* out) {
  QMS_REQUIRE(compass && out, "compass or out is NULL");
  const auto& e = compass->estimate;
  *out = qms_compass_summary{e.detected ? 1 : 0, e.angle, e.effective_width, e.entangled_pairs.size(),
                             e.pairs.size()};
  return QMS_OK;
}

qms_status qms_compass_write_csv(const qms_compass* compass, const char* path) {
  QMS_REQUIRE(compass && path, "compass or path is NULL");
  return guarded([&] { qms::write_compass_csv(std::filesystem::path(path), compass->estimate); });
}

void qms_compass_free(qms_compass* compass) { delete compass; }

qms_status qms_calibrate(const qms_config* config, int threads, const char* json_path, const char* log_path,
                         qms_calibration_summary* out) {
  QMS_REQUIRE(config && json_path, "config or json_path is NULL");
  return guarded([&] {
    qms::CalibrationOptions opts;
    opts.threads = threads < 0 ? config->config.threads : threads;
    opts.normalization = config->config.normalization;
    opts.field = config->config.field;
    std::ostringstream log;
    const qms::CalibrationResult r = qms::calibrate(config->config.params, opts, &log);
    write_text(json_path, qms::calibration_json(r));
    if (log_path) write_text(log_path, log.str());
    if (out) {
      *out = qms_calibration_summary{r.params.e_c, r.params.e_omega, r.params.e_p0, r.best.g_int,
                                     r.best.min_lambda, r.entangling_point_found ? 1 : 0};
    }
  });
}

qms_status qms_check_run(const qms_config* config, uint64_t seed, int threads, qms_check_callback callback,
                         void* user, int* failures) {
  QMS_REQUIRE(config, "config is NULL");
  return guarded([&] {
    const auto results = qms::run_checks(config->config.params, seed, threads < 0 ? config->config.threads : threads);
    int failed = 0;
    for (const auto& r : results) {
      if (!r.passed) ++failed;
      if (callback) callback(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
    }
    if (failures) *failures = failed;
  });
}

qms_status qms_sph_lambda(const double cov[16], double* lambda, int* entangled) {
  QMS_REQUIRE(cov && lambda, "cov or lambda is NULL");
  return guarded([&] {
    const qms::SphResult r = qms::sph_lambda(qms::split_blocks(cov4_from(cov)));
    *lambda = r.lambda;
    if (entangled) *entangled = r.entangled ? 1 : 0;
  });
}

qms_status qms_ppt_entangled(const double cov[16], int* entangled) {
  QMS_REQUIRE(cov && entangled, "cov or entangled is NULL");
  return guarded([&] { *entangled = qms::ppt_oracle(cov4_from(cov)) ? 1 : 0; });
}

qms_status qms_mc_entanglement(const qms_config* config, double v_h1, double v_h2, double detuning_ratio,
                               double* lambda, int* entangled) {
  QMS_REQUIRE(config && lambda, "config or lambda is NULL");
  return guarded([&] {
    const qms::RunConfig& c = config->config;
    qms::PhysicalParams p = c.params;
    const qms::FieldCoefficients field(v_h1, v_h2);
    qms::apply_detuning(p, detuning_ratio, c.normalization, qms::hall_to_varactor(field.v_h1, p),
                        qms::hall_to_varactor(field.v_h2, p));
    const qms::SphResult r = qms::mc_entanglement(p, field);
    *lambda = r.lambda;
    if (entangled) *entangled = r.entangled ? 1 : 0;
  });
}

}  // extern "C"
