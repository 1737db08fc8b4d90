#ifndef QMS_QMS_H
#define QMS_QMS_H

/* C interface of the quantum magnetic sensor library. Every function that can
 * fail returns a qms_status; on failure qms_last_error() describes the error
 * for the calling thread until the next failing call. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(QMS_BUILDING_LIBRARY)
#    define QMS_API __declspec(dllexport)
#  else
#    define QMS_API __declspec(dllimport)
#  endif
#else
#  define QMS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qms_status {
  QMS_OK = 0,
  QMS_ERR_INVALID_ARGUMENT = 1,
  QMS_ERR_CONFIG = 2,
  QMS_ERR_IO = 3,
  QMS_ERR_SOLVER = 4,
  QMS_ERR_UNSTABLE = 5,
  QMS_ERR_NUMERICAL = 6,
  QMS_ERR_RESONANCE = 7,
  QMS_ERR_INCONSISTENCY = 8,
  QMS_ERR_UNPHYSICAL = 9,
  QMS_ERR_SYMMETRY = 10,
  QMS_ERR_INTERNAL = 11
} qms_status;

typedef enum qms_log_level {
  QMS_LOG_DEBUG = 0,
  QMS_LOG_INFO = 1,
  QMS_LOG_WARNING = 2,
  QMS_LOG_ERROR = 3,
  QMS_LOG_OFF = 4
} qms_log_level;

typedef enum qms_mode { QMS_MODE_SWEEP = 0, QMS_MODE_COMPASS = 1 } qms_mode;

typedef struct qms_config qms_config;
typedef struct qms_sweep qms_sweep;
typedef struct qms_compass qms_compass;

typedef struct qms_sweep_row {
  double value;
  double detuning_ratio;
  double lambda;
  int entangled;
  int stable;
  double fp_residual;
  double det_a, det_b, det_c;
  double lyapunov_residual;
  const char *status; /* owned by the sweep handle */
} qms_sweep_row;

typedef struct qms_compass_summary {
  int detected;
  double angle;           /* radians */
  double effective_width; /* radians */
  size_t entangled_pairs;
  size_t pair_count;
} qms_compass_summary;

typedef struct qms_calibration_summary {
  double e_c;
  double e_omega;
  double e_p0;
  double g_int;
  double min_lambda;
  int entangling_point_found;
} qms_calibration_summary;

typedef void (*qms_check_callback)(const char *name, int passed, const char *detail, void *user);

QMS_API const char *qms_version(void);
QMS_API const char *qms_status_name(qms_status status);
QMS_API const char *qms_last_error(void);
QMS_API void qms_set_log_level(qms_log_level level);

/* Configuration */
QMS_API qms_status qms_config_default(qms_config **out);
QMS_API qms_status qms_config_load(const char *path, qms_config **out);
QMS_API qms_status qms_config_parse(const char *json, const char *base_dir, qms_config **out);
QMS_API void qms_config_free(qms_config *config);
QMS_API qms_status qms_config_to_json(const qms_config *config, char **out);
QMS_API qms_status qms_config_set_param(qms_config *config, const char *name, double value);
QMS_API qms_status qms_config_get_param(const qms_config *config, const char *name, double *out);
QMS_API qms_status qms_config_set_field(qms_config *config, double v_h1, double v_h2);
QMS_API qms_mode qms_config_mode(const qms_config *config);
QMS_API const char *qms_config_output(const qms_config *config);
QMS_API uint64_t qms_config_seed(const qms_config *config);
QMS_API int qms_config_threads(const qms_config *config);
QMS_API void qms_string_free(char *s);

/* Sweeps. threads < 0 uses the configured value, 0 all cores. */
QMS_API qms_status qms_sweep_run(const qms_config *config, int threads, qms_sweep **out);
QMS_API size_t qms_sweep_row_count(const qms_sweep *sweep);
QMS_API qms_status qms_sweep_get_row(const qms_sweep *sweep, size_t index, qms_sweep_row *out);
QMS_API qms_status qms_sweep_write_csv(const qms_sweep *sweep, const char *path);
QMS_API void qms_sweep_free(qms_sweep *sweep);

/* Compass */
QMS_API qms_status qms_compass_run(const qms_config *config, int threads, qms_compass **out);
QMS_API qms_status qms_compass_get_summary(const qms_compass *compass, qms_compass_summary *out);
QMS_API qms_status qms_compass_write_csv(const qms_compass *compass, const char *path);
QMS_API void qms_compass_free(qms_compass *compass);

/* Calibration: writes the overlay JSON and, when log_path is non-NULL, the search log. */
QMS_API qms_status qms_calibrate(const qms_config *config, int threads, const char *json_path,
                                 const char *log_path, qms_calibration_summary *out);

/* Invariant suite; the callback receives one call per check. */
QMS_API qms_status qms_check_run(const qms_config *config, uint64_t seed, int threads,
                                 qms_check_callback callback, void *user, int *failures);

/* Single evaluations. cov is a row-major 4x4 two-mode covariance. */
QMS_API qms_status qms_sph_lambda(const double cov[16], double *lambda, int *entangled);
QMS_API qms_status qms_ppt_entangled(const double cov[16], int *entangled);
QMS_API qms_status qms_mc_entanglement(const qms_config *config, double v_h1, double v_h2,
                                       double detuning_ratio, double *lambda, int *entangled);

#ifdef __cplusplus
}
#endif

#endif
