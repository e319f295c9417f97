/* C API for the qtherm monitored-qubit thermodynamics simulator.
 *
 * Opaque-handle, error-code interface for the shared library. All run
 * functions write their CSV/JSON outputs under the given directory. On
 * failure they return a nonzero status; qtherm_last_error() returns a
 * thread-local description of the most recent failure.
 */
#ifndef QTHERM_C_H
#define QTHERM_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QTHERM_API __declspec(dllexport)
#else
#define QTHERM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct qtherm_config qtherm_config;

typedef enum qtherm_status {
    QTHERM_OK = 0,
    QTHERM_ERR_IO = 1,
    QTHERM_ERR_CONFIG = 2,
    QTHERM_ERR_DOMAIN = 3,
    QTHERM_ERR_RUNTIME = 4
} qtherm_status;

QTHERM_API const char* qtherm_version(void);

/* Thread-local message from the last failing call in this thread. */
QTHERM_API const char* qtherm_last_error(void);

/* Configuration: flat JSON object, strict schema. */
QTHERM_API qtherm_status qtherm_config_create(qtherm_config** out);
QTHERM_API qtherm_status qtherm_config_load(const char* path, qtherm_config** out);
QTHERM_API qtherm_status qtherm_config_from_json(const char* json_text, qtherm_config** out);
/* Merge a flat JSON fragment of overrides into an existing config. */
QTHERM_API qtherm_status qtherm_config_merge_json(qtherm_config* cfg, const char* json_text);
/* Resolved config echo as JSON; caller frees with qtherm_string_free. */
QTHERM_API qtherm_status qtherm_config_to_json(const qtherm_config* cfg, char** out_json);
QTHERM_API void qtherm_config_free(qtherm_config* cfg);
QTHERM_API void qtherm_string_free(char* s);

/* Gamma_d = 16 chi^2 nbar / kappa, angular rates. Returns status. */
QTHERM_API qtherm_status qtherm_measurement_rate(double chi, double kappa, double nbar, double* out);

/* Subcommand drivers. */
QTHERM_API qtherm_status qtherm_run_simulate(const qtherm_config* cfg, const char* out_dir);
QTHERM_API qtherm_status qtherm_run_ft_check(const qtherm_config* cfg, const char* out_dir);
QTHERM_API qtherm_status qtherm_run_histogram(const qtherm_config* cfg, double time_us, int bins,
                                              const char* out_dir);
QTHERM_API qtherm_status qtherm_run_efficacy_sweep(const qtherm_config* cfg,
                                                   const double* gamma1_over_kappa, size_t count,
                                                   const char* out_dir);
QTHERM_API qtherm_status qtherm_run_tpm(const qtherm_config* cfg, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* QTHERM_C_H */
