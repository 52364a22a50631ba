#ifndef SEIRDMON_SEIRDMON_H
#define SEIRDMON_SEIRDMON_H

#include <stddef.h>
#include <stdint.h>

#if defined(SEIRDMON_BUILDING)
#define SEIRDMON_API __attribute__((visibility("default")))
#else
#define SEIRDMON_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum seirdmon_status {
    SEIRDMON_OK = 0,
    SEIRDMON_ERR_INVALID_ARGUMENT = 1,
    SEIRDMON_ERR_NOT_FOUND = 2,
    SEIRDMON_ERR_FORMAT = 3,
    SEIRDMON_ERR_DATA_INTEGRITY = 4,
    SEIRDMON_ERR_IO = 5,
    SEIRDMON_ERR_DOMAIN = 6,
    SEIRDMON_ERR_INTEGRATION = 7,
    SEIRDMON_ERR_DEPLETION = 8,
    SEIRDMON_ERR_SINGULAR_COVARIANCE = 9,
    SEIRDMON_ERR_UNDEFINED_METRIC = 10,
    SEIRDMON_ERR_DIMENSION = 11,
    SEIRDMON_ERR_BUFFER_TOO_SMALL = 12,
    SEIRDMON_ERR_INTERNAL = 13
} seirdmon_status;

SEIRDMON_API const char* seirdmon_version(void);
SEIRDMON_API const char* seirdmon_status_string(seirdmon_status status);

/* Message of the most recent failure on the calling thread ("" if none). */
SEIRDMON_API const char* seirdmon_last_error(void);

typedef struct seirdmon_params {
    double alpha, beta, gamma, eta;
} seirdmon_params;

typedef struct seirdmon_state {
    double s, e, i, r, d;
} seirdmon_state;

typedef struct seirdmon_observation {
    int64_t day, infected, recovered, deaths;
} seirdmon_observation;

/* ---- run configuration ---- */

typedef struct seirdmon_config seirdmon_config;

SEIRDMON_API seirdmon_status seirdmon_config_create(seirdmon_config** out);
SEIRDMON_API void seirdmon_config_destroy(seirdmon_config* cfg);

SEIRDMON_API size_t seirdmon_config_key_count(void);
SEIRDMON_API const char* seirdmon_config_key(size_t index);
SEIRDMON_API const char* seirdmon_config_key_help(size_t index);

SEIRDMON_API seirdmon_status seirdmon_config_set(seirdmon_config* cfg, const char* key, const char* value);

/* Copies the value with its terminator into buf. *needed (optional) receives
   the required size; returns SEIRDMON_ERR_BUFFER_TOO_SMALL if it exceeds len. */
SEIRDMON_API seirdmon_status seirdmon_config_get(const seirdmon_config* cfg, const char* key, char* buf, size_t len,
                                                 size_t* needed);

SEIRDMON_API seirdmon_status seirdmon_config_load_file(seirdmon_config* cfg, const char* path);
SEIRDMON_API seirdmon_status seirdmon_config_validate(const seirdmon_config* cfg);

/* ---- pipeline stages; files go under the configured output directory ---- */

typedef void (*seirdmon_log_fn)(const char* line, void* user);

typedef struct seirdmon_report {
    double pseudo_r2;
    double coverage;
    size_t signal_count;
} seirdmon_report;

SEIRDMON_API seirdmon_status seirdmon_run_ingest(const seirdmon_config* cfg, seirdmon_log_fn log, void* user);
SEIRDMON_API seirdmon_status seirdmon_run_simulate(const seirdmon_config* cfg, seirdmon_log_fn log, void* user);
SEIRDMON_API seirdmon_status seirdmon_run_fit(const seirdmon_config* cfg, seirdmon_log_fn log, void* user);
SEIRDMON_API seirdmon_status seirdmon_run_monitor(const seirdmon_config* cfg, seirdmon_log_fn log, void* user);
SEIRDMON_API seirdmon_status seirdmon_run_report(const seirdmon_config* cfg, seirdmon_log_fn log, void* user,
                                                 seirdmon_report* out);

/* ---- streaming particle filter ---- */

typedef struct seirdmon_filter seirdmon_filter;

/* Sizes, priors, kernel, seed and initial state come from cfg; day 0 is the
   initial day and each step consumes the next day's observation. */
SEIRDMON_API seirdmon_status seirdmon_filter_create(const seirdmon_config* cfg, seirdmon_filter** out);
SEIRDMON_API void seirdmon_filter_destroy(seirdmon_filter* f);
SEIRDMON_API seirdmon_status seirdmon_filter_step(seirdmon_filter* f, const seirdmon_observation* obs, double* ess);
SEIRDMON_API int64_t seirdmon_filter_day(const seirdmon_filter* f);
SEIRDMON_API size_t seirdmon_filter_sample_count(const seirdmon_filter* f);
SEIRDMON_API seirdmon_status seirdmon_filter_samples(const seirdmon_filter* f, seirdmon_params* out, size_t capacity);

/* ---- MEWMA chart ---- */

typedef struct seirdmon_monitor seirdmon_monitor;

SEIRDMON_API seirdmon_status seirdmon_monitor_create(double lambda, double limit, seirdmon_monitor** out);
SEIRDMON_API void seirdmon_monitor_destroy(seirdmon_monitor* m);

/* *has_record is 0 for the first pushed day, which only seeds the differences. */
SEIRDMON_API seirdmon_status seirdmon_monitor_push(seirdmon_monitor* m, int64_t day, const seirdmon_params* samples,
                                                   size_t count, int* has_record, double* t2, int* signaled);

/* ---- numerics ---- */

SEIRDMON_API seirdmon_status seirdmon_chi_square_quantile(double p, double dof, double* out);
SEIRDMON_API seirdmon_status seirdmon_r0(const seirdmon_params* p, double* out);
SEIRDMON_API seirdmon_status seirdmon_poisson_logpmf(int64_t k, double lambda, double* out);
SEIRDMON_API seirdmon_status seirdmon_integrate_day(const seirdmon_state* in, const seirdmon_params* p, int substeps,
                                                    seirdmon_state* out);

#ifdef __cplusplus
}
#endif

#endif
