#ifndef BENJAMIN_BENJAMIN_H
#define BENJAMIN_BENJAMIN_H

/* C interface to the Benjamin-equation solver and I-method diagnostics.
 *
 * Every function returns a bj_status. On failure the message is available from
 * bj_last_error() on the calling thread until the next call. Handles are
 * opaque and owned by the caller; release them with the matching _free.
 * Strings returned through char** are released with bj_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BJ_API __declspec(dllexport)
#else
#define BJ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bj_status {
    BJ_OK = 0,
    BJ_INVALID_ARGUMENT = 1,
    BJ_CONFIG_ERROR = 2,
    BJ_IO_ERROR = 3,
    /* alpha4 vanished on Omega while the quartic multiplier did not */
    BJ_RESONANCE_ERROR = 4,
    /* the integrator produced non-finite or runaway values */
    BJ_BLOWUP = 5,
    BJ_INTERNAL_ERROR = 6
} bj_status;

typedef struct bj_config bj_config;
typedef struct bj_report bj_report;

/* Scan grid for bj_xnorm and bj_bilinear_scan. NULL arrays select defaults. */
typedef struct bj_scan_params {
    /* I-method exponent (bilinear scan; NaN keeps the configured value) or
     * kernel exponent s_exp (xnorm) */
    double s;
    /* Time regularity: b = 1/2 + eps (bilinear scan) or b_tilde (xnorm) */
    double b;
    const double* deltas;
    size_t n_deltas;
    /* Cutoffs N (bilinear scan) or high packet frequencies (xnorm) */
    const double* cutoffs;
    size_t n_cutoffs;
} bj_scan_params;

BJ_API const char* bj_version(void);
BJ_API const char* bj_last_error(void);
BJ_API void bj_string_free(char* s);

/* Worker threads for parallel scans. Results do not depend on this. */
BJ_API bj_status bj_set_threads(int n);

/* experiment: simulate, nscan, identity, bounds, bilinear or suite */
BJ_API bj_status bj_config_default(const char* experiment, bj_config** out);
BJ_API bj_status bj_config_load(const char* path, bj_config** out);
BJ_API bj_status bj_config_parse(const char* json, bj_config** out);
BJ_API void bj_config_free(bj_config* cfg);
BJ_API bj_status bj_config_set_seed(bj_config* cfg, uint64_t seed);
BJ_API bj_status bj_config_to_json(const bj_config* cfg, char** out);

BJ_API void bj_report_free(bj_report* r);
/* 1 when every check of the run passed */
BJ_API int bj_report_passed(const bj_report* r);
/* Human-readable lines, one per check or leg */
BJ_API const char* bj_report_summary(const bj_report* r);
BJ_API size_t bj_report_output_count(const bj_report* r);
BJ_API const char* bj_report_output(const bj_report* r, size_t i);

/* Integrates the configured data and persists the trajectory in out_dir. */
BJ_API bj_status bj_simulate(const bj_config* cfg, const char* out_dir, bj_report** out);

/* Energies and derivative identities (level 2, 3 or 4) of a stored trajectory,
 * written to out_dir/energies.csv. */
BJ_API bj_status bj_energies(const char* trajectory_dir, int level, const char* out_dir, bj_report** out);

/* Empirical constant of one pointwise bound, returned as a JSON object. */
BJ_API bj_status bj_verify(const char* lemma, uint64_t samples, uint64_t seed, double nu, double mu, double cutoff,
                           double s, char** json_out);

/* E4 increments over [0, delta] as the cutoff doubles. */
BJ_API bj_status bj_nscan(const bj_config* cfg, const char* out_dir, bj_report** out);

/* Bilinear I^s ratio for a packet at frequency 1 against packets at each
 * high frequency, on a box of length 128. */
BJ_API bj_status bj_xnorm(const bj_config* cfg, const bj_scan_params* params, const char* out_dir, bj_report** out);

/* Bilinear estimate ratio over the (N, delta) grid. */
BJ_API bj_status bj_bilinear_scan(const bj_config* cfg, const bj_scan_params* params, const char* out_dir,
                                  bj_report** out);

/* Identity suite and bound suite. */
BJ_API bj_status bj_suite(const bj_config* cfg, const char* out_dir, bj_report** out);

#ifdef __cplusplus
}
#endif

#endif
