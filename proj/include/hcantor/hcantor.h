/* C interface of the hcantor library.
 *
 * Every function returns an hc_status. On failure the message of the most
 * recent error on the calling thread is available from hc_last_error().
 * Handles are opaque and owned by the caller; release them with the
 * matching *_destroy function. Strings returned through char** outputs are
 * released with hc_string_free().
 */
#ifndef HCANTOR_H
#define HCANTOR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HC_API __declspec(dllexport)
#else
#define HC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hc_status {
  HC_OK = 0,
  HC_ERR_INVALID_ARGUMENT = 1,
  HC_ERR_STEP_LIMIT = 2,
  HC_ERR_DISCARD_LIMIT = 3,
  HC_ERR_UNDEFINED_CONDITIONAL = 4,
  HC_ERR_INSUFFICIENT_COUNTS = 5,
  HC_ERR_DEPTH_MISMATCH = 6,
  HC_ERR_COST_GUARD = 7,
  HC_ERR_IO = 8,
  HC_ERR_INTERNAL = 99
} hc_status;

typedef enum hc_sequence_kind {
  HC_SEQUENCE_CONSTANT = 0,
  HC_SEQUENCE_PERIODIC = 1,
  HC_SEQUENCE_EXPLICIT = 2
} hc_sequence_kind;

typedef enum hc_pattern {
  HC_PATTERN_ALTERNATING = 0,
  HC_PATTERN_CONSTANT_SIGN = 1
} hc_pattern;

typedef struct hc_sequence hc_sequence;
typedef struct hc_table hc_table;
typedef struct hc_config hc_config;

/* Walk-on-spheres parameters; zero absorb_epsilon selects l(depth) * 1e-3. */
typedef struct hc_wos_params {
  int depth;
  double absorb_epsilon;
  double start_radius;
  double outer_radius;
  double reentry_radius;
  uint64_t max_steps;
} hc_wos_params;

HC_API const char* hc_version(void);
HC_API const char* hc_last_error(void);
HC_API const char* hc_status_name(hc_status status);
HC_API void hc_string_free(char* s);

/* Scale sequences */
HC_API hc_status hc_sequence_create(hc_sequence_kind kind, const double* values,
                                    size_t count, hc_sequence** out);
HC_API hc_status hc_sequence_perturb(const hc_sequence* base, double delta,
                                     hc_pattern pattern, hc_sequence** out);
HC_API void hc_sequence_destroy(hc_sequence* seq);
HC_API hc_status hc_sequence_ratio(const hc_sequence* seq, int n, double* out);
HC_API hc_status hc_sequence_sidelength(const hc_sequence* seq, int n,
                                        double* out);
HC_API hc_status hc_sequence_fingerprint(const hc_sequence* seq, char** out);

/* Geometry */
HC_API hc_status hc_distance(const hc_sequence* seq, int depth, double x,
                             double y, double* out);
/* Writes the containing generation-depth word, or an empty string when the
 * point lies outside K_depth. */
HC_API hc_status hc_containing_cylinder(const hc_sequence* seq, int depth,
                                        double x, double y, char** out);
HC_API hc_status hc_dim_cantor(const hc_sequence* seq, int n_max, int window,
                               double* out);

/* Sampling */
HC_API hc_status hc_wos_defaults(const hc_sequence* seq, int depth,
                                 hc_wos_params* out);
HC_API hc_status hc_campaign_run(const hc_sequence* seq,
                                 const hc_wos_params* params, uint64_t walkers,
                                 uint64_t seed, unsigned workers,
                                 hc_table** out);
HC_API hc_status hc_oracle_run(const hc_sequence* seq, int depth,
                               uint64_t walkers, uint64_t seed,
                               unsigned workers, hc_table** out);
/* CDF of the exterior Poisson kernel in the angle offset phi from the
 * direction of the start point, for rho = |p - c| / R > 1. */
HC_API hc_status hc_exterior_kernel_cdf(double phi, double rho, double* out);

/* Cylinder measure tables */
HC_API hc_status hc_table_uniform(int depth, hc_table** out);
HC_API hc_status hc_table_load(const char* path, hc_table** out);
HC_API hc_status hc_table_save(const hc_table* table, const char* path);
HC_API void hc_table_destroy(hc_table* table);
HC_API hc_status hc_table_depth(const hc_table* table, int* out);
HC_API hc_status hc_table_n_effective(const hc_table* table, uint64_t* out);
HC_API hc_status hc_table_count(const hc_table* table, const char* word,
                                uint64_t* out);
HC_API hc_status hc_table_probability(const hc_table* table, const char* word,
                                      double* value, double* lo, double* hi);
HC_API hc_status hc_table_conditional(const hc_table* table, const char* base,
                                      const char* tail, double* out);

/* Entropy */
HC_API hc_status hc_entropy_hk(const hc_table* table, const char* base, int k,
                               double* out);
HC_API hc_status hc_delta_jk(const hc_table* table, const char* base, int j,
                             int k, double* out);
HC_API hc_status hc_entropy_dimension(const hc_table* table,
                                      const hc_sequence* seq, double* estimate,
                                      double* sigma);

/* Experiments */
HC_API hc_status hc_config_default(hc_config** out);
HC_API hc_status hc_config_parse(const char* text, hc_config** out);
HC_API hc_status hc_config_load(const char* path, hc_config** out);
HC_API void hc_config_destroy(hc_config* config);
HC_API hc_status hc_config_set_seed(hc_config* config, uint64_t seed);
HC_API hc_status hc_config_set_workers(hc_config* config, unsigned workers);
HC_API hc_status hc_config_set_output_dir(hc_config* config, const char* dir);
HC_API hc_status hc_config_set_plots(hc_config* config, int plots);
HC_API hc_status hc_config_reference(char** out);
HC_API hc_status hc_experiment_kind_valid(const char* kind);

/* Runs one experiment (sample, dims, continuity, gap, harnack, delta,
 * oracle-compare). For dims, gap, harnack and delta a non-null table_path
 * names a saved table that replaces the campaign.
 * The result is written to the configured output directory; result_json
 * receives the result document and written_paths a newline-separated list
 * of written files (either may be null). */
HC_API hc_status hc_experiment_run(const char* kind, const hc_config* config,
                                   const char* table_path, char** result_json,
                                   char** written_paths);

/* Re-renders the SVG plots of a result document into dir. */
HC_API hc_status hc_render_plots(const char* result_json, const char* dir,
                                 char** written_paths);

#ifdef __cplusplus
}
#endif

#endif /* HCANTOR_H */
