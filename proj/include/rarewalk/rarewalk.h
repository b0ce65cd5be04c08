#ifndef RAREWALK_RAREWALK_H
#define RAREWALK_RAREWALK_H

#include <stddef.h>
#include <stdint.h>

#if defined(RW_BUILDING_LIBRARY)
#define RW_API __attribute__((visibility("default")))
#else
#define RW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rw_status {
  RW_OK = 0,
  RW_ERR_INVALID_ARGUMENT = 1,
  RW_ERR_DIMENSION = 2,
  RW_ERR_DOMAIN = 3,
  RW_ERR_NOT_CONVERGED = 4,
  RW_ERR_UNSUPPORTED = 5,
  RW_ERR_LIMIT = 6,
  RW_ERR_PARSE = 7,
  RW_ERR_INTERNAL = 99
} rw_status;

typedef struct rw_model rw_model;
typedef struct rw_proposal rw_proposal;

/* Message of the last failing call on this thread; never NULL. */
RW_API const char* rw_last_error(void);
RW_API const char* rw_version(void);
/* Releases strings returned through char** out parameters. */
RW_API void rw_free_string(char* s);

/* Configuration: validates a config file and returns the normalized
   document (paper-scale patch applied, defaults filled in). */
RW_API rw_status rw_config_load(const char* path, int paper_scale, char** out_json);

/* Models. spec_json: see README, "Model specification". */
RW_API rw_status rw_model_create(const char* spec_json, rw_model** out);
RW_API void rw_model_destroy(rw_model* m);
RW_API rw_status rw_model_dim(const rw_model* m, int* out);
RW_API rw_status rw_model_cgf(const rw_model* m, const double* theta, int d, double* out);
RW_API rw_status rw_model_grad(const rw_model* m, const double* theta, int d, double* out);
/* Positive root of t -> cgf(t e_k). */
RW_API rw_status rw_model_marginal_root(const rw_model* m, int k, double* out);
RW_API rw_status rw_model_describe(const rw_model* m, char** out_json);
/* Support function of {cgf <= 0} at x (normal models only). */
RW_API rw_status rw_rate_function(const rw_model* m, const double* x, int d, double* out);

/* Regions. problem_json: {"kind":"siegmund","ell":..,"u":..} | {"kind":"gap","m":..} |
   {"kind":"sum_intersection","L":..}. Index sets are 0-based. */
RW_API rw_status rw_classify_state(const char* problem_json, const double* x, int d, double b, int* stopped,
                                   int* rare, char** out_label);
RW_API rw_status rw_support_value(const char* problem_json, const double* theta, int d, const int* set, int n,
                                  double* out);
RW_API rw_status rw_rearrangement_min(const double* theta, int d, int L, double* out);

/* Tilt solver. request: {"problem":{..},"op":"beta"|"gamma"|"gamma_pair"|"gap_pair"|"gap_quad"|"si_zA"|"si_sB",
   "index":[..],"path":"auto"|"faces"|"nested"|"active_set"|"homogeneous","symmetry":true}. */
RW_API rw_status rw_solve(const rw_model* m, const char* request_json, char** out_json);
/* request: {"problem":{..},"set":[..],"gamma":[..],"witness":[..]}. */
RW_API rw_status rw_v_lower_bound(const rw_model* m, const char* request_json, char** out_json);

/* Proposals. request: {"problem":{..},"variant":"theta0"|"theta1"|"theta2"|"theta_si","cap":n,"workers":n}.
   out_json receives {"manifest":..,"solutions":[..]}; may be NULL. */
RW_API rw_status rw_proposal_build(const rw_model* m, const char* request_json, rw_proposal** out, char** out_json);
RW_API rw_status rw_proposal_load(const rw_model* m, const char* manifest_json, rw_proposal** out);
RW_API void rw_proposal_destroy(rw_proposal* p);
RW_API rw_status rw_proposal_size(const rw_proposal* p, size_t* out);
RW_API rw_status rw_proposal_manifest(const rw_proposal* p, char** out_json);

/* Sufficient conditions. request: {"problem":{..},"condition":"H1"|"H2"|"H1'"|"H2'"|"H-SI"|"direct","workers":n}. */
RW_API rw_status rw_check(const rw_model* m, const char* request_json, char** out_json);

/* Simulation. run: {"b":x,"n_paths":n,"seed":s,"workers":w,"max_steps":k}. */
RW_API rw_status rw_estimate(const rw_model* m, const rw_proposal* p, const char* run_json, char** out_json);
RW_API rw_status rw_plain_mc(const rw_model* m, const char* problem_json, const char* run_json, char** out_json);
/* run with "b":[ascending grid]; result holds rows, csv and the fitted slope. */
RW_API rw_status rw_decay_scan(const rw_model* m, const rw_proposal* p, const char* run_json, char** out_json);

/* Experiments: table / sweep sections of a config. */
RW_API rw_status rw_table(const char* spec_json, int workers, char** out_json);
RW_API rw_status rw_sweep(const char* spec_json, int workers, char** out_json);
/* Number of tilts an efficient mixture needs for the modified Siegmund problem. */
RW_API rw_status rw_modified_siegmund_count(int d, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
