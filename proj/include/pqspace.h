/* C ABI for the pq-space library: opaque handles, integer status codes,
 * malloc'd string results. Every function returns PQS_OK (0) on success; on
 * failure pqs_last_error() holds a thread-local message. Strings returned
 * through char** out-parameters are owned by the caller and must be released
 * with pqs_string_free().
 *
 * Analysis results are serialized (CSV for tabular data, JSON for reports)
 * so the surface stays stable across core changes and binds easily from C,
 * Python ctypes, and the bundled CLI.
 */
#ifndef PQSPACE_H
#define PQSPACE_H

#if defined(_WIN32)
#define PQS_API __declspec(dllexport)
#else
#define PQS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pqs_status {
    PQS_OK = 0,
    PQS_ERR_DOMAIN = 1,      /* valid input outside an operation's range */
    PQS_ERR_INVALID = 2,     /* structural misuse */
    PQS_ERR_PARSE = 3,       /* malformed file content */
    PQS_ERR_IO = 4,          /* filesystem failure */
    PQS_ERR_INTERNAL = 5
} pqs_status;

typedef struct pqs_space pqs_space;

PQS_API const char* pqs_version(void);

/* Thread-local message for the most recent failure on this thread. */
PQS_API const char* pqs_last_error(void);

PQS_API void pqs_string_free(char* s);

/* ---- spaces ---------------------------------------------------------- */

/* rational != 0 loads entries as exact ratios (string entries like "2/3"
 * stay exact); 0 loads doubles. */
PQS_API pqs_status pqs_space_load(const char* path, int rational, pqs_space** out);
PQS_API pqs_status pqs_space_parse(const char* json_text, int rational, pqs_space** out);
PQS_API pqs_status pqs_space_save(const pqs_space* space, const char* path);
PQS_API pqs_status pqs_space_to_json(const pqs_space* space, char** out);
PQS_API pqs_status pqs_space_matrix_csv(const pqs_space* space, char** out);
PQS_API void pqs_space_free(pqs_space* space);

PQS_API int pqs_space_size(const pqs_space* space);
PQS_API int pqs_space_is_rational(const pqs_space* space);

/* is_quasimetric may be NULL; report_json may be NULL. */
PQS_API pqs_status pqs_space_validate(const pqs_space* space, int* is_quasimetric, char** report_json);
PQS_API pqs_status pqs_space_conjugate(const pqs_space* space, pqs_space** out);
PQS_API pqs_status pqs_space_associated(const pqs_space* space, pqs_space** out);
PQS_API pqs_status pqs_space_weight(const pqs_space* space, char** report_json);

/* ---- concentration ---------------------------------------------------- */

/* eps_csv: comma-separated decimals, or NULL for the auto grid (all distance
 * steps plus midpoints). threads <= 0 means all cores. curve_csv columns:
 * eps,alpha_left,alpha_right,alpha_assoc,witness_left,witness_right.
 * sandwich_json may be NULL. */
PQS_API pqs_status pqs_concentration_curve(const pqs_space* space, const char* eps_csv, int threads,
                                   char** curve_csv, char** sandwich_json);

/* Monte Carlo lower-bound curve for spaces beyond the exact cap. */
PQS_API pqs_status pqs_concentration_sampled(const pqs_space* space, const char* eps_csv,
                                     long long samples, unsigned long long seed,
                                     char** curve_csv);

/* Exact asymmetry law plus the Gamma tail bound margins. */
PQS_API pqs_status pqs_asymmetry_report(const pqs_space* space, char** report_json);

/* Ordered family diagnostics; paths array of length count. */
PQS_API pqs_status pqs_levy_report(const char* const* paths, int count, const char* eps_csv,
                           char** report_json);

/* ---- sequence similarity ---------------------------------------------- */

/* gap_json: {"gap":{"kind":"linear","gamma":0.5}} or
 * {"gap":{"kind":"affine","open":2,"gamma":0.5}}. */
PQS_API pqs_status pqs_convert(const char* matrix_path, const char* fasta_path, const char* gap_json,
                       pqs_space** out, char** validation_json);

/* Condition checks plus the phi-triangle condition on back-derived ratios. */
PQS_API pqs_status pqs_score_check(const char* matrix_path, char** report_json);

/* ---- cubes ------------------------------------------------------------- */

PQS_API pqs_status pqs_cube_space(int n, int asymmetric, pqs_space** out);
PQS_API pqs_status pqs_cube_gamma_csv(int n, char** pmf_csv);
PQS_API pqs_status pqs_cube_gamma_bounds(int n, const char* eps_csv, char** report_json);
PQS_API pqs_status pqs_cube_gamma_mc(int n, long long samples, unsigned long long seed,
                             const char* eps_csv, char** csv);
PQS_API pqs_status pqs_cube_alpha(int n, int asymmetric, const char* eps_csv, char** curve_csv,
                          char** bound_json);
PQS_API pqs_status pqs_cube_majority(int n, int asymmetric, const char* eps_csv, long long samples,
                             unsigned long long seed, char** csv);
PQS_API pqs_status pqs_cube_lln(const char* n_csv, const char* t_csv, char** report_json);

/* ---- product bounds ----------------------------------------------------- */

/* config_json: base matrix/measure, N, target_mass, u_grid, samples, seed.
 * csv columns: u,empirical,stderr,bound. */
PQS_API pqs_status pqs_talagrand_run(const char* config_json, char** csv);

#ifdef __cplusplus
}
#endif

#endif /* PQSPACE_H */
