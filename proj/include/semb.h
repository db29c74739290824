#ifndef SEMB_H
#define SEMB_H

/* C interface to the s-embedding library.
 *
 * All functions return a status code: 0 success, 2 validation failure,
 * 3 schema error, 4 I/O error, 5 invalid argument. On failure,
 * semb_last_error() describes the problem (thread-local storage).
 * Strings returned through char** are heap-allocated; release them with
 * semb_string_free(). Embedding handles are opaque; release with
 * semb_embedding_free().
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct semb_embedding semb_embedding;

#define SEMB_OK 0
#define SEMB_VALIDATION 2
#define SEMB_SCHEMA 3
#define SEMB_IO 4
#define SEMB_INVALID_ARGUMENT 5

const char* semb_last_error(void);
void semb_string_free(char* s);
void semb_embedding_free(semb_embedding* e);

/* Interchange: embedding JSON {S, Q, color, quads, Qc}. */
int semb_embedding_from_json(const char* text, semb_embedding** out);
int semb_embedding_to_json(const semb_embedding* e, char** out);

/* Graph interchange round trip: parse, validate, re-emit normalized JSON. */
int semb_graph_normalize(const char* text, char** out);

/* Build a construction from a JSON spec:
 *   {"kind":"square_lattice","n":8,"theta":0.785}
 *   {"kind":"zigzag","theta":[...],"rows":4,"scale":1.0}
 *   {"kind":"zigzag_iid","columns":8,"rows":8,"alpha":0.75,"n":16,"seed":1}
 *   {"kind":"massive","columns":8,"rows":8,"mass":4.0,"n":16}
 *   {"kind":"isoradial_square","n":4,"delta":1.0}
 *   {"kind":"isoradial_tri","n":4,"delta":1.0}
 *   {"kind":"penrose","range":6,"delta":1.0,"seed":1}
 *   {"kind":"circle_pattern","base":"fan"|"hex","k":5}
 * meta_json (optional, may be NULL) receives construction metadata.
 */
int semb_build(const char* spec_json, semb_embedding** out, char** meta_json);

/* Validation battery; options JSON (all fields optional):
 *   {"lip_kappa":0.9,"exp_fat_delta":..,"exp_fat_rho":..,"boost_t":0.5}
 * Report JSON records properness, tangency residuals, theta round trip,
 * lip scale, and boost invariance. Status 2 when a requested check fails.
 */
int semb_check(const semb_embedding* e, const char* options_json, char** report_json);

/* Lorentz boost of (Re S, Im S, Q). */
int semb_boost(const semb_embedding* e, double t, semb_embedding** out);

/* Weld surgery; params JSON fields (all optional): kappa, strip_layers,
 * district_cols, n_levels, window_lo, window_hi. */
int semb_weld(const semb_embedding* e, const char* params_json, semb_embedding** out,
              char** report_json);

/* SVG 1.1 rendering; options JSON fields (all optional): width, incircles,
 * vertex_dots, q_heat, highlight (quad id array), title. */
int semb_render(const semb_embedding* e, const char* options_json, char** svg);

/* FK crossing/circuit experiment from a JSON spec:
 *   {"domain":{"kind":"grid","w":16,"h":15,"x":0.414,"rule":"separate"},
 *    "event":"crossing","seed":1,"n_samples":20000,"burnin":200,"thin":2,
 *    "n_batches":20,"heatbath":false,"n_chains":1,"selfdual":false,
 *    "threads":0}
 * or {"domain":{"kind":"annulus","l":8,"x":0.414},"event":"circuit",...}.
 * Outputs the CrossingReport JSON and the per-batch CSV (either out pointer
 * may be NULL). */
int semb_mc(const char* experiment_json, char** report_json, char** batches_csv);

#ifdef __cplusplus
}
#endif

#endif
