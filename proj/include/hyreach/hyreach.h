#ifndef HYREACH_HYREACH_H
#define HYREACH_HYREACH_H

/*
 * hyreach C API: reachability analysis for networks of constant-rate hybrid
 * automata, swarm benchmark generation and the exact flash oracle.
 *
 * Every handle is opaque and owned by the caller once returned; release it with
 * the matching *_free function. Functions returning hr_status leave a message
 * retrievable with hr_last_error() (per thread) when they fail. Strings returned
 * through char** are heap allocated and released with hr_string_free().
 */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(HYREACH_BUILDING)
#    define HR_API __declspec(dllexport)
#  else
#    define HR_API __declspec(dllimport)
#  endif
#else
#  define HR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hr_status {
    HR_OK = 0,
    HR_ERR_ARGUMENT = 1,    /* invalid argument or configuration */
    HR_ERR_PARSE = 2,       /* syntax error in a model, bad-set or JSON document */
    HR_ERR_MODEL = 3,       /* semantic model error (composition conflicts, unknown locations) */
    HR_ERR_UNSUPPORTED = 4, /* feature not supported by the selected engine */
    HR_ERR_IO = 5,          /* file could not be read or written */
    HR_ERR_MISMATCH = 6,    /* input hash or rerun result differs from a manifest */
    HR_ERR_INTERNAL = 7
} hr_status;

typedef enum hr_engine { HR_ENGINE_MONOLITHIC = 0, HR_ENGINE_DECOMPOSED = 1 } hr_engine;

typedef enum hr_verdict {
    HR_VERDICT_SAFE = 0,
    HR_VERDICT_UNSAFE_POSSIBLE = 1,
    HR_VERDICT_DEPTH_BOUND_HIT = 2,
    HR_VERDICT_SYNCHRONIZED = 3
} hr_verdict;

typedef struct hr_network hr_network;
typedef struct hr_config hr_config;
typedef struct hr_result hr_result;
typedef struct hr_trace hr_trace;

HR_API const char* hr_version(void);
/* Message of the last failed call on this thread; empty when none. */
HR_API const char* hr_last_error(void);
HR_API void hr_string_free(char* s);
HR_API const char* hr_status_name(hr_status s);
HR_API const char* hr_verdict_name(hr_verdict v);

/* ---- networks ---------------------------------------------------------- */

/* variant: lsync1, lsync2, shd1, shd2 (or lsync-I, lsync-II, shd-I, shd-II). */
HR_API hr_status hr_network_generate(const char* variant, size_t n, double f, double alpha, double width,
                                     hr_network** out);
HR_API hr_status hr_network_parse(const char* text, hr_network** out);
/* Concatenates the automata of all files. A spec.json next to the first file is attached. */
HR_API hr_status hr_network_read_files(const char* const* paths, size_t count, hr_network** out);
HR_API hr_status hr_network_write(const hr_network* net, char** text);
/* Writes one <name>.ha per automaton (and spec.json for generated networks). */
HR_API hr_status hr_network_write_dir(const hr_network* net, const char* dir);
HR_API size_t hr_network_components(const hr_network* net);
/* *ok is 1 for a well-formed network; *report receives one violation per line (may be NULL). */
HR_API hr_status hr_network_validate(const hr_network* net, int* ok, char** report);
/* Location and transition counts of the composition; lazy != 0 explores on demand. */
HR_API hr_status hr_network_compose_stats(const hr_network* net, int lazy, size_t* locations, size_t* transitions);
/* Eagerly composed automaton in the text format. */
HR_API hr_status hr_network_compose(const hr_network* net, char** text, size_t* locations, size_t* transitions);
HR_API void hr_network_free(hr_network* net);

/* ---- analysis configuration ------------------------------------------- */

HR_API hr_status hr_config_new(hr_config** out);
/*
 * Keys: delta, horizon, depth, order (bfs|dfs), representation (box|octagon),
 * fixed_point, termination (depth|sync), explicit_time, dedup,
 * optimized_enumeration, slack, max_nodes, store_segments. Booleans accept
 * true/false/1/0.
 */
HR_API hr_status hr_config_set(hr_config* cfg, const char* key, const char* value);
HR_API hr_status hr_config_to_json(const hr_config* cfg, char** json);
HR_API hr_status hr_config_from_json(const char* json, hr_config** out);
HR_API void hr_config_free(hr_config* cfg);

/* ---- analysis ----------------------------------------------------------- */

/* bad_sets: text in the bad-set format, or NULL. */
HR_API hr_status hr_analyze(const hr_network* net, hr_engine engine, const hr_config* cfg, const char* bad_sets,
                            hr_result** out);
HR_API hr_verdict hr_result_verdict(const hr_result* r);
HR_API size_t hr_result_nodes(const hr_result* r);
HR_API size_t hr_result_max_depth(const hr_result* r);
HR_API hr_status hr_result_to_json(const hr_result* r, int emit_segments, char** json);
HR_API hr_status hr_result_from_json(const char* json, hr_result** out);
/* format: "csv" or "svg"; projection: comma separated variable names ("t" for time) or NULL. */
HR_API hr_status hr_result_export(const hr_result* r, const char* format, const char* projection, char** out);
/*
 * Run manifest for a completed analysis: resolved configuration, input hashes and
 * result summary. bad_path and report_path may be NULL.
 */
HR_API hr_status hr_result_manifest(const hr_result* r, const char* const* model_paths, size_t count,
                                    const char* bad_path, const char* report_path, int emit_segments,
                                    double wall_seconds, char** json);
HR_API void hr_result_free(hr_result* r);

/*
 * Re-runs the analysis recorded in a manifest. *reproduced is 1 when verdict, node
 * count and depth match exactly; *summary receives a one-line description.
 */
HR_API hr_status hr_manifest_rerun(const char* manifest_json, int* reproduced, char** summary);

/* ---- oracle --------------------------------------------------------------- */

/* Point initial clocks (width 0); delta 0 disables sampling. */
HR_API hr_status hr_simulate(const char* variant, size_t n, double f, double alpha, double horizon, double delta,
                             hr_trace** out);
HR_API size_t hr_trace_flash_count(const hr_trace* t);
HR_API size_t hr_trace_events(const hr_trace* t);
HR_API hr_status hr_trace_to_json(const hr_trace* t, char** json);
HR_API hr_status hr_trace_from_json(const char* json, hr_trace** out);
HR_API void hr_trace_free(hr_trace* t);

/* Replays a trace against a result with stored segments; *report receives JSON (may be NULL). */
HR_API hr_status hr_check_containment(const hr_trace* t, const hr_result* r, double tol, size_t* violations,
                                      char** report);

#ifdef __cplusplus
}
#endif

#endif
