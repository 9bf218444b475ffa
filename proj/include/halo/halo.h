/* C interface to the halo product library.
 *
 * Groups are opaque handles built from descriptor strings such as
 * "shuffler(Z)" or "upcloner(GF2, Z^2:lex)". Every operation takes a JSON
 * object of options (NULL or "" for defaults) and returns a status code;
 * results are heap strings released with halo_string_free. On failure the
 * message is available from halo_last_error on the calling thread. */
#ifndef HALO_HALO_H
#define HALO_HALO_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(HALO_BUILDING)
#define HALO_API __declspec(dllexport)
#else
#define HALO_API __declspec(dllimport)
#endif
#else
#define HALO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum halo_status {
  HALO_OK = 0,
  HALO_ERR_PARSE = 1,         /* descriptor, expression or config syntax */
  HALO_ERR_CONTRACT = 2,      /* invalid argument or precondition */
  HALO_ERR_RESOURCE = 3,      /* memory, enumeration or search budget */
  HALO_ERR_UNSUPPORTED = 4,   /* family lacks the requested construction */
  HALO_ERR_DECOMPOSITION = 5, /* a recursion step failed to shorten */
  HALO_ERR_INTERNAL = 6
} halo_status;

typedef struct halo_group halo_group;

HALO_API const char* halo_version(void);
HALO_API const char* halo_status_name(halo_status s);
/* Message of the last failure on this thread; "" after success. */
HALO_API const char* halo_last_error(void);
/* Byte offset of the last parse error, or -1. */
HALO_API long halo_last_error_offset(void);
HALO_API void halo_string_free(char* s);

HALO_API halo_status halo_group_create(const char* descriptor, halo_group** out);
HALO_API void halo_group_free(halo_group* g);
HALO_API halo_status halo_group_descriptor(const halo_group* g, char** out);

/* Options: radius, budget_mem (bytes), workers. JSON: elements, lengths. */
HALO_API halo_status halo_ball(const halo_group* g, const char* options, char** out_json);

/* Options: method (exact|greedy|anneal|spectral), p, n_max, radius, seed,
 * workers, budget. JSON: csv, witnesses, warnings, exact. */
HALO_API halo_status halo_profile(const halo_group* g, const char* options, char** out_json);

/* Profile options plus target ("n" or "a/b"). JSON: folner (or null),
 * witness, exact. */
HALO_API halo_status halo_folner(const halo_group* g, const char* options, char** out_json);

/* Options: n_max, radius. JSON: ball sizes; for halo products the closed
 * form lamp growth and enumerated block orders on the first n points. */
HALO_API halo_status halo_growth(const halo_group* g, const char* options, char** out_json);

/* Options: function (object mapping base elements to rationals) or
 * indicator (array of base elements), ps (array), budget. JSON: ratios of
 * the base function and of its lift, support sizes. */
HALO_API halo_status halo_lift(const halo_group* g, const char* options, char** out_json);

/* Options: element (group JSON) or random {length, seed}, simplify,
 * word_cap. JSON: word, length, verified, strictly_decreasing. */
HALO_API halo_status halo_decompose(const halo_group* g, const char* options, char** out_json);

/* Options: radius, D, interior. Halo products use a net of the base and
 * also report the large-scale commutativity constant. */
HALO_API halo_status halo_net(const halo_group* g, const char* options, char** out_json);

/* Options: radius, D, s0. JSON: edge list, labels, isomorphism verdict. */
HALO_API halo_status halo_ystar(const halo_group* g, const char* options, char** out_json);

/* Options: kind (wreath_in_shuffler|shuffler_endomorphism|lamplighter),
 * moduli, radius, pairs, seed. JSON: identity, homomorphism, injective,
 * counterexample, outside_image. */
HALO_API halo_status halo_embed_check(const halo_group* g, const char* options, char** out_json);

/* Profile options plus bounds ("standard" or expressions), dilations and
 * phi_inverse (array of x). JSON: csv, report, phi_inverse values. */
HALO_API halo_status halo_bounds(const halo_group* g, const char* options, char** out_json);

/* Runs a config file into out_dir and returns the manifest JSON. */
HALO_API halo_status halo_run_experiment(const char* config_path, const char* out_dir, char** out_manifest_json);

#ifdef __cplusplus
}
#endif

#endif
