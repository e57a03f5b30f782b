/* C interface to the case-frame lexicon engine.
 *
 * Handles are opaque. Every function returning cfl_status leaves its out
 * parameter untouched on CFL_INVALID_ARGUMENT; otherwise an allocated handle
 * is returned even on failure so its diagnostics can be read. Strings
 * returned by accessors are owned by the handle and live until it is freed.
 * A loaded lexicon is immutable and may be shared across threads.
 */
#ifndef CFL_H
#define CFL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(CFL_BUILDING_LIBRARY)
#define CFL_API __attribute__((visibility("default")))
#else
#define CFL_API
#endif

typedef struct cfl_lexicon cfl_lexicon;
typedef struct cfl_result cfl_result;

typedef enum cfl_status {
  CFL_OK = 0,
  CFL_NO_RESULT = 1,        /* well-formed input, nothing resolved */
  CFL_INPUT_ERROR = 2,      /* syntax error, ill-formed or too deeply nested frame */
  CFL_LEXICON_ERROR = 3,    /* unreadable file or lexicon diagnostics */
  CFL_INVALID_ARGUMENT = 4,
  CFL_INTERNAL_ERROR = 5
} cfl_status;

/* cfl_lexicon_load flags */
#define CFL_NO_PRELUDE 1u

/* cfl_resolve flags */
#define CFL_ALL_STAGES 1u /* collect matches from every stage */
#define CFL_GENERATE 2u   /* input is a semantic frame; produce case frames */
#define CFL_EXPLAIN 4u    /* on zero results, record per-sense failures */

/* Loads the built-in prelude (unless CFL_NO_PRELUDE) followed by `paths`
 * in order. */
CFL_API cfl_status cfl_lexicon_load(const char* const* paths, size_t count, unsigned flags, cfl_lexicon** out);
/* As above with in-memory texts; `names` label diagnostics. */
CFL_API cfl_status cfl_lexicon_load_text(const char* const* names, const char* const* texts, size_t count,
                                         unsigned flags, cfl_lexicon** out);
CFL_API void cfl_lexicon_free(cfl_lexicon* lexicon);

CFL_API size_t cfl_lexicon_diagnostic_count(const cfl_lexicon* lexicon);
/* "Code: message" */
CFL_API const char* cfl_lexicon_diagnostic(const cfl_lexicon* lexicon, size_t index);
CFL_API const char* cfl_lexicon_diagnostic_code(const cfl_lexicon* lexicon, size_t index);

CFL_API size_t cfl_lexicon_sense_count(const cfl_lexicon* lexicon);
CFL_API const char* cfl_lexicon_sense_id(const cfl_lexicon* lexicon, size_t index);

/* Resolves a frame file's text. Returns CFL_OK when at least one sense
 * matched, CFL_NO_RESULT when none did. */
CFL_API cfl_status cfl_resolve(const cfl_lexicon* lexicon, const char* frame_text, unsigned flags,
                               cfl_result** out);
CFL_API void cfl_result_free(cfl_result* result);

CFL_API const char* cfl_result_error(const cfl_result* result);
CFL_API size_t cfl_result_count(const cfl_result* result);
CFL_API const char* cfl_result_sense_id(const cfl_result* result, size_t index);
/* -1 for generated frames */
CFL_API int cfl_result_stage(const cfl_result* result, size_t index);
CFL_API const char* cfl_result_stage_label(const cfl_result* result, size_t index);
/* Canonical serialization, newline terminated. */
CFL_API const char* cfl_result_frame(const cfl_result* result, size_t index);

/* Embedded clause resolutions of one result, flattened depth-first; paths
 * are dotted from the top-level frame. */
CFL_API size_t cfl_result_embedded_count(const cfl_result* result, size_t index);
CFL_API const char* cfl_result_embedded_path(const cfl_result* result, size_t index, size_t embedded);
CFL_API const char* cfl_result_embedded_sense(const cfl_result* result, size_t index, size_t embedded);

/* Stage labels of the top-level frame, in pipeline order. */
CFL_API size_t cfl_result_trace_count(const cfl_result* result);
CFL_API const char* cfl_result_trace(const cfl_result* result, size_t index);
/* Remarks made while building stages (e.g. agentless passive). */
CFL_API size_t cfl_result_note_count(const cfl_result* result);
CFL_API const char* cfl_result_note(const cfl_result* result, size_t index);
/* Filled with CFL_EXPLAIN when nothing resolved. */
CFL_API size_t cfl_result_failure_count(const cfl_result* result);
CFL_API const char* cfl_result_failure(const cfl_result* result, size_t index);

/* Parses a frame and writes its canonical text to *out; on failure *out
 * holds the error message instead. Free with cfl_string_free. */
CFL_API cfl_status cfl_format_frame(const cfl_lexicon* lexicon, const char* frame_text, char** out);
CFL_API void cfl_string_free(char* text);

CFL_API const char* cfl_status_string(cfl_status status);
CFL_API const char* cfl_version(void);

#ifdef __cplusplus
}
#endif

#endif /* CFL_H */
