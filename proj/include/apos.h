#ifndef APOS_H
#define APOS_H

/* C interface to the apos library. Every call takes a session handle, which
 * records the last error. Requests are JSON objects passed as UTF-8
 * strings; results are heap strings released with apos_string_free. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define APOS_API __attribute__((visibility("default")))
#else
#define APOS_API
#endif

typedef enum apos_status {
    APOS_OK = 0,
    APOS_ERR_FAILED_CRITERIA = 1, /* certify only: some criterion failed */
    APOS_ERR_USAGE = 2,
    APOS_ERR_NUMERICAL = 3,
    APOS_ERR_INTERNAL = 4
} apos_status;

typedef struct apos_session apos_session;

APOS_API apos_session* apos_session_new(void);
APOS_API void apos_session_free(apos_session* session);

/* Message of the last failed call on this session, or "" after a success.
 * The pointer stays valid until the next call on the session. */
APOS_API const char* apos_last_error(const apos_session* session);

APOS_API const char* apos_version(void);
APOS_API void apos_string_free(char* s);

/* Analysis report as JSON. On APOS_ERR_NUMERICAL *out_json still receives a
 * report with the failure embedded under "error". */
APOS_API apos_status apos_analyze(apos_session* session, const char* request_json, char** out_json);

/* Simulation trace as CSV text. */
APOS_API apos_status apos_simulate(apos_session* session, const char* request_json, char** out_csv);

/* Root set as JSON. */
APOS_API apos_status apos_roots(apos_session* session, const char* request_json, char** out_json);

/* Names accepted by analyze, as a JSON array. The request is ignored. */
APOS_API apos_status apos_models(apos_session* session, const char* request_json, char** out_json);

/* Acceptance suite. Request: {"quick": bool} or {"criteria": [ids]}. The
 * JSON table is returned even when criteria fail. */
APOS_API apos_status apos_certify(apos_session* session, const char* request_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
