#ifndef OPPSCREEN_OPPSCREEN_H
#define OPPSCREEN_OPPSCREEN_H

#include <stddef.h>

#if defined(_WIN32)
#define OPPSCREEN_API __declspec(dllexport)
#else
#define OPPSCREEN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum oppscreen_status {
  OPPSCREEN_OK = 0,
  OPPSCREEN_INVALID_ARGUMENT = 1,
  OPPSCREEN_IO_ERROR = 2,
  OPPSCREEN_PARSE_ERROR = 3,
  OPPSCREEN_DATA_ERROR = 4,
  OPPSCREEN_TRAINING_ERROR = 5,
  OPPSCREEN_VERSION_MISMATCH = 6,
  OPPSCREEN_INTERNAL_ERROR = 7
} oppscreen_status;

/* Message of the last failed call on this thread; "" after a success. The
   pointer stays valid until the next call on the same thread. */
OPPSCREEN_API const char* oppscreen_last_error(void);
OPPSCREEN_API const char* oppscreen_version(void);
OPPSCREEN_API const char* oppscreen_status_name(oppscreen_status status);

/* Strings returned through char** out-parameters are owned by the caller. */
OPPSCREEN_API void oppscreen_string_free(char* s);

/* ---- configuration ----
   Apply layers lowest first: new (defaults), load (file), apply_env
   (OPPSCREEN_* variables), set (flags). Later values win. */
typedef struct oppscreen_config oppscreen_config;

OPPSCREEN_API oppscreen_status oppscreen_config_new(oppscreen_config** out);
OPPSCREEN_API void oppscreen_config_free(oppscreen_config* cfg);
OPPSCREEN_API oppscreen_status oppscreen_config_load(oppscreen_config* cfg, const char* path);
OPPSCREEN_API oppscreen_status oppscreen_config_apply_env(oppscreen_config* cfg);
/* value uses file syntax (JSON, or a bare string); origin names the source
   in error messages, e.g. "--seed". NULL origin means "set". */
OPPSCREEN_API oppscreen_status oppscreen_config_set(oppscreen_config* cfg, const char* key, const char* value,
                                                    const char* origin);
OPPSCREEN_API oppscreen_status oppscreen_config_validate(const oppscreen_config* cfg);
/* Effective key/value pairs as a JSON object. */
OPPSCREEN_API oppscreen_status oppscreen_config_dump(const oppscreen_config* cfg, char** json_out);

/* ---- commands ----
   Each writes its output files and returns a JSON summary; its "text"
   member is a human-readable digest. */
OPPSCREEN_API oppscreen_status oppscreen_run_preprocess(const oppscreen_config* cfg, char** summary_json);
OPPSCREEN_API oppscreen_status oppscreen_run_grid_search(const oppscreen_config* cfg, char** summary_json);
OPPSCREEN_API oppscreen_status oppscreen_run_train(const oppscreen_config* cfg, char** summary_json);
/* protocols may be NULL (count 0) to use experiment.protocols. */
OPPSCREEN_API oppscreen_status oppscreen_run_experiment(const oppscreen_config* cfg, const int* protocols,
                                                        size_t count, char** summary_json);
OPPSCREEN_API oppscreen_status oppscreen_run_classify(const oppscreen_config* cfg, char** summary_json);
OPPSCREEN_API oppscreen_status oppscreen_run_report(const oppscreen_config* cfg, const char* const* inputs,
                                                    size_t count, char** summary_json);

/* ---- trained cascade ---- */
typedef struct oppscreen_cascade oppscreen_cascade;

/* Loads the bundle in dir and the sentiment lexicons named by cfg. */
OPPSCREEN_API oppscreen_status oppscreen_cascade_load(const oppscreen_config* cfg, const char* dir,
                                                      oppscreen_cascade** out);
OPPSCREEN_API void oppscreen_cascade_free(oppscreen_cascade* model);
OPPSCREEN_API double oppscreen_cascade_depth(const oppscreen_cascade* model);
OPPSCREEN_API oppscreen_status oppscreen_cascade_set_depth(oppscreen_cascade* model, double depth);
/* processed_json: one processed tweet object (a row of the preprocess
   output). Result: {"label","confidences","abstained","abstained_layer"}. */
OPPSCREEN_API oppscreen_status oppscreen_cascade_classify(const oppscreen_cascade* model, const char* processed_json,
                                                          char** decision_json);

#ifdef __cplusplus
}
#endif

#endif
