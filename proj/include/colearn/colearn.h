/* C interface to the co-training laboratory: experiment configuration,
 * grid execution, dataset corruption, and the gradient self-check.
 *
 * All functions return a colearn_status; on failure, colearn_error_message()
 * returns a thread-local description of the most recent error. */
#ifndef COLEARN_H
#define COLEARN_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum colearn_status {
    COLEARN_OK = 0,
    COLEARN_ERR_CONFIG = 1,  /* malformed or invalid configuration */
    COLEARN_ERR_RUNTIME = 2, /* I/O, numeric, or training failure */
} colearn_status;

/* Opaque experiment handle holding a parsed config and run options. */
typedef struct colearn_experiment colearn_experiment;

/* Parse a JSON config document / file into a new experiment handle.
 * On success stores the handle in *out (never NULL). */
colearn_status colearn_experiment_create(const char* json_text, colearn_experiment** out);
colearn_status colearn_experiment_create_from_file(const char* path,
                                                   colearn_experiment** out);

void colearn_experiment_destroy(colearn_experiment* exp);

/* Run options; safe to call any time before run/corrupt. */
colearn_status colearn_experiment_set_output_dir(colearn_experiment* exp, const char* dir);
colearn_status colearn_experiment_set_jobs(colearn_experiment* exp, size_t jobs);
colearn_status colearn_experiment_set_resume(colearn_experiment* exp, int resume);

/* Run every (method, seed) cell and write traces, summary, and plots. */
colearn_status colearn_experiment_run(colearn_experiment* exp);

/* Dataset-only mode: write the corrupted train/test datasets and exit. */
colearn_status colearn_experiment_corrupt(colearn_experiment* exp);

/* Full-loss finite-difference gradient check on a fixed small fixture.
 * Writes a NUL-terminated report into buf (truncated to buf_len).
 * Returns COLEARN_OK when all parameters pass. */
colearn_status colearn_gradcheck(char* buf, size_t buf_len);

/* Thread-local message for the most recent error; empty string if none. */
const char* colearn_error_message(void);

const char* colearn_version(void);

#ifdef __cplusplus
}
#endif

#endif /* COLEARN_H */
