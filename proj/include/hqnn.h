/* C API for the hybrid quantum-classical network trainer.
 *
 * All functions return hqnn_status; on failure hqnn_last_error() holds a
 * message describing the most recent error on the calling thread. */
#ifndef HQNN_H
#define HQNN_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hqnn_status {
  HQNN_OK = 0,
  HQNN_ERROR_RUNTIME = 1,
  HQNN_ERROR_CONFIG = 2
} hqnn_status;

const char* hqnn_last_error(void);

/* ---- statevector simulator (opaque handle) ---- */

typedef struct hqnn_state hqnn_state;

/* Allocates an n-qubit register in |0...0>; 1 <= n_qubits <= 20. */
hqnn_status hqnn_state_create(int n_qubits, hqnn_state** out);
void hqnn_state_destroy(hqnn_state* state);

hqnn_status hqnn_state_apply_rx(hqnn_state* state, int qubit, double theta);
hqnn_status hqnn_state_apply_cnot(hqnn_state* state, int control, int target);
hqnn_status hqnn_state_expect_z(const hqnn_state* state, int qubit, double* out);
hqnn_status hqnn_state_expect_zz(const hqnn_state* state, int q0, int q1, double* out);
/* Copies 2^n_qubits amplitudes; len is the capacity of both arrays. */
hqnn_status hqnn_state_amplitudes(const hqnn_state* state, double* re, double* im, size_t len);

/* ---- variational layer (default 2-qubit, 3-layer circuit) ---- */

/* y[i] = <Z_i> after angle embedding of x and the trainable circuit w. */
hqnn_status hqnn_vqc_forward(const double x[2], const double w[6], double y[2]);
/* Parameter-shift gradients: dy_dw is row-major (output, weight), dy_dx is
 * row-major (output, input). */
hqnn_status hqnn_vqc_gradients(const double x[2], const double w[6], double dy_dw[12],
                               double dy_dx[4]);

/* ---- experiment orchestration ---- */

/* Single training run described by a JSON config file; writes run.json and
 * losses.csv into the configured output_dir. */
hqnn_status hqnn_train(const char* config_path);

/* Multi-round classical-vs-hybrid comparison; writes per-round run files,
 * report.json, report.csv, and loss-curve CSVs. */
hqnn_status hqnn_experiment(const char* config_path);

/* Rebuilds report artifacts from a completed experiment directory. */
hqnn_status hqnn_report(const char* results_dir);

/* Writes a seeded synthetic dataset as PNGs in the train/val/test layout. */
hqnn_status hqnn_synth_data(const char* out_dir, int n_per_class, int image_size,
                            unsigned long long seed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* HQNN_H */
