#include "hqnn.h"

#include <cstring>
#include <exception>
#include <stdexcept>
#include <string>

#include "hqnn/data.hpp"
#include "hqnn/experiment.hpp"
#include "hqnn/qsim.hpp"
#include "hqnn/vqc.hpp"

namespace {

thread_local std::string g_last_error;

hqnn_status fail(hqnn_status code, const char* what) {
  g_last_error = what;
  return code;
}

// Bad-argument exceptions map to the config error code; everything else is
// runtime.
template <typename Fn>
hqnn_status guarded(Fn&& fn) {
  try {
    fn();
    return HQNN_OK;
  } catch (const std::invalid_argument& e) {
    return fail(HQNN_ERROR_CONFIG, e.what());
  } catch (const std::out_of_range& e) {
    return fail(HQNN_ERROR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(HQNN_ERROR_RUNTIME, e.what());
  } catch (...) {
    return fail(HQNN_ERROR_RUNTIME, "unknown error");
  }
}

hqnn_status require_nonnull(const void* p, const char* name) {
  if (p) return HQNN_OK;
  g_last_error = std::string(name) + " must not be null";
  return HQNN_ERROR_CONFIG;
}

}  // namespace

struct hqnn_state {
  hqnn::qsim::StateVector sv;
};

extern "C" {

const char* hqnn_last_error(void) { return g_last_error.c_str(); }

hqnn_status hqnn_state_create(int n_qubits, hqnn_state** out) {
  if (hqnn_status s = require_nonnull(out, "out"); s != HQNN_OK) return s;
  *out = nullptr;
  return guarded([&] { *out = new hqnn_state{hqnn::qsim::StateVector(n_qubits)}; });
}

void hqnn_state_destroy(hqnn_state* state) { delete state; }

hqnn_status hqnn_state_apply_rx(hqnn_state* state, int qubit, double theta) {
  if (hqnn_status s = require_nonnull(state, "state"); s != HQNN_OK) return s;
  return guarded([&] { state->sv.apply_rx(qubit, theta); });
}

hqnn_status hqnn_state_apply_cnot(hqnn_state* state, int control, int target) {
  if (hqnn_status s = require_nonnull(state, "state"); s != HQNN_OK) return s;
  return guarded([&] { state->sv.apply_cnot(control, target); });
}

hqnn_status hqnn_state_expect_z(const hqnn_state* state, int qubit, double* out) {
  if (hqnn_status s = require_nonnull(state, "state"); s != HQNN_OK) return s;
  if (hqnn_status s = require_nonnull(out, "out"); s != HQNN_OK) return s;
  return guarded([&] { *out = state->sv.expect_z(qubit); });
}

hqnn_status hqnn_state_expect_zz(const hqnn_state* state, int q0, int q1, double* out) {
  if (hqnn_status s = require_nonnull(state, "state"); s != HQNN_OK) return s;
  if (hqnn_status s = require_nonnull(out, "out"); s != HQNN_OK) return s;
  return guarded([&] { *out = state->sv.expect_zz(q0, q1); });
}

hqnn_status hqnn_state_amplitudes(const hqnn_state* state, double* re, double* im, size_t len) {
  if (hqnn_status s = require_nonnull(state, "state"); s != HQNN_OK) return s;
  if (hqnn_status s = require_nonnull(re, "re"); s != HQNN_OK) return s;
  if (hqnn_status s = require_nonnull(im, "im"); s != HQNN_OK) return s;
  return guarded([&] {
    const auto& amps = state->sv.amplitudes();
    if (len < amps.size()) throw std::invalid_argument("amplitude buffer too small");
    for (size_t i = 0; i < amps.size(); ++i) {
      re[i] = amps[i].real();
      im[i] = amps[i].imag();
    }
  });
}

hqnn_status hqnn_vqc_forward(const double x[2], const double w[6], double y[2]) {
  if (hqnn_status s = require_nonnull(x, "x"); s != HQNN_OK) return s;
  if (hqnn_status s = require_nonnull(w, "w"); s != HQNN_OK) return s;
  if (hqnn_status s = require_nonnull(y, "y"); s != HQNN_OK) return s;
  return guarded([&] {
    const std::vector<double> out =
        hqnn::vqc::vqc_forward({x[0], x[1]}, {w[0], w[1], w[2], w[3], w[4], w[5]});
    y[0] = out[0];
    y[1] = out[1];
  });
}

hqnn_status hqnn_vqc_gradients(const double x[2], const double w[6], double dy_dw[12],
                               double dy_dx[4]) {
  if (hqnn_status s = require_nonnull(x, "x"); s != HQNN_OK) return s;
  if (hqnn_status s = require_nonnull(w, "w"); s != HQNN_OK) return s;
  if (hqnn_status s = require_nonnull(dy_dw, "dy_dw"); s != HQNN_OK) return s;
  if (hqnn_status s = require_nonnull(dy_dx, "dy_dx"); s != HQNN_OK) return s;
  return guarded([&] {
    const hqnn::vqc::VqcGradients g =
        hqnn::vqc::vqc_gradients({x[0], x[1]}, {w[0], w[1], w[2], w[3], w[4], w[5]});
    std::memcpy(dy_dw, g.dy_dw.data(), 12 * sizeof(double));
    std::memcpy(dy_dx, g.dy_dx.data(), 4 * sizeof(double));
  });
}

hqnn_status hqnn_train(const char* config_path) {
  if (hqnn_status s = require_nonnull(config_path, "config_path"); s != HQNN_OK) return s;
  return guarded([&] {
    hqnn::experiment::run_train_command(hqnn::experiment::load_experiment_config(config_path));
  });
}

hqnn_status hqnn_experiment(const char* config_path) {
  if (hqnn_status s = require_nonnull(config_path, "config_path"); s != HQNN_OK) return s;
  return guarded([&] {
    hqnn::experiment::run_experiment_command(
        hqnn::experiment::load_experiment_config(config_path));
  });
}

hqnn_status hqnn_report(const char* results_dir) {
  if (hqnn_status s = require_nonnull(results_dir, "results_dir"); s != HQNN_OK) return s;
  return guarded([&] { hqnn::experiment::run_report_command(results_dir); });
}

hqnn_status hqnn_synth_data(const char* out_dir, int n_per_class, int image_size,
                            unsigned long long seed) {
  if (hqnn_status s = require_nonnull(out_dir, "out_dir"); s != HQNN_OK) return s;
  return guarded([&] {
    const hqnn::data::Dataset ds = hqnn::data::synth_dataset(n_per_class, image_size, seed);
    hqnn::data::write_split_png(out_dir, ds.train);
    hqnn::data::write_split_png(out_dir, ds.val);
    hqnn::data::write_split_png(out_dir, ds.test);
  });
}

}  // extern "C"
