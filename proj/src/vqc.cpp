#include "hqnn/vqc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hqnn::vqc {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string("vqc: non-finite ") + what);
    }
  }
}

void check_shapes(const std::vector<double>& x, const VqcWeights& w, const VqcConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(x.size()) != cfg.n_qubits) {
    throw std::invalid_argument("vqc: input size " + std::to_string(x.size()) +
                                " does not match n_qubits " + std::to_string(cfg.n_qubits));
  }
  if (static_cast<int>(w.size()) != cfg.n_weights()) {
    throw std::invalid_argument("vqc: weight count " + std::to_string(w.size()) +
                                " does not match n_layers*n_qubits " +
                                std::to_string(cfg.n_weights()));
  }
  check_finite(x, "input");
  check_finite(w, "weight");
}

}  // namespace

void VqcConfig::validate() const {
  if (n_qubits < 2) throw std::invalid_argument("vqc: n_qubits must be >= 2");
  if (n_layers < 1) throw std::invalid_argument("vqc: n_layers must be >= 1");
  if (cnot_control == cnot_target || cnot_control < 0 || cnot_target < 0 ||
      cnot_control >= n_qubits || cnot_target >= n_qubits) {
    throw std::invalid_argument("vqc: invalid CNOT control/target");
  }
}

qsim::StateVector embed_angles(const std::vector<double>& x, const VqcConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(x.size()) != cfg.n_qubits) {
    throw std::invalid_argument("vqc: embedding input size mismatch");
  }
  check_finite(x, "input");
  qsim::StateVector state(cfg.n_qubits);
  for (int q = 0; q < cfg.n_qubits; ++q) {
    state.apply_rx(q, x[static_cast<std::size_t>(q)]);
  }
  return state;
}

std::vector<double> vqc_forward(const std::vector<double>& x, const VqcWeights& w,
                                const VqcConfig& cfg) {
  check_shapes(x, w, cfg);
  qsim::StateVector state = embed_angles(x, cfg);
  for (int l = 0; l < cfg.n_layers; ++l) {
    for (int q = 0; q < cfg.n_qubits; ++q) {
      state.apply_rx(q, w[static_cast<std::size_t>(l * cfg.n_qubits + q)]);
    }
    state.apply_cnot(cfg.cnot_control, cfg.cnot_target);
  }
  std::vector<double> y(static_cast<std::size_t>(cfg.n_qubits));
  for (int q = 0; q < cfg.n_qubits; ++q) {
    y[static_cast<std::size_t>(q)] = state.expect_z(q);
  }
  return y;
}

VqcGradients vqc_gradients(const std::vector<double>& x, const VqcWeights& w,
                           const VqcConfig& cfg) {
  check_shapes(x, w, cfg);
  const std::size_t n_out = static_cast<std::size_t>(cfg.n_qubits);
  const std::size_t n_w = static_cast<std::size_t>(cfg.n_weights());
  VqcGradients g;
  g.dy_dw.assign(n_out * n_w, 0.0);
  g.dy_dx.assign(n_out * n_out, 0.0);

  VqcWeights ws = w;
  for (std::size_t p = 0; p < n_w; ++p) {
    ws[p] = w[p] + kHalfPi;
    const std::vector<double> yp = vqc_forward(x, ws, cfg);
    ws[p] = w[p] - kHalfPi;
    const std::vector<double> ym = vqc_forward(x, ws, cfg);
    ws[p] = w[p];
    for (std::size_t i = 0; i < n_out; ++i) {
      g.dy_dw[i * n_w + p] = (yp[i] - ym[i]) / 2.0;
    }
  }

  std::vector<double> xs = x;
  for (std::size_t j = 0; j < n_out; ++j) {
    xs[j] = x[j] + kHalfPi;
    const std::vector<double> yp = vqc_forward(xs, w, cfg);
    xs[j] = x[j] - kHalfPi;
    const std::vector<double> ym = vqc_forward(xs, w, cfg);
    xs[j] = x[j];
    for (std::size_t i = 0; i < n_out; ++i) {
      g.dy_dx[i * n_out + j] = (yp[i] - ym[i]) / 2.0;
    }
  }
  return g;
}

}  // namespace hqnn::vqc
