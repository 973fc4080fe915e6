#pragma once

#include <cstddef>
#include <vector>

#include "hqnn/qsim.hpp"

namespace hqnn::vqc {

// Circuit geometry of the variational layer. Defaults match the experiment:
// two qubits, three trainable rotation layers, each followed by one CNOT
// with control = qubit 0 and target = qubit 1. The CNOT orientation is a
// convention, isolated here so it can be flipped without touching callers.
struct VqcConfig {
  int n_qubits = 2;
  int n_layers = 3;
  int cnot_control = 0;
  int cnot_target = 1;

  void validate() const;
  int n_weights() const { return n_layers * n_qubits; }
};

// Trainable rotation angles, row-major over (layer, qubit): w[l*n_qubits+q]
// is the Rx angle applied to qubit q in layer l. Six entries for the
// default config.
using VqcWeights = std::vector<double>;

struct VqcGradients {
  // dy_dw[i * n_weights + p] = d y_i / d w_p
  std::vector<double> dy_dw;
  // dy_dx[i * n_qubits + j] = d y_i / d x_j
  std::vector<double> dy_dx;
};

// Angle embedding: Rx(x_q) on each qubit of |0...0>.
qsim::StateVector embed_angles(const std::vector<double>& x, const VqcConfig& cfg = {});

// Full layer: embed, n_layers x (Rx rotations + CNOT), per-qubit <Z> readout.
// Every output component lies in [-1, 1].
std::vector<double> vqc_forward(const std::vector<double>& x, const VqcWeights& w,
                                const VqcConfig& cfg = {});

// Exact gradients for all outputs w.r.t. weights and inputs via the
// parameter-shift rule: d y / d p = (y(p + pi/2) - y(p - pi/2)) / 2.
// The shift rule is exact here because every parameter enters through a
// single Rx gate (the embedding included).
VqcGradients vqc_gradients(const std::vector<double>& x, const VqcWeights& w,
                           const VqcConfig& cfg = {});

}  // namespace hqnn::vqc
