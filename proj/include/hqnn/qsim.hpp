#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace hqnn::qsim {

using cplx = std::complex<double>;

// Memory guard only; the experiments need two qubits.
inline constexpr int kMaxQubits = 20;

// Dense statevector of an n-qubit register.
//
// Basis ordering (normative for this codebase): basis index b encodes the
// ket |q0 q1 ... q(n-1)> with qubit 0 as the most significant bit, i.e.
// b = q0*2^(n-1) + ... + q(n-1)*2^0. With control = qubit 0 and
// target = qubit 1 the textbook 4x4 CNOT and Z(x)Z matrices apply to a
// 2-qubit state verbatim.
class StateVector {
public:
  // |0...0>
  explicit StateVector(int n_qubits);

  static StateVector from_amplitudes(int n_qubits, std::vector<cplx> amps);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<cplx>& amplitudes() const { return amps_; }

  // Rotation about X on one qubit:
  //   [ cos(t/2)    -i sin(t/2) ]
  //   [ -i sin(t/2)  cos(t/2)   ]
  void apply_rx(int qubit, double theta);

  // Controlled-NOT; pure amplitude permutation, norm preserved exactly.
  void apply_cnot(int control, int target);

  // <Z_q> = sum_b |a_b|^2 * (+1 if bit q of b is 0 else -1)
  double expect_z(int qubit) const;

  // <Z_q0 (x) Z_q1>, the diagonal parity observable.
  double expect_zz(int q0, int q1) const;

  // Full matrix-vector product with a 2^n x 2^n unitary, row-major.
  // Slow by construction; exists as a cross-check oracle for the strided
  // gate implementations. Rejects non-unitary input (tolerance 1e-10).
  void apply_dense_unitary(const std::vector<cplx>& u);

  double norm_sq() const;

private:
  void check_qubit(int qubit) const;
  // Bit position of `qubit` counted from the least significant end.
  std::size_t bit_mask(int qubit) const;

  int n_qubits_;
  std::vector<cplx> amps_;
};

}  // namespace hqnn::qsim
