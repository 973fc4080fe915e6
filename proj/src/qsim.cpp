#include "hqnn/qsim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace hqnn::qsim {

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::invalid_argument("qsim: capacity exceeded, n_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "], got " +
                                std::to_string(n_qubits));
  }
  amps_.assign(std::size_t{1} << n_qubits, cplx{0.0, 0.0});
  amps_[0] = cplx{1.0, 0.0};
}

StateVector StateVector::from_amplitudes(int n_qubits, std::vector<cplx> amps) {
  StateVector s(n_qubits);
  if (amps.size() != s.dim()) {
    throw std::invalid_argument("qsim: amplitude count does not match 2^n_qubits");
  }
  s.amps_ = std::move(amps);
  return s;
}

void StateVector::check_qubit(int qubit) const {
  if (qubit < 0 || qubit >= n_qubits_) {
    throw std::out_of_range("qsim: qubit index " + std::to_string(qubit) +
                            " out of range for " + std::to_string(n_qubits_) +
                            " qubits");
  }
}

std::size_t StateVector::bit_mask(int qubit) const {
  return std::size_t{1} << (n_qubits_ - 1 - qubit);
}

void StateVector::apply_rx(int qubit, double theta) {
  check_qubit(qubit);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const cplx mis{0.0, -s};  // -i sin(t/2)
  const std::size_t mask = bit_mask(qubit);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (i & mask) continue;
    const std::size_t j = i | mask;
    const cplx a0 = amps_[i];
    const cplx a1 = amps_[j];
    amps_[i] = c * a0 + mis * a1;
    amps_[j] = mis * a0 + c * a1;
  }
}

void StateVector::apply_cnot(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) {
    throw std::invalid_argument("qsim: CNOT control and target must differ");
  }
  const std::size_t cmask = bit_mask(control);
  const std::size_t tmask = bit_mask(target);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & cmask) && !(i & tmask)) {
      std::swap(amps_[i], amps_[i | tmask]);
    }
  }
}

double StateVector::expect_z(int qubit) const {
  check_qubit(qubit);
  const std::size_t mask = bit_mask(qubit);
  double e = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    e += (i & mask) ? -p : p;
  }
  return e;
}

double StateVector::expect_zz(int q0, int q1) const {
  check_qubit(q0);
  check_qubit(q1);
  if (q0 == q1) {
    throw std::invalid_argument("qsim: expect_zz qubits must differ");
  }
  const std::size_t m0 = bit_mask(q0);
  const std::size_t m1 = bit_mask(q1);
  double e = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    const bool odd = static_cast<bool>(i & m0) != static_cast<bool>(i & m1);
    e += odd ? -p : p;
  }
  return e;
}

void StateVector::apply_dense_unitary(const std::vector<cplx>& u) {
  const std::size_t d = dim();
  if (u.size() != d * d) {
    throw std::invalid_argument("qsim: dense matrix dimension mismatch");
  }
  // U U^dag = I within 1e-10, entrywise.
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      cplx dot{0.0, 0.0};
      for (std::size_t k = 0; k < d; ++k) {
        dot += u[r * d + k] * std::conj(u[c * d + k]);
      }
      const cplx expect = (r == c) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
      if (std::abs(dot - expect) > 1e-10) {
        throw std::invalid_argument("qsim: matrix is not unitary");
      }
    }
  }
  std::vector<cplx> out(d, cplx{0.0, 0.0});
  for (std::size_t r = 0; r < d; ++r) {
    cplx acc{0.0, 0.0};
    for (std::size_t c = 0; c < d; ++c) {
      acc += u[r * d + c] * amps_[c];
    }
    out[r] = acc;
  }
  amps_ = std::move(out);
}

double StateVector::norm_sq() const {
  double n = 0.0;
  for (const cplx& a : amps_) n += std::norm(a);
  return n;
}

}  // namespace hqnn::qsim
