#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hqnn/qsim.hpp"

namespace hqnn::testing {

using qsim::cplx;
using Matrix = std::vector<cplx>;  // row-major, square

inline Matrix identity(std::size_t d) {
  Matrix m(d * d, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < d; ++i) m[i * d + i] = 1.0;
  return m;
}

inline Matrix kron(const Matrix& a, std::size_t da, const Matrix& b, std::size_t db) {
  const std::size_t d = da * db;
  Matrix m(d * d, cplx{0.0, 0.0});
  for (std::size_t ra = 0; ra < da; ++ra)
    for (std::size_t ca = 0; ca < da; ++ca)
      for (std::size_t rb = 0; rb < db; ++rb)
        for (std::size_t cb = 0; cb < db; ++cb)
          m[(ra * db + rb) * d + (ca * db + cb)] = a[ra * da + ca] * b[rb * db + cb];
  return m;
}

inline Matrix rx_matrix(double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  return {cplx{c, 0.0}, cplx{0.0, -s}, cplx{0.0, -s}, cplx{c, 0.0}};
}

// Full 2^n x 2^n matrix of a single-qubit gate on `qubit` (MSB = qubit 0).
inline Matrix embed_single_qubit(const Matrix& gate, int n_qubits, int qubit) {
  Matrix m = (qubit == 0) ? gate : identity(2);
  std::size_t d = 2;
  for (int q = 1; q < n_qubits; ++q) {
    m = kron(m, d, (q == qubit) ? gate : identity(2), 2);
    d *= 2;
  }
  return m;
}

// Full CNOT permutation matrix under the MSB = qubit 0 convention.
inline Matrix cnot_matrix(int n_qubits, int control, int target) {
  const std::size_t d = std::size_t{1} << n_qubits;
  const std::size_t cmask = std::size_t{1} << (n_qubits - 1 - control);
  const std::size_t tmask = std::size_t{1} << (n_qubits - 1 - target);
  Matrix m(d * d, cplx{0.0, 0.0});
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t i = (j & cmask) ? (j ^ tmask) : j;
    m[i * d + j] = 1.0;
  }
  return m;
}

// O(n^2) pairwise AUROC oracle, half credit for ties.
inline double auroc_bruteforce(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  std::size_t n_pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++n_pairs;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / static_cast<double>(n_pairs);
}

// P(T > t) by composite Simpson integration of the t density over [0, |t|].
inline double t_survival_quadrature(double t, double df) {
  const double log_norm = std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
                          0.5 * std::log(df * std::acos(-1.0));
  const auto density = [&](double u) {
    return std::exp(log_norm - (df + 1.0) / 2.0 * std::log1p(u * u / df));
  };
  const double hi = std::fabs(t);
  const int n = 40000;  // even
  const double h = hi / n;
  double sum = density(0.0) + density(hi);
  for (int i = 1; i < n; ++i) sum += density(i * h) * ((i % 2) ? 4.0 : 2.0);
  const double integral = sum * h / 3.0;
  const double upper = 0.5 - integral;
  return (t >= 0.0) ? upper : 1.0 - upper;
}

class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("hqnn_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

private:
  std::filesystem::path path_;
};

}  // namespace hqnn::testing
