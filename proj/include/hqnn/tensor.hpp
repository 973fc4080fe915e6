#pragma once

#include <cstddef>
#include <vector>

namespace hqnn::nn {

// Dense n-dimensional real array, row-major.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape_);

  static Tensor zeros(std::vector<std::size_t> shape_) { return Tensor(std::move(shape_)); }

  std::size_t size() const { return data.size(); }
  static std::size_t shape_product(const std::vector<std::size_t>& shape_);

  // HWC accessors for 3-d tensors.
  double& at(std::size_t y, std::size_t x, std::size_t c) {
    return data[(y * shape[1] + x) * shape[2] + c];
  }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return data[(y * shape[1] + x) * shape[2] + c];
  }

  // Throws if any entry is NaN or infinite.
  void check_finite(const char* context) const;
};

}  // namespace hqnn::nn
