#include "hqnn/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hqnn::nn {

std::size_t Tensor::shape_product(const std::vector<std::size_t>& shape_) {
  std::size_t n = 1;
  for (std::size_t d : shape_) {
    if (d == 0) throw std::invalid_argument("tensor: zero dimension");
    n *= d;
  }
  return n;
}

Tensor::Tensor(std::vector<std::size_t> shape_) : shape(std::move(shape_)) {
  data.assign(shape_product(shape), 0.0);
}

void Tensor::check_finite(const char* context) const {
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw std::runtime_error(std::string("tensor: non-finite value in ") + context);
    }
  }
}

}  // namespace hqnn::nn
