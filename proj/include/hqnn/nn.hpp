#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hqnn/tensor.hpp"
#include "hqnn/vqc.hpp"

namespace hqnn::nn {

enum class LayerKind { Conv2D, MaxPool2D, Flatten, Dense, Relu, Sigmoid, Quantum };

struct LayerSpec {
  LayerKind kind = LayerKind::Flatten;

  // Conv2D
  int in_ch = 0, out_ch = 0, kernel_h = 0, kernel_w = 0, stride = 1, padding = 0;
  // MaxPool2D
  int pool_h = 0, pool_w = 0;
  // Dense
  int in_dim = 0, out_dim = 0;
  // Quantum
  vqc::VqcConfig vqc;

  static LayerSpec conv2d(int in_ch, int out_ch, int kh, int kw, int stride = 1,
                          int padding = 0);
  static LayerSpec maxpool2d(int ph, int pw);
  static LayerSpec flatten();
  static LayerSpec dense(int in_dim, int out_dim);
  static LayerSpec relu();
  static LayerSpec sigmoid();
  static LayerSpec quantum(vqc::VqcConfig cfg = {});

  std::size_t param_count() const;
  // Activations are glue, not layers, when counting network depth.
  bool is_structural() const { return kind != LayerKind::Relu && kind != LayerKind::Sigmoid; }
};

struct NetworkSpec {
  int input_h = 0, input_w = 0, input_ch = 0;
  std::vector<LayerSpec> layers;

  // Checks shape chaining, pool divisibility, the at-most-one-quantum-layer
  // rule (with in = out = n_qubits = 2), and the Dense(.,1)+sigmoid head.
  void validate() const;
  std::size_t param_count() const;
  std::size_t structural_layer_count() const;
};

std::string network_spec_to_json(const NetworkSpec& spec);
NetworkSpec network_spec_from_json(const std::string& text);

// Classical reference net (input 128x128x3, 11 structural layers, with a
// Dense(2,2) penultimate layer carrying 6 parameters) and its hybrid twin
// with that layer swapped for the quantum layer. Both totals are equal.
struct ArchitecturePair {
  NetworkSpec classical;
  NetworkSpec hybrid;
};
ArchitecturePair build_reference_architectures();

// Scaled-down pair with the same Dense(2) -> [Dense(2)|Quantum] -> Dense(1)
// tail, for desk-scale experiments. image_size must be divisible by 4.
ArchitecturePair build_small_architectures(int image_size, int channels = 3);

// Replaces the penultime-position Dense(2,2) layer with the quantum layer.
NetworkSpec hybridize(const NetworkSpec& classical);

// --- initialization ---

// Uniform on [-L, L], L = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_uniform_init(std::size_t fan_in, std::size_t fan_out,
                           std::vector<std::size_t> shape, std::mt19937_64& rng);
Tensor glorot_uniform_init(std::size_t fan_in, std::size_t fan_out,
                           std::vector<std::size_t> shape, std::uint64_t seed);

// --- layer kernels ---

Tensor conv2d_forward(const Tensor& input, const LayerSpec& l, const Tensor& kernel,
                      const Tensor& bias);
struct Conv2dGrad {
  Tensor d_input, d_kernel, d_bias;
};
Conv2dGrad conv2d_backward(const Tensor& input, const LayerSpec& l, const Tensor& kernel,
                           const Tensor& d_out);

Tensor maxpool2d_forward(const Tensor& input, const LayerSpec& l,
                         std::vector<std::size_t>* argmax = nullptr);
// Routes each upstream gradient to the argmax position (first occurrence on ties).
Tensor maxpool2d_backward(const std::vector<std::size_t>& input_shape,
                          const std::vector<std::size_t>& argmax, const Tensor& d_out);

// y = W x + b with W shaped (out, in).
Tensor dense_forward(const Tensor& x, const Tensor& weights, const Tensor& bias);
struct DenseGrad {
  Tensor d_input, d_weights, d_bias;
};
DenseGrad dense_backward(const Tensor& x, const Tensor& weights, const Tensor& d_out);

Tensor activation_forward(const Tensor& x, LayerKind kind);
Tensor activation_backward(const Tensor& x, const Tensor& d_out, LayerKind kind);

// Binary cross-entropy with the prediction clamped to [eps, 1-eps].
inline constexpr double kBceEps = 1e-7;
double bce_loss(double prediction, int label);
double bce_loss_grad(double prediction, int label);

// --- network ---

struct LayerParams {
  Tensor weights;                   // Conv: (kh,kw,in,out); Dense: (out,in)
  Tensor bias;                      // (out)
  std::vector<double> vqc_weights;  // Quantum
  std::size_t count() const;
};

class Network {
public:
  Network(NetworkSpec spec, std::uint64_t seed);

  const NetworkSpec& spec() const { return spec_; }
  std::size_t param_count() const;

  // Runs the net on one sample, caching activations for backward.
  double forward(const Tensor& input);
  // Accumulates parameter gradients for the cached sample; callers batch by
  // invoking forward/backward per sample and scaling at step time.
  void backward(double dloss_dprediction);
  void zero_gradients();
  // w <- w - lr * grad_scale * g, for every parameter including the VQC angles.
  void sgd_step(double lr, double grad_scale = 1.0);

  const std::vector<LayerParams>& params() const { return params_; }
  std::vector<double> flatten_params() const;
  void set_params(std::span<const double> flat);
  std::vector<double> flatten_gradients() const;

private:
  NetworkSpec spec_;
  std::vector<LayerParams> params_;
  std::vector<LayerParams> grads_;
  std::vector<Tensor> acts_;  // acts_[i] feeds layer i; acts_.back() is the output
  std::vector<std::vector<std::size_t>> pool_argmax_;
  bool have_cache_ = false;
};

}  // namespace hqnn::nn
