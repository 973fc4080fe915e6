#include "hqnn/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace hqnn::nn {

using nlohmann::json;

// --- LayerSpec -------------------------------------------------------------

LayerSpec LayerSpec::conv2d(int in_ch, int out_ch, int kh, int kw, int stride, int padding) {
  LayerSpec l;
  l.kind = LayerKind::Conv2D;
  l.in_ch = in_ch;
  l.out_ch = out_ch;
  l.kernel_h = kh;
  l.kernel_w = kw;
  l.stride = stride;
  l.padding = padding;
  return l;
}

LayerSpec LayerSpec::maxpool2d(int ph, int pw) {
  LayerSpec l;
  l.kind = LayerKind::MaxPool2D;
  l.pool_h = ph;
  l.pool_w = pw;
  return l;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec l;
  l.kind = LayerKind::Flatten;
  return l;
}

LayerSpec LayerSpec::dense(int in_dim, int out_dim) {
  LayerSpec l;
  l.kind = LayerKind::Dense;
  l.in_dim = in_dim;
  l.out_dim = out_dim;
  return l;
}

LayerSpec LayerSpec::relu() {
  LayerSpec l;
  l.kind = LayerKind::Relu;
  return l;
}

LayerSpec LayerSpec::sigmoid() {
  LayerSpec l;
  l.kind = LayerKind::Sigmoid;
  return l;
}

LayerSpec LayerSpec::quantum(vqc::VqcConfig cfg) {
  LayerSpec l;
  l.kind = LayerKind::Quantum;
  l.vqc = cfg;
  l.in_dim = cfg.n_qubits;
  l.out_dim = cfg.n_qubits;
  return l;
}

std::size_t LayerSpec::param_count() const {
  switch (kind) {
    case LayerKind::Conv2D:
      return static_cast<std::size_t>(kernel_h) * kernel_w * in_ch * out_ch + out_ch;
    case LayerKind::Dense:
      return static_cast<std::size_t>(in_dim) * out_dim + out_dim;
    case LayerKind::Quantum:
      return static_cast<std::size_t>(vqc.n_weights());
    default:
      return 0;
  }
}

// --- shape inference / validation ------------------------------------------

namespace {

// Shapes of the tensor entering each layer, plus the final output shape.
std::vector<std::vector<std::size_t>> infer_shapes(const NetworkSpec& spec) {
  if (spec.input_h <= 0 || spec.input_w <= 0 || spec.input_ch <= 0) {
    throw std::invalid_argument("nn: input shape must be positive");
  }
  std::vector<std::vector<std::size_t>> shapes;
  std::vector<std::size_t> cur = {static_cast<std::size_t>(spec.input_h),
                                  static_cast<std::size_t>(spec.input_w),
                                  static_cast<std::size_t>(spec.input_ch)};
  shapes.push_back(cur);
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const std::string where = "nn: layer " + std::to_string(i);
    switch (l.kind) {
      case LayerKind::Conv2D: {
        if (cur.size() != 3) throw std::invalid_argument(where + ": conv needs HWC input");
        if (cur[2] != static_cast<std::size_t>(l.in_ch)) {
          throw std::invalid_argument(where + ": channel count mismatch");
        }
        if (l.kernel_h <= 0 || l.kernel_w <= 0 || l.stride <= 0 || l.padding < 0 ||
            l.out_ch <= 0) {
          throw std::invalid_argument(where + ": bad conv geometry");
        }
        const long oh = (static_cast<long>(cur[0]) + 2 * l.padding - l.kernel_h) / l.stride + 1;
        const long ow = (static_cast<long>(cur[1]) + 2 * l.padding - l.kernel_w) / l.stride + 1;
        if (oh <= 0 || ow <= 0) throw std::invalid_argument(where + ": empty conv output");
        cur = {static_cast<std::size_t>(oh), static_cast<std::size_t>(ow),
               static_cast<std::size_t>(l.out_ch)};
        break;
      }
      case LayerKind::MaxPool2D: {
        if (cur.size() != 3) throw std::invalid_argument(where + ": pool needs HWC input");
        if (l.pool_h <= 0 || l.pool_w <= 0 || cur[0] % l.pool_h != 0 || cur[1] % l.pool_w != 0) {
          throw std::invalid_argument(where + ": spatial dims not divisible by pool size");
        }
        cur = {cur[0] / l.pool_h, cur[1] / l.pool_w, cur[2]};
        break;
      }
      case LayerKind::Flatten:
        cur = {Tensor::shape_product(cur)};
        break;
      case LayerKind::Dense: {
        if (cur.size() != 1 || cur[0] != static_cast<std::size_t>(l.in_dim)) {
          throw std::invalid_argument(where + ": dense input dimension mismatch");
        }
        if (l.out_dim <= 0) throw std::invalid_argument(where + ": bad dense out_dim");
        cur = {static_cast<std::size_t>(l.out_dim)};
        break;
      }
      case LayerKind::Relu:
      case LayerKind::Sigmoid:
        break;
      case LayerKind::Quantum: {
        l.vqc.validate();
        if (l.vqc.n_qubits != 2) {
          throw std::invalid_argument(where + ": quantum layer requires n_qubits = 2");
        }
        if (cur.size() != 1 || cur[0] != static_cast<std::size_t>(l.vqc.n_qubits)) {
          throw std::invalid_argument(where + ": quantum layer input dimension mismatch");
        }
        break;
      }
    }
    shapes.push_back(cur);
  }
  return shapes;
}

}  // namespace

void NetworkSpec::validate() const {
  const auto shapes = infer_shapes(*this);
  int n_quantum = 0;
  for (const LayerSpec& l : layers) {
    if (l.kind == LayerKind::Quantum) ++n_quantum;
  }
  if (n_quantum > 1) {
    throw std::invalid_argument("nn: at most one quantum layer permitted");
  }
  if (layers.empty() || layers.back().kind != LayerKind::Sigmoid) {
    throw std::invalid_argument("nn: network must end in a sigmoid output");
  }
  // Last structural layer must be Dense(., 1).
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    if (!it->is_structural()) continue;
    if (it->kind != LayerKind::Dense || it->out_dim != 1) {
      throw std::invalid_argument("nn: network head must be Dense(., 1) + sigmoid");
    }
    break;
  }
  if (shapes.back() != std::vector<std::size_t>{1}) {
    throw std::invalid_argument("nn: network output must be scalar");
  }
}

std::size_t NetworkSpec::param_count() const {
  std::size_t n = 0;
  for (const LayerSpec& l : layers) n += l.param_count();
  return n;
}

std::size_t NetworkSpec::structural_layer_count() const {
  std::size_t n = 0;
  for (const LayerSpec& l : layers) {
    if (l.is_structural()) ++n;
  }
  return n;
}

// --- JSON (de)serialization -------------------------------------------------

std::string network_spec_to_json(const NetworkSpec& spec) {
  json j;
  j["input_shape"] = {spec.input_h, spec.input_w, spec.input_ch};
  j["layers"] = json::array();
  for (const LayerSpec& l : spec.layers) {
    json jl;
    switch (l.kind) {
      case LayerKind::Conv2D:
        jl = {{"type", "conv2d"},   {"in_ch", l.in_ch},       {"out_ch", l.out_ch},
              {"kernel_h", l.kernel_h}, {"kernel_w", l.kernel_w}, {"stride", l.stride},
              {"padding", l.padding}};
        break;
      case LayerKind::MaxPool2D:
        jl = {{"type", "maxpool2d"}, {"pool_h", l.pool_h}, {"pool_w", l.pool_w}};
        break;
      case LayerKind::Flatten:
        jl = {{"type", "flatten"}};
        break;
      case LayerKind::Dense:
        jl = {{"type", "dense"}, {"in_dim", l.in_dim}, {"out_dim", l.out_dim}};
        break;
      case LayerKind::Relu:
        jl = {{"type", "activation"}, {"fn", "relu"}};
        break;
      case LayerKind::Sigmoid:
        jl = {{"type", "activation"}, {"fn", "sigmoid"}};
        break;
      case LayerKind::Quantum:
        jl = {{"type", "quantum"},
              {"n_qubits", l.vqc.n_qubits},
              {"n_layers", l.vqc.n_layers},
              {"cnot_control", l.vqc.cnot_control},
              {"cnot_target", l.vqc.cnot_target}};
        break;
    }
    j["layers"].push_back(jl);
  }
  return j.dump(2);
}

NetworkSpec network_spec_from_json(const std::string& text) {
  json j = json::parse(text);
  NetworkSpec spec;
  const auto& in = j.at("input_shape");
  if (!in.is_array() || in.size() != 3) {
    throw std::invalid_argument("nn: input_shape must be [h, w, channels]");
  }
  spec.input_h = in[0].get<int>();
  spec.input_w = in[1].get<int>();
  spec.input_ch = in[2].get<int>();
  for (const json& jl : j.at("layers")) {
    const std::string type = jl.at("type").get<std::string>();
    if (type == "conv2d") {
      spec.layers.push_back(LayerSpec::conv2d(
          jl.at("in_ch").get<int>(), jl.at("out_ch").get<int>(), jl.at("kernel_h").get<int>(),
          jl.at("kernel_w").get<int>(), jl.value("stride", 1), jl.value("padding", 0)));
    } else if (type == "maxpool2d") {
      spec.layers.push_back(
          LayerSpec::maxpool2d(jl.at("pool_h").get<int>(), jl.at("pool_w").get<int>()));
    } else if (type == "flatten") {
      spec.layers.push_back(LayerSpec::flatten());
    } else if (type == "dense") {
      spec.layers.push_back(
          LayerSpec::dense(jl.at("in_dim").get<int>(), jl.at("out_dim").get<int>()));
    } else if (type == "activation") {
      const std::string fn = jl.at("fn").get<std::string>();
      if (fn == "relu") {
        spec.layers.push_back(LayerSpec::relu());
      } else if (fn == "sigmoid") {
        spec.layers.push_back(LayerSpec::sigmoid());
      } else {
        throw std::invalid_argument("nn: unknown activation '" + fn + "'");
      }
    } else if (type == "quantum") {
      vqc::VqcConfig cfg;
      cfg.n_qubits = jl.value("n_qubits", 2);
      cfg.n_layers = jl.value("n_layers", 3);
      cfg.cnot_control = jl.value("cnot_control", 0);
      cfg.cnot_target = jl.value("cnot_target", 1);
      spec.layers.push_back(LayerSpec::quantum(cfg));
    } else {
      throw std::invalid_argument("nn: unknown layer type '" + type + "'");
    }
  }
  return spec;
}

// --- reference architectures -------------------------------------------------

ArchitecturePair build_reference_architectures() {
  NetworkSpec c;
  c.input_h = 128;
  c.input_w = 128;
  c.input_ch = 3;
  c.layers = {
      LayerSpec::conv2d(3, 16, 3, 3, 1, 1),  LayerSpec::relu(), LayerSpec::maxpool2d(2, 2),
      LayerSpec::conv2d(16, 32, 3, 3, 1, 1), LayerSpec::relu(), LayerSpec::maxpool2d(2, 2),
      LayerSpec::conv2d(32, 64, 3, 3, 1, 1), LayerSpec::relu(), LayerSpec::maxpool2d(2, 2),
      LayerSpec::flatten(),
      LayerSpec::dense(16 * 16 * 64, 24),    LayerSpec::relu(),
      LayerSpec::dense(24, 2),               LayerSpec::relu(),
      LayerSpec::dense(2, 2),                LayerSpec::relu(),
      LayerSpec::dense(2, 1),                LayerSpec::sigmoid(),
  };
  c.validate();
  return ArchitecturePair{c, hybridize(c)};
}

ArchitecturePair build_small_architectures(int image_size, int channels) {
  if (image_size < 4 || image_size % 4 != 0) {
    throw std::invalid_argument("nn: small architecture needs image_size divisible by 4");
  }
  const int s4 = image_size / 4;
  NetworkSpec c;
  c.input_h = image_size;
  c.input_w = image_size;
  c.input_ch = channels;
  c.layers = {
      LayerSpec::conv2d(channels, 8, 3, 3, 1, 1), LayerSpec::relu(), LayerSpec::maxpool2d(2, 2),
      LayerSpec::conv2d(8, 16, 3, 3, 1, 1),       LayerSpec::relu(), LayerSpec::maxpool2d(2, 2),
      LayerSpec::flatten(),
      LayerSpec::dense(s4 * s4 * 16, 16),         LayerSpec::relu(),
      LayerSpec::dense(16, 2),                    LayerSpec::relu(),
      LayerSpec::dense(2, 2),                     LayerSpec::relu(),
      LayerSpec::dense(2, 1),                     LayerSpec::sigmoid(),
  };
  c.validate();
  return ArchitecturePair{c, hybridize(c)};
}

NetworkSpec hybridize(const NetworkSpec& classical) {
  NetworkSpec h = classical;
  int found = -1;
  for (std::size_t i = 0; i < h.layers.size(); ++i) {
    const LayerSpec& l = h.layers[i];
    if (l.kind == LayerKind::Dense && l.in_dim == 2 && l.out_dim == 2) {
      if (found >= 0) throw std::invalid_argument("nn: ambiguous Dense(2,2) layer to hybridize");
      found = static_cast<int>(i);
    }
  }
  if (found < 0) throw std::invalid_argument("nn: no Dense(2,2) layer to hybridize");
  h.layers[static_cast<std::size_t>(found)] = LayerSpec::quantum();
  h.validate();
  return h;
}

// --- initialization ----------------------------------------------------------

Tensor glorot_uniform_init(std::size_t fan_in, std::size_t fan_out,
                           std::vector<std::size_t> shape, std::mt19937_64& rng) {
  if (fan_in == 0 || fan_out == 0) {
    throw std::invalid_argument("nn: glorot fans must be positive");
  }
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t(std::move(shape));
  for (double& v : t.data) v = dist(rng);
  return t;
}

Tensor glorot_uniform_init(std::size_t fan_in, std::size_t fan_out,
                           std::vector<std::size_t> shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return glorot_uniform_init(fan_in, fan_out, std::move(shape), rng);
}

// --- layer kernels -----------------------------------------------------------

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(std::string("nn: ") + msg);
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const LayerSpec& l, const Tensor& kernel,
                      const Tensor& bias) {
  require(input.shape.size() == 3, "conv input must be HWC");
  require(input.shape[2] == static_cast<std::size_t>(l.in_ch), "conv channel mismatch");
  require(kernel.shape == std::vector<std::size_t>{static_cast<std::size_t>(l.kernel_h),
                                                   static_cast<std::size_t>(l.kernel_w),
                                                   static_cast<std::size_t>(l.in_ch),
                                                   static_cast<std::size_t>(l.out_ch)},
          "conv kernel shape mismatch");
  require(bias.shape == std::vector<std::size_t>{static_cast<std::size_t>(l.out_ch)},
          "conv bias shape mismatch");
  const long h = static_cast<long>(input.shape[0]);
  const long w = static_cast<long>(input.shape[1]);
  const long oh = (h + 2 * l.padding - l.kernel_h) / l.stride + 1;
  const long ow = (w + 2 * l.padding - l.kernel_w) / l.stride + 1;
  require(oh > 0 && ow > 0, "conv output dims must be positive");

  Tensor out({static_cast<std::size_t>(oh), static_cast<std::size_t>(ow),
              static_cast<std::size_t>(l.out_ch)});
  for (long oy = 0; oy < oh; ++oy) {
    for (long ox = 0; ox < ow; ++ox) {
      for (int oc = 0; oc < l.out_ch; ++oc) {
        double acc = bias.data[static_cast<std::size_t>(oc)];
        for (int ky = 0; ky < l.kernel_h; ++ky) {
          const long iy = oy * l.stride + ky - l.padding;
          if (iy < 0 || iy >= h) continue;
          for (int kx = 0; kx < l.kernel_w; ++kx) {
            const long ix = ox * l.stride + kx - l.padding;
            if (ix < 0 || ix >= w) continue;
            for (int ic = 0; ic < l.in_ch; ++ic) {
              acc += input.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix),
                              static_cast<std::size_t>(ic)) *
                     kernel.data[((static_cast<std::size_t>(ky) * l.kernel_w + kx) * l.in_ch +
                                  ic) * l.out_ch + oc];
            }
          }
        }
        out.at(static_cast<std::size_t>(oy), static_cast<std::size_t>(ox),
               static_cast<std::size_t>(oc)) = acc;
      }
    }
  }
  return out;
}

Conv2dGrad conv2d_backward(const Tensor& input, const LayerSpec& l, const Tensor& kernel,
                           const Tensor& d_out) {
  const long h = static_cast<long>(input.shape[0]);
  const long w = static_cast<long>(input.shape[1]);
  const long oh = static_cast<long>(d_out.shape[0]);
  const long ow = static_cast<long>(d_out.shape[1]);
  require(d_out.shape[2] == static_cast<std::size_t>(l.out_ch), "conv d_out channel mismatch");

  Conv2dGrad g;
  g.d_input = Tensor(input.shape);
  g.d_kernel = Tensor(kernel.shape);
  g.d_bias = Tensor({static_cast<std::size_t>(l.out_ch)});
  for (long oy = 0; oy < oh; ++oy) {
    for (long ox = 0; ox < ow; ++ox) {
      for (int oc = 0; oc < l.out_ch; ++oc) {
        const double go = d_out.at(static_cast<std::size_t>(oy), static_cast<std::size_t>(ox),
                                   static_cast<std::size_t>(oc));
        g.d_bias.data[static_cast<std::size_t>(oc)] += go;
        for (int ky = 0; ky < l.kernel_h; ++ky) {
          const long iy = oy * l.stride + ky - l.padding;
          if (iy < 0 || iy >= h) continue;
          for (int kx = 0; kx < l.kernel_w; ++kx) {
            const long ix = ox * l.stride + kx - l.padding;
            if (ix < 0 || ix >= w) continue;
            for (int ic = 0; ic < l.in_ch; ++ic) {
              const std::size_t kidx =
                  ((static_cast<std::size_t>(ky) * l.kernel_w + kx) * l.in_ch + ic) * l.out_ch +
                  oc;
              g.d_kernel.data[kidx] +=
                  go * input.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix),
                                static_cast<std::size_t>(ic));
              g.d_input.at(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix),
                           static_cast<std::size_t>(ic)) += go * kernel.data[kidx];
            }
          }
        }
      }
    }
  }
  return g;
}

Tensor maxpool2d_forward(const Tensor& input, const LayerSpec& l,
                         std::vector<std::size_t>* argmax) {
  require(input.shape.size() == 3, "pool input must be HWC");
  require(l.pool_h > 0 && l.pool_w > 0, "bad pool size");
  require(input.shape[0] % l.pool_h == 0 && input.shape[1] % l.pool_w == 0,
          "spatial dims not divisible by pool size");
  const std::size_t oh = input.shape[0] / l.pool_h;
  const std::size_t ow = input.shape[1] / l.pool_w;
  const std::size_t ch = input.shape[2];
  Tensor out({oh, ow, ch});
  if (argmax) argmax->assign(out.size(), 0);
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      for (std::size_t c = 0; c < ch; ++c) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (int py = 0; py < l.pool_h; ++py) {
          for (int px = 0; px < l.pool_w; ++px) {
            const std::size_t iy = oy * l.pool_h + py;
            const std::size_t ix = ox * l.pool_w + px;
            const double v = input.at(iy, ix, c);
            if (v > best) {  // strict: first occurrence wins ties
              best = v;
              best_idx = (iy * input.shape[1] + ix) * ch + c;
            }
          }
        }
        out.at(oy, ox, c) = best;
        if (argmax) (*argmax)[(oy * ow + ox) * ch + c] = best_idx;
      }
    }
  }
  return out;
}

Tensor maxpool2d_backward(const std::vector<std::size_t>& input_shape,
                          const std::vector<std::size_t>& argmax, const Tensor& d_out) {
  require(argmax.size() == d_out.size(), "pool argmax size mismatch");
  Tensor d_in(input_shape);
  for (std::size_t i = 0; i < d_out.size(); ++i) {
    d_in.data[argmax[i]] += d_out.data[i];
  }
  return d_in;
}

Tensor dense_forward(const Tensor& x, const Tensor& weights, const Tensor& bias) {
  require(x.shape.size() == 1, "dense input must be flat");
  require(weights.shape.size() == 2 && weights.shape[1] == x.shape[0],
          "dense weight shape mismatch");
  require(bias.shape == std::vector<std::size_t>{weights.shape[0]}, "dense bias shape mismatch");
  const std::size_t out_dim = weights.shape[0];
  const std::size_t in_dim = weights.shape[1];
  Tensor y({out_dim});
  for (std::size_t o = 0; o < out_dim; ++o) {
    double acc = bias.data[o];
    for (std::size_t i = 0; i < in_dim; ++i) {
      acc += weights.data[o * in_dim + i] * x.data[i];
    }
    y.data[o] = acc;
  }
  return y;
}

DenseGrad dense_backward(const Tensor& x, const Tensor& weights, const Tensor& d_out) {
  const std::size_t out_dim = weights.shape[0];
  const std::size_t in_dim = weights.shape[1];
  require(d_out.shape == std::vector<std::size_t>{out_dim}, "dense d_out shape mismatch");
  DenseGrad g;
  g.d_input = Tensor({in_dim});
  g.d_weights = Tensor(weights.shape);
  g.d_bias = d_out;
  for (std::size_t o = 0; o < out_dim; ++o) {
    const double go = d_out.data[o];
    for (std::size_t i = 0; i < in_dim; ++i) {
      g.d_weights.data[o * in_dim + i] = go * x.data[i];
      g.d_input.data[i] += go * weights.data[o * in_dim + i];
    }
  }
  return g;
}

Tensor activation_forward(const Tensor& x, LayerKind kind) {
  Tensor y = x;
  if (kind == LayerKind::Relu) {
    for (double& v : y.data) v = std::max(0.0, v);
  } else if (kind == LayerKind::Sigmoid) {
    for (double& v : y.data) v = 1.0 / (1.0 + std::exp(-v));
  } else {
    throw std::invalid_argument("nn: not an activation kind");
  }
  return y;
}

Tensor activation_backward(const Tensor& x, const Tensor& d_out, LayerKind kind) {
  require(x.shape == d_out.shape, "activation backward shape mismatch");
  Tensor d_in = d_out;
  if (kind == LayerKind::Relu) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x.data[i] <= 0.0) d_in.data[i] = 0.0;
    }
  } else if (kind == LayerKind::Sigmoid) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = 1.0 / (1.0 + std::exp(-x.data[i]));
      d_in.data[i] *= s * (1.0 - s);
    }
  } else {
    throw std::invalid_argument("nn: not an activation kind");
  }
  return d_in;
}

double bce_loss(double prediction, int label) {
  const double p = std::clamp(prediction, kBceEps, 1.0 - kBceEps);
  return label == 1 ? -std::log(p) : -std::log1p(-p);
}

double bce_loss_grad(double prediction, int label) {
  const double p = std::clamp(prediction, kBceEps, 1.0 - kBceEps);
  return (p - static_cast<double>(label)) / (p * (1.0 - p));
}

// --- network -----------------------------------------------------------------

std::size_t LayerParams::count() const {
  return weights.size() + bias.size() + vqc_weights.size();
}

Network::Network(NetworkSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  spec_.validate();
  std::mt19937_64 rng(seed);
  params_.resize(spec_.layers.size());
  grads_.resize(spec_.layers.size());
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const LayerSpec& l = spec_.layers[i];
    LayerParams& p = params_[i];
    switch (l.kind) {
      case LayerKind::Conv2D: {
        const std::size_t fan_in = static_cast<std::size_t>(l.kernel_h) * l.kernel_w * l.in_ch;
        const std::size_t fan_out = static_cast<std::size_t>(l.kernel_h) * l.kernel_w * l.out_ch;
        p.weights = glorot_uniform_init(
            fan_in, fan_out,
            {static_cast<std::size_t>(l.kernel_h), static_cast<std::size_t>(l.kernel_w),
             static_cast<std::size_t>(l.in_ch), static_cast<std::size_t>(l.out_ch)},
            rng);
        p.bias = Tensor({static_cast<std::size_t>(l.out_ch)});
        break;
      }
      case LayerKind::Dense:
        p.weights = glorot_uniform_init(
            static_cast<std::size_t>(l.in_dim), static_cast<std::size_t>(l.out_dim),
            {static_cast<std::size_t>(l.out_dim), static_cast<std::size_t>(l.in_dim)}, rng);
        p.bias = Tensor({static_cast<std::size_t>(l.out_dim)});
        break;
      case LayerKind::Quantum: {
        const Tensor w = glorot_uniform_init(static_cast<std::size_t>(l.vqc.n_qubits),
                                             static_cast<std::size_t>(l.vqc.n_qubits),
                                             {static_cast<std::size_t>(l.vqc.n_weights())}, rng);
        p.vqc_weights = w.data;
        break;
      }
      default:
        break;
    }
    grads_[i].weights = Tensor{};
    grads_[i].weights.shape = p.weights.shape;
    grads_[i].weights.data.assign(p.weights.size(), 0.0);
    grads_[i].bias.shape = p.bias.shape;
    grads_[i].bias.data.assign(p.bias.size(), 0.0);
    grads_[i].vqc_weights.assign(p.vqc_weights.size(), 0.0);
  }
}

std::size_t Network::param_count() const {
  std::size_t n = 0;
  for (const LayerParams& p : params_) n += p.count();
  return n;
}

double Network::forward(const Tensor& input) {
  if (input.shape != std::vector<std::size_t>{static_cast<std::size_t>(spec_.input_h),
                                              static_cast<std::size_t>(spec_.input_w),
                                              static_cast<std::size_t>(spec_.input_ch)}) {
    throw std::invalid_argument("nn: forward input shape mismatch");
  }
  acts_.clear();
  pool_argmax_.clear();
  acts_.push_back(input);
  for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
    const LayerSpec& l = spec_.layers[i];
    const Tensor& x = acts_.back();
    Tensor y;
    switch (l.kind) {
      case LayerKind::Conv2D:
        y = conv2d_forward(x, l, params_[i].weights, params_[i].bias);
        break;
      case LayerKind::MaxPool2D: {
        std::vector<std::size_t> argmax;
        y = maxpool2d_forward(x, l, &argmax);
        pool_argmax_.push_back(std::move(argmax));
        break;
      }
      case LayerKind::Flatten:
        y = x;
        y.shape = {x.size()};
        break;
      case LayerKind::Dense:
        y = dense_forward(x, params_[i].weights, params_[i].bias);
        break;
      case LayerKind::Relu:
      case LayerKind::Sigmoid:
        y = activation_forward(x, l.kind);
        break;
      case LayerKind::Quantum: {
        const std::vector<double> out = vqc::vqc_forward(x.data, params_[i].vqc_weights, l.vqc);
        y = Tensor({out.size()});
        y.data = out;
        break;
      }
    }
    y.check_finite("activation");
    acts_.push_back(std::move(y));
  }
  have_cache_ = true;
  return acts_.back().data[0];
}

void Network::backward(double dloss_dprediction) {
  if (!have_cache_) throw std::runtime_error("nn: backward without a cached forward pass");
  Tensor g({1});
  g.data[0] = dloss_dprediction;
  std::size_t pool_cursor = pool_argmax_.size();
  for (std::size_t ii = spec_.layers.size(); ii-- > 0;) {
    const LayerSpec& l = spec_.layers[ii];
    const Tensor& x = acts_[ii];
    switch (l.kind) {
      case LayerKind::Conv2D: {
        Conv2dGrad cg = conv2d_backward(x, l, params_[ii].weights, g);
        for (std::size_t k = 0; k < cg.d_kernel.size(); ++k) {
          grads_[ii].weights.data[k] += cg.d_kernel.data[k];
        }
        for (std::size_t k = 0; k < cg.d_bias.size(); ++k) {
          grads_[ii].bias.data[k] += cg.d_bias.data[k];
        }
        g = std::move(cg.d_input);
        break;
      }
      case LayerKind::MaxPool2D:
        --pool_cursor;
        g = maxpool2d_backward(x.shape, pool_argmax_[pool_cursor], g);
        break;
      case LayerKind::Flatten:
        g.shape = x.shape;
        break;
      case LayerKind::Dense: {
        DenseGrad dg = dense_backward(x, params_[ii].weights, g);
        for (std::size_t k = 0; k < dg.d_weights.size(); ++k) {
          grads_[ii].weights.data[k] += dg.d_weights.data[k];
        }
        for (std::size_t k = 0; k < dg.d_bias.size(); ++k) {
          grads_[ii].bias.data[k] += dg.d_bias.data[k];
        }
        g = std::move(dg.d_input);
        break;
      }
      case LayerKind::Relu:
      case LayerKind::Sigmoid:
        g = activation_backward(x, g, l.kind);
        break;
      case LayerKind::Quantum: {
        const vqc::VqcGradients vg = vqc::vqc_gradients(x.data, params_[ii].vqc_weights, l.vqc);
        const std::size_t n_out = static_cast<std::size_t>(l.vqc.n_qubits);
        const std::size_t n_w = params_[ii].vqc_weights.size();
        Tensor d_in({n_out});
        for (std::size_t p = 0; p < n_w; ++p) {
          double acc = 0.0;
          for (std::size_t o = 0; o < n_out; ++o) acc += g.data[o] * vg.dy_dw[o * n_w + p];
          grads_[ii].vqc_weights[p] += acc;
        }
        for (std::size_t j = 0; j < n_out; ++j) {
          double acc = 0.0;
          for (std::size_t o = 0; o < n_out; ++o) acc += g.data[o] * vg.dy_dx[o * n_out + j];
          d_in.data[j] = acc;
        }
        g = std::move(d_in);
        break;
      }
    }
    g.check_finite("gradient");
  }
}

void Network::zero_gradients() {
  for (LayerParams& gp : grads_) {
    std::fill(gp.weights.data.begin(), gp.weights.data.end(), 0.0);
    std::fill(gp.bias.data.begin(), gp.bias.data.end(), 0.0);
    std::fill(gp.vqc_weights.begin(), gp.vqc_weights.end(), 0.0);
  }
}

void Network::sgd_step(double lr, double grad_scale) {
  const double s = lr * grad_scale;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    for (std::size_t k = 0; k < params_[i].weights.size(); ++k) {
      params_[i].weights.data[k] -= s * grads_[i].weights.data[k];
    }
    for (std::size_t k = 0; k < params_[i].bias.size(); ++k) {
      params_[i].bias.data[k] -= s * grads_[i].bias.data[k];
    }
    for (std::size_t k = 0; k < params_[i].vqc_weights.size(); ++k) {
      params_[i].vqc_weights[k] -= s * grads_[i].vqc_weights[k];
    }
  }
}

std::vector<double> Network::flatten_params() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  for (const LayerParams& p : params_) {
    flat.insert(flat.end(), p.weights.data.begin(), p.weights.data.end());
    flat.insert(flat.end(), p.bias.data.begin(), p.bias.data.end());
    flat.insert(flat.end(), p.vqc_weights.begin(), p.vqc_weights.end());
  }
  return flat;
}

void Network::set_params(std::span<const double> flat) {
  if (flat.size() != param_count()) {
    throw std::invalid_argument("nn: set_params size mismatch");
  }
  std::size_t k = 0;
  for (LayerParams& p : params_) {
    for (double& v : p.weights.data) v = flat[k++];
    for (double& v : p.bias.data) v = flat[k++];
    for (double& v : p.vqc_weights) v = flat[k++];
  }
}

std::vector<double> Network::flatten_gradients() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  for (const LayerParams& p : grads_) {
    flat.insert(flat.end(), p.weights.data.begin(), p.weights.data.end());
    flat.insert(flat.end(), p.bias.data.begin(), p.bias.data.end());
    flat.insert(flat.end(), p.vqc_weights.begin(), p.vqc_weights.end());
  }
  return flat;
}

}  // namespace hqnn::nn
