#pragma once

#include "ghost/common.hpp"
#include "ghost/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace ghost {

enum class Activation { relu, sigmoid, identity };
enum class Loss { binary_cross_entropy, mse };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::identity: return "identity";
  }
  return "?";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "identity") return Activation::identity;
  throw DataError("unknown activation \"" + s + "\"");
}

/// One dense layer: a = f(W a_prev + b), W is out x in.
struct LayerParams {
  Matrix weights;
  Vector bias;
  Activation activation = Activation::relu;

  Eigen::Index in_units() const { return weights.cols(); }
  Eigen::Index out_units() const { return weights.rows(); }
};

struct Network {
  Eigen::Index input_dim = 0;
  std::vector<LayerParams> layers;

  Eigen::Index output_dim() const { return layers.empty() ? input_dim : layers.back().out_units(); }

  /// Layer widths including the input: {input_dim, h1, ..., out}.
  std::vector<Eigen::Index> sizes() const {
    std::vector<Eigen::Index> s{input_dim};
    for (const auto& l : layers) s.push_back(l.out_units());
    return s;
  }

  void validate() const {
    if (input_dim < 1) throw DataError("network: input dimension must be positive");
    Eigen::Index prev = input_dim;
    for (const auto& l : layers) {
      if (l.in_units() != prev || l.bias.size() != l.out_units()) {
        throw DataError("network: layer dimensions do not chain");
      }
      if (!l.weights.allFinite() || !l.bias.allFinite()) throw DataError("network: non-finite parameter");
      prev = l.out_units();
    }
  }
};

struct LayerGradient {
  Matrix weights;
  Vector bias;
};

struct TrainConfig {
  int epochs = 100;
  double learning_rate = 0.05;
  int batch_size = 32;
  Loss loss = Loss::binary_cross_entropy;
  Seed seed = 0;
};

struct TrainResult {
  Network net;
  std::vector<double> loss_history;
};

/// Hidden-layer widths of the mirrored autoencoder; input/output width is input_dim.
struct AutoencoderSpec {
  int input_dim = 0;
  int bottleneck = 0;
  std::vector<int> hidden_sizes;
};

namespace detail {

inline Matrix activate(const Matrix& z, Activation a) {
  switch (a) {
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::sigmoid: return (1.0 / (1.0 + (-z.array()).exp())).matrix();
    case Activation::identity: return z;
  }
  return z;
}

// f'(z) expressed through the activation output a (and z for relu).
inline Matrix activation_derivative(const Matrix& z, const Matrix& a, Activation act) {
  switch (act) {
    case Activation::relu: return (z.array() > 0.0).cast<double>().matrix();
    case Activation::sigmoid: return (a.array() * (1.0 - a.array())).matrix();
    case Activation::identity: return Matrix::Ones(z.rows(), z.cols());
  }
  return Matrix::Ones(z.rows(), z.cols());
}

struct BatchTrace {
  std::vector<Matrix> pre;   // z per layer, batch x out
  std::vector<Matrix> post;  // a per layer, batch x out
};

inline BatchTrace forward_trace(const Network& net, const Matrix& x) {
  if (x.cols() != net.input_dim) {
    throw DataError("forward: input has " + std::to_string(x.cols()) + " features, network expects " +
                    std::to_string(net.input_dim));
  }
  BatchTrace t;
  const Matrix* prev = &x;
  for (const auto& l : net.layers) {
    Matrix z = (*prev) * l.weights.transpose();
    z.rowwise() += l.bias.transpose();
    t.post.push_back(activate(z, l.activation));
    t.pre.push_back(std::move(z));
    prev = &t.post.back();
  }
  return t;
}

// log(1 + exp(v)) without overflow.
inline double softplus(double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); }

inline double loss_value(const Network& net, const BatchTrace& t, const Matrix& target, Loss loss) {
  const auto n = static_cast<double>(target.rows());
  const Matrix& out = t.post.back();
  if (loss == Loss::mse) return (out - target).squaredNorm() / n;
  // BCE from logits: z - z*y + log(1 + exp(-z)) == softplus(z) - z*y
  if (net.layers.back().activation != Activation::sigmoid) {
    throw DataError("binary cross-entropy needs a sigmoid output layer");
  }
  const Matrix& z = t.pre.back();
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) s += softplus(z(i, j)) - z(i, j) * target(i, j);
  }
  return s / n;
}

inline Matrix labels_as_targets(std::span<const int> labels) {
  Matrix y(static_cast<Eigen::Index>(labels.size()), 1);
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i), 0) = labels[i];
  return y;
}

inline void check_batch(const Network& net, const Matrix& x, const Matrix& target) {
  if (x.rows() == 0) throw DataError("gradients: empty batch");
  if (x.rows() != target.rows()) throw DataError("gradients: sample and target counts differ");
  if (target.cols() != net.output_dim()) throw DataError("gradients: target width does not match network output");
}

}  // namespace detail

/// Per-layer activations for one sample; the last entry is the network output.
inline std::vector<Vector> forward(const Network& net, const Vector& x) {
  if (x.size() != net.input_dim) {
    throw DataError("forward: input has " + std::to_string(x.size()) + " features, network expects " +
                    std::to_string(net.input_dim));
  }
  std::vector<Vector> acts;
  Vector prev = x;
  for (const auto& l : net.layers) {
    Matrix z = (l.weights * prev + l.bias).transpose();
    prev = detail::activate(z, l.activation).transpose();
    acts.push_back(prev);
  }
  return acts;
}

/// Network outputs for every row of x.
inline Matrix forward_batch(const Network& net, const Matrix& x) {
  auto t = detail::forward_trace(net, x);
  return t.post.empty() ? x : std::move(t.post.back());
}

/// Mean loss over the batch. MSE is the per-sample summed squared error, averaged over samples.
inline double batch_loss(const Network& net, const Matrix& x, const Matrix& target, Loss loss) {
  detail::check_batch(net, x, target);
  return detail::loss_value(net, detail::forward_trace(net, x), target, loss);
}

inline double batch_loss(const Network& net, const Matrix& x, std::span<const int> labels, Loss loss) {
  return batch_loss(net, x, detail::labels_as_targets(labels), loss);
}

namespace detail {

inline std::vector<LayerGradient> backprop(const Network& net, const Matrix& x, const BatchTrace& t,
                                           const Matrix& target, Loss loss) {
  const auto n = static_cast<double>(x.rows());
  const std::size_t nl = net.layers.size();

  // delta = dL/dz of the current layer
  Matrix delta;
  const Matrix& out = t.post.back();
  if (loss == Loss::binary_cross_entropy) {
    if (net.layers.back().activation != Activation::sigmoid) {
      throw DataError("binary cross-entropy needs a sigmoid output layer");
    }
    delta = (out - target) / n;
  } else {
    delta = (2.0 / n) * (out - target);
    delta.array() *= activation_derivative(t.pre.back(), out, net.layers.back().activation).array();
  }

  std::vector<LayerGradient> g(nl);
  for (std::size_t li = nl; li-- > 0;) {
    const Matrix& input = li == 0 ? x : t.post[li - 1];
    g[li].weights = delta.transpose() * input;
    g[li].bias = delta.colwise().sum().transpose();
    if (li > 0) {
      Matrix back = delta * net.layers[li].weights;
      back.array() *= activation_derivative(t.pre[li - 1], t.post[li - 1], net.layers[li - 1].activation).array();
      delta = std::move(back);
    }
  }
  return g;
}

}  // namespace detail

/// Backpropagation: exact gradients of the mean batch loss.
inline std::vector<LayerGradient> gradients(const Network& net, const Matrix& x, const Matrix& target, Loss loss) {
  detail::check_batch(net, x, target);
  if (net.layers.empty()) throw DataError("gradients: network has no layers");
  return detail::backprop(net, x, detail::forward_trace(net, x), target, loss);
}

inline std::vector<LayerGradient> gradients(const Network& net, const Matrix& x, std::span<const int> labels, Loss loss) {
  return gradients(net, x, detail::labels_as_targets(labels), loss);
}

/// Dense network with the given widths. Weights ~ N(0, 2/in) for relu layers,
/// N(0, 1/in) otherwise; biases start at zero.
inline Network make_network(Eigen::Index input_dim, const std::vector<Eigen::Index>& widths,
                            const std::vector<Activation>& activations, Seed seed) {
  if (widths.size() != activations.size()) throw DataError("network: one activation per layer is required");
  Network net;
  net.input_dim = input_dim;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Index prev = input_dim;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (widths[i] < 1) throw DataError("network: layer widths must be positive");
    LayerParams l;
    l.activation = activations[i];
    const double scale = std::sqrt((l.activation == Activation::relu ? 2.0 : 1.0) / static_cast<double>(prev));
    l.weights.resize(widths[i], prev);
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = scale * normal(rng);
    }
    l.bias = Vector::Zero(widths[i]);
    net.layers.push_back(std::move(l));
    prev = widths[i];
  }
  net.validate();
  return net;
}

/// ReLU hidden layers followed by a single sigmoid unit.
inline Network make_classifier(Eigen::Index input_dim, const std::vector<Eigen::Index>& hidden, Seed seed) {
  std::vector<Eigen::Index> widths = hidden;
  widths.push_back(1);
  std::vector<Activation> acts(hidden.size(), Activation::relu);
  acts.push_back(Activation::sigmoid);
  return make_network(input_dim, widths, acts, seed);
}

/// Largest power of two strictly below input_dim, then halving down to the
/// bottleneck, mirrored. Degenerate shapes collapse to one hidden layer.
inline AutoencoderSpec build_autoencoder_spec(int input_dim, int bottleneck) {
  if (input_dim < 1 || bottleneck < 1) throw DataError("autoencoder: dimensions must be positive");
  AutoencoderSpec spec{input_dim, bottleneck, {}};
  if (input_dim <= 2) {
    spec.hidden_sizes = {1};
    spec.bottleneck = 1;
    return spec;
  }
  int top = 1;
  while (top * 2 < input_dim) top *= 2;
  if (top <= bottleneck) {
    spec.hidden_sizes = {top};
    spec.bottleneck = top;
    return spec;
  }
  std::vector<int> encoder{top};
  while (encoder.back() / 2 > bottleneck) encoder.push_back(encoder.back() / 2);
  encoder.push_back(bottleneck);
  spec.hidden_sizes = encoder;
  spec.hidden_sizes.insert(spec.hidden_sizes.end(), encoder.rbegin() + 1, encoder.rend());
  return spec;
}

/// ReLU hidden layers and an identity output of width input_dim.
inline Network make_autoencoder(const AutoencoderSpec& spec, Seed seed) {
  std::vector<Eigen::Index> widths(spec.hidden_sizes.begin(), spec.hidden_sizes.end());
  widths.push_back(spec.input_dim);
  std::vector<Activation> acts(spec.hidden_sizes.size(), Activation::relu);
  acts.push_back(Activation::identity);
  return make_network(spec.input_dim, widths, acts, seed);
}

/// Mini-batch gradient descent. Rows are reshuffled every epoch from cfg.seed.
/// loss_history[e] is the sample-weighted mean of the batch losses seen in epoch e.
inline TrainResult fit(Network net, const Matrix& x, const Matrix& target, const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw DataError("train: epochs must be at least 1");
  if (!(cfg.learning_rate >= 0.0)) throw DataError("train: learning rate must be non-negative");
  if (cfg.batch_size < 1) throw DataError("train: batch size must be positive");
  if (x.rows() == 0) throw DataError("train: empty dataset");
  detail::check_batch(net, x, target);

  std::mt19937_64 rng(cfg.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto bs = static_cast<Eigen::Index>(cfg.batch_size);

  TrainResult res;
  res.loss_history.reserve(static_cast<std::size_t>(cfg.epochs));
  Matrix bx;
  Matrix by;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (Eigen::Index start = 0; start < x.rows(); start += bs) {
      const Eigen::Index len = std::min(bs, x.rows() - start);
      bx.resize(len, x.cols());
      by.resize(len, target.cols());
      for (Eigen::Index i = 0; i < len; ++i) {
        bx.row(i) = x.row(order[static_cast<std::size_t>(start + i)]);
        by.row(i) = target.row(order[static_cast<std::size_t>(start + i)]);
      }
      // loss is taken from the same forward pass the gradient uses
      const auto t = detail::forward_trace(net, bx);
      total += detail::loss_value(net, t, by, cfg.loss) * static_cast<double>(len);
      if (cfg.learning_rate == 0.0) continue;
      const auto g = detail::backprop(net, bx, t, by, cfg.loss);
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        net.layers[l].weights -= cfg.learning_rate * g[l].weights;
        net.layers[l].bias -= cfg.learning_rate * g[l].bias;
      }
    }
    const double mean = total / static_cast<double>(x.rows());
    if (!std::isfinite(mean)) {
      throw TrainingError("training diverged: non-finite loss at epoch " + std::to_string(epoch + 1), epoch + 1);
    }
    res.loss_history.push_back(mean);
  }
  res.net = std::move(net);
  return res;
}

/// Trains a classifier on the dataset labels.
inline TrainResult train(Network net, const Dataset& d, const TrainConfig& cfg) {
  if (static_cast<Eigen::Index>(d.cols()) != net.input_dim) {
    throw DataError("train: dataset has " + std::to_string(d.cols()) + " features, network expects " +
                    std::to_string(net.input_dim));
  }
  return fit(std::move(net), d.features(), detail::labels_as_targets(d.labels()), cfg);
}

/// Trains an autoencoder to reconstruct x (MSE, regardless of cfg.loss).
inline TrainResult train_autoencoder(Network net, const Matrix& x, TrainConfig cfg) {
  cfg.loss = Loss::mse;
  return fit(std::move(net), x, x, cfg);
}

/// Sigmoid output per row.
inline std::vector<double> predict_proba(const Network& net, const Matrix& x) {
  if (net.output_dim() != 1 || net.layers.empty() || net.layers.back().activation != Activation::sigmoid) {
    throw DataError("predict_proba: not a binary classifier network");
  }
  const Matrix out = forward_batch(net, x);
  return {out.data(), out.data() + out.rows()};
}

// Plain-text dump:
//   ghost-network 1
//   sizes <in> <h1> ... <out>
//   activations <a1> ... <aL>
// then per layer: out lines of in weights (row-major), then one line of biases.
inline void write_network(const Network& net, std::ostream& out) {
  out << "ghost-network 1\nsizes";
  for (auto s : net.sizes()) out << ' ' << s;
  out << "\nactivations";
  for (const auto& l : net.layers) out << ' ' << to_string(l.activation);
  out << '\n';
  const auto prec = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& l : net.layers) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) out << (c ? " " : "") << l.weights(r, c);
      out << '\n';
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out << (r ? " " : "") << l.bias(r);
    out << '\n';
  }
  out.precision(prec);
}

inline Network read_network(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "ghost-network" || version != 1) throw DataError("model: bad header");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::istringstream sizes_line(line);
  sizes_line >> tag;
  if (tag != "sizes") throw DataError("model: expected sizes line");
  std::vector<Eigen::Index> sizes;
  for (Eigen::Index s; sizes_line >> s;) sizes.push_back(s);
  if (sizes.size() < 2) throw DataError("model: need at least one layer");
  std::getline(in, line);
  std::istringstream act_line(line);
  act_line >> tag;
  if (tag != "activations") throw DataError("model: expected activations line");
  Network net;
  net.input_dim = sizes[0];
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    std::string a;
    if (!(act_line >> a)) throw DataError("model: missing activation");
    LayerParams p;
    p.activation = activation_from_string(a);
    p.weights.resize(sizes[l], sizes[l - 1]);
    p.bias.resize(sizes[l]);
    for (Eigen::Index r = 0; r < p.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < p.weights.cols(); ++c) {
        if (!(in >> p.weights(r, c))) throw DataError("model: truncated weights");
      }
    }
    for (Eigen::Index r = 0; r < p.bias.size(); ++r) {
      if (!(in >> p.bias(r))) throw DataError("model: truncated biases");
    }
    net.layers.push_back(std::move(p));
  }
  net.validate();
  return net;
}

}  // namespace ghost
