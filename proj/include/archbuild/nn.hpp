#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "archbuild/errors.hpp"
#include "archbuild/grid.hpp"
#include "archbuild/rng.hpp"

namespace archbuild {

inline constexpr int kNetInputSize = 2 * kCellCount;      // goal then state
inline constexpr int kNetPenultimateSize = kCellCount;    // fixed 36-wide head
inline constexpr int kDefaultHiddenDim = 576;

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
};

/// Plain fully-connected stack: affine + ReLU on every hidden layer, identity
/// on the output layer. All math is double precision.
struct FeedForwardNet {
  std::vector<int> dims;
  std::vector<Matrix> weights;               // weights[l]: dims[l+1] x dims[l]
  std::vector<std::vector<double>> biases;   // biases[l]: dims[l+1]

  int input_size() const { return dims.front(); }
  int output_size() const { return dims.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }

  std::vector<double> forward(std::span<const double> input) const {
    std::vector<double> cur(input.begin(), input.end());
    std::vector<double> next;
    for (int l = 0; l < layer_count(); ++l) {
      affine(l, cur, next);
      if (l + 1 < layer_count()) relu(next);
      std::swap(cur, next);
    }
    return cur;
  }

  void affine(int l, const std::vector<double>& in, std::vector<double>& out) const {
    const Matrix& w = weights[static_cast<std::size_t>(l)];
    const std::vector<double>& b = biases[static_cast<std::size_t>(l)];
    out.assign(static_cast<std::size_t>(w.rows), 0.0);
    const double* wp = w.data.data();
    for (int i = 0; i < w.rows; ++i) {
      const double* row = wp + static_cast<std::size_t>(i) * w.cols;
      double acc = b[static_cast<std::size_t>(i)];
      for (int j = 0; j < w.cols; ++j) acc += row[j] * in[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(i)] = acc;
    }
  }

  static void relu(std::vector<double>& v) {
    for (double& x : v) {
      if (x < 0.0) x = 0.0;
    }
  }
};

/// acts[0] is the input, acts[l+1] the post-activation output of layer l.
struct ForwardTrace {
  std::vector<std::vector<double>> acts;
};

inline void forward_trace(const FeedForwardNet& net, std::span<const double> input,
                          ForwardTrace& trace) {
  trace.acts.resize(static_cast<std::size_t>(net.layer_count()) + 1);
  trace.acts[0].assign(input.begin(), input.end());
  for (int l = 0; l < net.layer_count(); ++l) {
    net.affine(l, trace.acts[static_cast<std::size_t>(l)],
               trace.acts[static_cast<std::size_t>(l) + 1]);
    if (l + 1 < net.layer_count()) FeedForwardNet::relu(trace.acts[static_cast<std::size_t>(l) + 1]);
  }
}

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  static Gradients like(const FeedForwardNet& net) {
    Gradients g;
    for (const Matrix& w : net.weights) g.weights.emplace_back(w.rows, w.cols);
    for (const auto& b : net.biases) g.biases.emplace_back(b.size(), 0.0);
    return g;
  }

  void zero() {
    for (Matrix& w : weights) std::fill(w.data.begin(), w.data.end(), 0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
  }

  bool shape_matches(const FeedForwardNet& net) const {
    if (weights.size() != net.weights.size() || biases.size() != net.biases.size()) {
      return false;
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
      if (weights[l].rows != net.weights[l].rows ||
          weights[l].cols != net.weights[l].cols ||
          biases[l].size() != net.biases[l].size()) {
        return false;
      }
    }
    return true;
  }
};

/// Reverse-mode gradients of sum(output .* output_grad); accumulates into `out`.
/// ReLU derivative at exactly 0 is taken as 0.
inline void backward(const FeedForwardNet& net, const ForwardTrace& trace,
                     std::span<const double> output_grad, Gradients& out) {
  int layers = net.layer_count();
  std::vector<double> grad(output_grad.begin(), output_grad.end());
  std::vector<double> prev;
  for (int l = layers - 1; l >= 0; --l) {
    const Matrix& w = net.weights[static_cast<std::size_t>(l)];
    const std::vector<double>& act_in = trace.acts[static_cast<std::size_t>(l)];
    Matrix& wg = out.weights[static_cast<std::size_t>(l)];
    std::vector<double>& bg = out.biases[static_cast<std::size_t>(l)];
    prev.assign(static_cast<std::size_t>(w.cols), 0.0);
    for (int i = 0; i < w.rows; ++i) {
      double gi = grad[static_cast<std::size_t>(i)];
      bg[static_cast<std::size_t>(i)] += gi;
      const double* wrow = w.data.data() + static_cast<std::size_t>(i) * w.cols;
      double* grow = wg.data.data() + static_cast<std::size_t>(i) * w.cols;
      if (gi == 0.0) continue;
      for (int j = 0; j < w.cols; ++j) {
        grow[j] += gi * act_in[static_cast<std::size_t>(j)];
        prev[static_cast<std::size_t>(j)] += gi * wrow[j];
      }
    }
    if (l > 0) {
      // act_in is post-ReLU for hidden layers: derivative is 1 where it is > 0.
      for (int j = 0; j < w.cols; ++j) {
        if (act_in[static_cast<std::size_t>(j)] <= 0.0) prev[static_cast<std::size_t>(j)] = 0.0;
      }
    }
    std::swap(grad, prev);
  }
}

/// He-uniform: weights ~ U(-sqrt(6/fan_in), +sqrt(6/fan_in)), biases zero.
inline FeedForwardNet make_network(std::vector<int> dims, Rng& rng) {
  if (dims.size() < 2) throw ConfigError("network needs at least two layer dims");
  FeedForwardNet net;
  net.dims = std::move(dims);
  for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
    int fan_in = net.dims[l];
    int fan_out = net.dims[l + 1];
    Matrix w(fan_out, fan_in);
    double limit = std::sqrt(6.0 / fan_in);
    for (double& x : w.data) x = (2.0 * rng.next_double() - 1.0) * limit;
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
  }
  return net;
}

inline std::vector<int> architect_dims(int m_max, int hidden = kDefaultHiddenDim) {
  return {kNetInputSize, hidden, hidden, hidden, kNetPenultimateSize, m_max};
}

inline FeedForwardNet make_architect_network(int m_max, Rng& rng,
                                             int hidden = kDefaultHiddenDim) {
  return make_network(architect_dims(m_max, hidden), rng);
}

enum class OptimizerKind { sgd, adam };

inline std::string optimizer_kind_name(OptimizerKind kind) {
  return kind == OptimizerKind::sgd ? "sgd" : "adam";
}

inline OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw ConfigError("unknown optimizer '" + name + "' (want sgd or adam)");
}

struct Optimizer {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step_count = 0;
  Gradients m;  // first moments (adam only)
  Gradients v;  // second moments (adam only)

  static Optimizer make(OptimizerKind kind, double learning_rate,
                        const FeedForwardNet& net) {
    Optimizer opt;
    opt.kind = kind;
    opt.learning_rate = learning_rate;
    if (kind == OptimizerKind::adam) {
      opt.m = Gradients::like(net);
      opt.v = Gradients::like(net);
    }
    return opt;
  }

  void apply(FeedForwardNet& net, const Gradients& grads) {
    if (!grads.shape_matches(net)) {
      throw DimensionMismatch("gradient shapes do not match the network");
    }
    ++step_count;
    if (kind == OptimizerKind::sgd) {
      for (std::size_t l = 0; l < net.weights.size(); ++l) {
        apply_sgd(net.weights[l].data, grads.weights[l].data);
        apply_sgd(net.biases[l], grads.biases[l]);
      }
      return;
    }
    double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      apply_adam(net.weights[l].data, grads.weights[l].data, m.weights[l].data,
                 v.weights[l].data, c1, c2);
      apply_adam(net.biases[l], grads.biases[l], m.biases[l], v.biases[l], c1, c2);
    }
  }

 private:
  void apply_sgd(std::vector<double>& params, const std::vector<double>& g) const {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * g[i];
  }

  void apply_adam(std::vector<double>& params, const std::vector<double>& g,
                  std::vector<double>& m1, std::vector<double>& m2, double c1,
                  double c2) const {
    for (std::size_t i = 0; i < params.size(); ++i) {
      m1[i] = beta1 * m1[i] + (1.0 - beta1) * g[i];
      m2[i] = beta2 * m2[i] + (1.0 - beta2) * g[i] * g[i];
      double mhat = m1[i] / c1;
      double vhat = m2[i] / c2;
      params[i] -= learning_rate * mhat / (std::sqrt(vhat) + epsilon);
    }
  }
};

}  // namespace archbuild
