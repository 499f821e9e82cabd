#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hemcnn/conv.hpp"
#include "hemcnn/rng.hpp"
#include "hemcnn/tensor.hpp"

namespace hemcnn {

// ELU with alpha = 1: x for x >= 0, exp(x) - 1 otherwise. Gradient is
// continuous at 0 (both sides 1).
inline double elu(double x) { return x >= 0.0 ? x : std::expm1(x); }

inline double elu_grad(double x) { return x >= 0.0 ? 1.0 : std::exp(x); }

inline Tensor2 elu(const Tensor2& x) {
  Tensor2 y = x;
  for (double& v : y.v) v = elu(v);
  return y;
}

inline Tensor2 elu_backward(const Tensor2& x_pre, const Tensor2& grad_y) {
  if (!x_pre.same_shape(grad_y))
    throw std::invalid_argument("elu_backward: shape mismatch");
  Tensor2 g = grad_y;
  for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] *= elu_grad(x_pre.v[i]);
  return g;
}

// Numerically stable 2-way log-softmax via max subtraction.
inline std::array<double, 2> log_softmax(const std::array<double, 2>& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
  return {logits[0] - lse, logits[1] - lse};
}

inline double nll_loss(const std::array<double, 2>& logp, int label) {
  if (label != 0 && label != 1) throw std::invalid_argument("nll_loss: label must be 0 or 1");
  return -logp[label];
}

// d(loss)/d(logits) = softmax - onehot.
inline std::array<double, 2> nll_logits_grad(const std::array<double, 2>& logp, int label) {
  std::array<double, 2> g{std::exp(logp[0]), std::exp(logp[1])};
  g[label] -= 1.0;
  return g;
}

// Adam with classic L2-style weight decay folded into the gradient
// (g' = g + weight_decay * theta) and bias-corrected moments.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-3;
  std::vector<double> m, v;
  long t = 0;

  explicit AdamState(std::size_t n_params = 0, double wd = 1e-3)
      : weight_decay(wd), m(n_params, 0.0), v(n_params, 0.0) {}
};

inline void adam_step(std::vector<double>& params, const std::vector<double>& grads,
                      AdamState& st, double lr) {
  if (params.size() != grads.size() || params.size() != st.m.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  st.t += 1;
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i] + st.weight_decay * params[i];
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g;
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g * g;
    const double mhat = st.m[i] / bc1;
    const double vhat = st.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + st.eps);
  }
}

struct TrainSchedule {
  double lr0 = 0.03;
  double decay_per_epoch = 0.9;
  int epochs = 15;
  int batch_size = 10;

  void validate() const {
    if (!(decay_per_epoch > 0.0 && decay_per_epoch <= 1.0))
      throw std::invalid_argument("schedule: decay_per_epoch must be in (0, 1]");
    if (epochs < 0 || batch_size < 1)
      throw std::invalid_argument("schedule: epochs >= 0 and batch_size >= 1 required");
  }
};

inline double lr_at_epoch(const TrainSchedule& s, int epoch) {
  if (epoch < 0) throw std::invalid_argument("lr_at_epoch: epoch must be >= 0");
  return s.lr0 * std::pow(s.decay_per_epoch, static_cast<double>(epoch));
}

// Kernel init ~ Uniform(-L, L) with L = sqrt(6 / (fan + 1)), bias 0.
// Row-major draw order, so filters are reproducible from the rng stream.
inline ConvFilter init_filter(int m, int n, int stride_r, int stride_c, Rng& rng) {
  const double limit = std::sqrt(6.0 / (static_cast<double>(m) * n + 1.0));
  Tensor2 k(m, n);
  for (double& w : k.v) w = rng.uniform(-limit, limit);
  return ConvFilter(std::move(k), 0.0, stride_r, stride_c);
}

}  // namespace hemcnn
