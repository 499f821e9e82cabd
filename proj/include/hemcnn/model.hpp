#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "hemcnn/layout.hpp"
#include "hemcnn/nn.hpp"
#include "hemcnn/rng.hpp"

namespace hemcnn {

// Which hemoglobin rows the model consumes. Both = HbO and HbR interleaved
// (48 rows); the single-Hb variants see 24 rows of one type.
enum class Variant { Both, HbOOnly, HbROnly };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::Both: return "both";
    case Variant::HbOOnly: return "hbo_only";
    case Variant::HbROnly: return "hbr_only";
  }
  throw std::logic_error("bad variant");
}

inline Variant variant_from_string(const std::string& s) {
  for (Variant v : {Variant::Both, Variant::HbOOnly, Variant::HbROnly})
    if (to_string(v) == s) return v;
  throw std::runtime_error("unknown variant '" + s + "'");
}

// The four-filter network. Each layer applies exactly one filter; the first
// merges HbO/HbR row pairs (or runs per-row for single-Hb input), the last
// collapses each hemisphere's 12 rows into one output logit. Logit 0 is the
// left hand and is wired to the left-hemisphere rows (the top half), which is
// what makes per-hemisphere traceability possible.
struct HemCNNModel {
  Variant variant = Variant::Both;
  ConvFilter cf1, cf2, cf3, cf4;
  std::string layout_fingerprint;

  int input_rows() const { return variant == Variant::Both ? 48 : 24; }
  static constexpr int kInputCols = 38;  // 19 s at 2 Hz

  int param_count() const {
    return cf1.param_count() + cf2.param_count() + cf3.param_count() + cf4.param_count();
  }
};

inline HemCNNModel build(Variant variant, const ChannelLayout& layout, Rng& rng) {
  HemCNNModel m;
  m.variant = variant;
  m.layout_fingerprint = layout.fingerprint();
  if (variant == Variant::Both) {
    m.cf1 = init_filter(2, 10, 2, 1, rng);  // merge each HbO/HbR pair
  } else {
    m.cf1 = init_filter(1, 10, 1, 1, rng);  // one row per channel already
  }
  m.cf2 = init_filter(1, 5, 1, 2, rng);
  m.cf3 = init_filter(1, 5, 1, 2, rng);
  m.cf4 = init_filter(12, 5, 12, 5, rng);  // one hemisphere block per logit
  return m;
}

// Extracts the rows a variant consumes from a full 48-row matrix. Row order
// interleaves HbO (even) and HbR (odd); selection preserves the
// left-rows-on-top ordering, so hemisphere structure survives.
inline Tensor2 select_variant_rows(const Tensor2& x48, Variant variant) {
  if (variant == Variant::Both) return x48;
  if (x48.rows != 48)
    throw std::invalid_argument("select_variant_rows: expected 48 input rows");
  const int parity = variant == Variant::HbOOnly ? 0 : 1;
  Tensor2 out(24, x48.cols);
  for (int r = 0; r < 24; ++r)
    for (int c = 0; c < x48.cols; ++c) out(r, c) = x48(2 * r + parity, c);
  return out;
}

struct ForwardTrace {
  Tensor2 z1, a1, z2, a2, z3, a3;  // pre/post-activation per layer
  std::array<double, 2> logits{0.0, 0.0};
  std::array<double, 2> logp{0.0, 0.0};
};

inline ForwardTrace forward(const HemCNNModel& m, const Tensor2& x) {
  if (x.rows != m.input_rows() || x.cols != HemCNNModel::kInputCols)
    throw std::invalid_argument("forward: expected " + std::to_string(m.input_rows()) + "x" +
                                std::to_string(HemCNNModel::kInputCols) + " input, got " +
                                std::to_string(x.rows) + "x" + std::to_string(x.cols));
  ForwardTrace t;
  t.z1 = conv2d_forward(x, m.cf1);
  t.a1 = elu(t.z1);
  t.z2 = conv2d_forward(t.a1, m.cf2);
  t.a2 = elu(t.z2);
  t.z3 = conv2d_forward(t.a2, m.cf3);
  t.a3 = elu(t.z3);
  const Tensor2 out = conv2d_forward(t.a3, m.cf4);
  if (out.rows != 2 || out.cols != 1)
    throw std::logic_error("forward: output layer did not collapse to 2x1");
  t.logits = {out(0, 0), out(1, 0)};
  t.logp = log_softmax(t.logits);
  return t;
}

inline Hand predict(const HemCNNModel& m, const Tensor2& x) {
  const ForwardTrace t = forward(m, x);
  // exact tie -> Left
  return t.logp[1] > t.logp[0] ? Hand::Right : Hand::Left;
}

// Flat parameter vector in cf1..cf4 order, kernel entries row-major followed
// by the bias. Adam and serialization both use this layout.
inline std::vector<double> get_params(const HemCNNModel& m) {
  std::vector<double> p;
  p.reserve(m.param_count());
  for (const ConvFilter* f : {&m.cf1, &m.cf2, &m.cf3, &m.cf4}) {
    p.insert(p.end(), f->kernel.v.begin(), f->kernel.v.end());
    p.push_back(f->bias);
  }
  return p;
}

inline void set_params(HemCNNModel& m, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != m.param_count())
    throw std::invalid_argument("set_params: expected " + std::to_string(m.param_count()) +
                                " parameters, got " + std::to_string(p.size()));
  std::size_t i = 0;
  for (ConvFilter* f : {&m.cf1, &m.cf2, &m.cf3, &m.cf4}) {
    for (double& w : f->kernel.v) w = p[i++];
    f->bias = p[i++];
  }
}

// Gradient of nll_loss(forward(m, x), label) w.r.t. all parameters, same flat
// layout as get_params. `scale` multiplies the loss (used for batch
// averaging).
inline void backward_accumulate(const HemCNNModel& m, const Tensor2& x, const ForwardTrace& t,
                                int label, double scale, std::vector<double>& grad_out) {
  if (static_cast<int>(grad_out.size()) != m.param_count())
    throw std::invalid_argument("backward_accumulate: gradient buffer size mismatch");
  std::array<double, 2> dlogits = nll_logits_grad(t.logp, label);
  Tensor2 d_out(2, 1);
  d_out(0, 0) = dlogits[0] * scale;
  d_out(1, 0) = dlogits[1] * scale;

  const ConvGrad g4 = conv2d_backward(t.a3, m.cf4, d_out);
  const Tensor2 d_z3 = elu_backward(t.z3, g4.input);
  const ConvGrad g3 = conv2d_backward(t.a2, m.cf3, d_z3);
  const Tensor2 d_z2 = elu_backward(t.z2, g3.input);
  const ConvGrad g2 = conv2d_backward(t.a1, m.cf2, d_z2);
  const Tensor2 d_z1 = elu_backward(t.z1, g2.input);
  const ConvGrad g1 = conv2d_backward(x, m.cf1, d_z1);

  std::size_t i = 0;
  for (const ConvGrad* g : {&g1, &g2, &g3, &g4}) {
    for (double w : g->kernel.v) grad_out[i++] += w;
    grad_out[i++] += g->bias;
  }
}

struct DropoutConfig {
  double apply_probability = 0.5;

  void validate() const {
    if (!(apply_probability >= 0.0 && apply_probability <= 1.0))
      throw std::invalid_argument("dropout: apply_probability must be in [0, 1]");
  }
};

// Zeroes the rows of one hemisphere. Rows are hemisphere-ordered (top half
// left) for every variant, so "half the rows" is the hemisphere partition.
inline void zero_hemisphere(Tensor2& x, Hemisphere side) {
  if (x.rows % 2 != 0)
    throw std::invalid_argument("zero_hemisphere: expected an even row count");
  const int lo = side == Hemisphere::Left ? 0 : x.rows / 2;
  const int hi = side == Hemisphere::Left ? x.rows / 2 : x.rows;
  for (int r = lo; r < hi; ++r)
    for (int c = 0; c < x.cols; ++c) x(r, c) = 0.0;
}

// With probability apply_probability zeroes one uniformly chosen hemisphere;
// otherwise leaves the input untouched. Training-time only.
inline Tensor2 hemisphere_dropout(const Tensor2& x, const DropoutConfig& cfg, Rng& rng) {
  cfg.validate();
  Tensor2 out = x;
  const double u = rng.uniform01();
  if (u < cfg.apply_probability) {
    const Hemisphere side = rng.uniform_int(2) == 0 ? Hemisphere::Left : Hemisphere::Right;
    zero_hemisphere(out, side);
  }
  return out;
}

}  // namespace hemcnn
