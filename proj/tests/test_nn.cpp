#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <vector>

#include "hemcnn/conv.hpp"
#include "hemcnn/nn.hpp"
#include "hemcnn/rng.hpp"

using namespace hemcnn;

// ---------------------------------------------------------------------------
// Activations and loss

TEST_CASE("elu matches its definition on both branches") {
  CHECK(elu(0.0) == 0.0);
  CHECK(elu(2.5) == 2.5);
  CHECK_THAT(elu(-1.0), Catch::Matchers::WithinAbs(std::expm1(-1.0), 1e-15));
  CHECK(elu_grad(3.0) == 1.0);
  CHECK_THAT(elu_grad(-2.0), Catch::Matchers::WithinAbs(std::exp(-2.0), 1e-15));
  // The derivative is continuous at zero.
  CHECK_THAT(elu_grad(-1e-12), Catch::Matchers::WithinAbs(1.0, 1e-9));
  // elu(x) + 1 equals the gradient below zero, the usual identity.
  CHECK_THAT(elu(-0.7) + 1.0, Catch::Matchers::WithinAbs(elu_grad(-0.7), 1e-15));
}

TEST_CASE("elu tensor form applies elementwise") {
  Tensor2 x(2, 3);
  x(0, 0) = -1.0; x(0, 1) = 0.0; x(0, 2) = 2.0;
  x(1, 0) = -3.0; x(1, 1) = 0.5; x(1, 2) = -0.25;
  const Tensor2 y = elu(x);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) CHECK(y(r, c) == elu(x(r, c)));

  Tensor2 g(2, 3, 1.0);
  g(1, 2) = -2.0;
  const Tensor2 gx = elu_backward(x, g);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 3; ++c) CHECK(gx(r, c) == g(r, c) * elu_grad(x(r, c)));
}

TEST_CASE("log_softmax normalizes and shrugs off constant shifts") {
  const std::array<double, 2> lp = log_softmax({1.3, -0.4});
  CHECK_THAT(std::exp(lp[0]) + std::exp(lp[1]), Catch::Matchers::WithinAbs(1.0, 1e-12));
  const std::array<double, 2> shifted = log_softmax({1.3 + 500.0, -0.4 + 500.0});
  CHECK_THAT(shifted[0], Catch::Matchers::WithinAbs(lp[0], 1e-12));
  CHECK_THAT(shifted[1], Catch::Matchers::WithinAbs(lp[1], 1e-12));
  // Extreme logits stay finite thanks to the max subtraction.
  const std::array<double, 2> big = log_softmax({1000.0, -1000.0});
  CHECK(std::isfinite(big[0]));
  CHECK(std::isfinite(big[1]));
  CHECK_THAT(big[0], Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("nll loss and gradient agree with softmax probabilities") {
  const std::array<double, 2> logits{0.7, -1.1};
  const std::array<double, 2> lp = log_softmax(logits);
  CHECK(nll_loss(lp, 0) == -lp[0]);
  CHECK(nll_loss(lp, 1) == -lp[1]);

  const std::array<double, 2> g = nll_logits_grad(lp, 0);
  CHECK_THAT(g[0], Catch::Matchers::WithinAbs(std::exp(lp[0]) - 1.0, 1e-12));
  CHECK_THAT(g[1], Catch::Matchers::WithinAbs(std::exp(lp[1]), 1e-12));

  // Central finite differences on the composite loss.
  for (int label = 0; label < 2; ++label) {
    const std::array<double, 2> grad = nll_logits_grad(log_softmax(logits), label);
    for (int i = 0; i < 2; ++i) {
      const double h = 1e-6;
      std::array<double, 2> up = logits, dn = logits;
      up[i] += h;
      dn[i] -= h;
      const double fd =
          (nll_loss(log_softmax(up), label) - nll_loss(log_softmax(dn), label)) / (2.0 * h);
      CHECK_THAT(grad[i], Catch::Matchers::WithinAbs(fd, 1e-8));
    }
  }
}

// ---------------------------------------------------------------------------
// Adam and schedule

TEST_CASE("first adam step moves a zero parameter by almost exactly -lr") {
  std::vector<double> params{0.0};
  std::vector<double> grads{1.0};
  AdamState st(1);
  adam_step(params, grads, st, 0.03);
  CHECK(std::fabs(params[0] + 0.03) <= 1e-6);
  CHECK(st.t == 1);
}

TEST_CASE("adam applies coupled weight decay") {
  // Zero gradient, nonzero parameter: the only force is decay, so the
  // parameter must shrink toward zero.
  std::vector<double> params{2.0};
  std::vector<double> grads{0.0};
  AdamState st(1);
  adam_step(params, grads, st, 0.01);
  CHECK(params[0] < 2.0);
  CHECK(params[0] > 1.9);

  AdamState none(1, 0.0);
  std::vector<double> p2{2.0};
  adam_step(p2, grads, none, 0.01);
  CHECK(p2[0] == 2.0);  // no decay, no gradient, no movement
}

TEST_CASE("adam converges on a quadratic") {
  std::vector<double> params{4.0};
  AdamState st(1, 0.0);
  for (int i = 0; i < 3000; ++i) {
    std::vector<double> grads{2.0 * (params[0] - 1.5)};
    adam_step(params, grads, st, 0.01);
  }
  CHECK_THAT(params[0], Catch::Matchers::WithinAbs(1.5, 1e-3));
}

TEST_CASE("adam_step validates shapes") {
  std::vector<double> params{0.0, 0.0};
  std::vector<double> grads{1.0};
  AdamState st(2);
  CHECK_THROWS_AS(adam_step(params, grads, st, 0.01), std::invalid_argument);
}

TEST_CASE("learning-rate schedule decays geometrically") {
  const TrainSchedule s;
  CHECK(lr_at_epoch(s, 0) == 0.03);
  CHECK(std::fabs(lr_at_epoch(s, 14) - 0.03 * std::pow(0.9, 14.0)) <= 1e-12);
  CHECK(std::fabs(lr_at_epoch(s, 14) - 0.006863037736488302) <= 1e-12);
  CHECK(lr_at_epoch(s, 1) < lr_at_epoch(s, 0));
  CHECK_THROWS_AS(lr_at_epoch(s, -1), std::invalid_argument);

  TrainSchedule bad;
  bad.decay_per_epoch = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = TrainSchedule{};
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Filter init

TEST_CASE("init_filter draws inside the fan-based bound with zero bias") {
  Rng rng(31);
  const int m = 2, n = 10;
  const ConvFilter f = init_filter(m, n, 2, 1, rng);
  REQUIRE(f.kernel.rows == m);
  REQUIRE(f.kernel.cols == n);
  CHECK(f.stride_r == 2);
  CHECK(f.stride_c == 1);
  CHECK(f.bias == 0.0);
  const double limit = std::sqrt(6.0 / (m * n + 1.0));
  bool near_edge = false;
  for (double w : f.kernel.v) {
    CHECK(std::fabs(w) <= limit);
    near_edge = near_edge || std::fabs(w) > 0.5 * limit;
  }
  CHECK(near_edge);  // the range is actually used

  Rng again(31);
  const ConvFilter g = init_filter(m, n, 2, 1, again);
  CHECK(g.kernel.v == f.kernel.v);
}

// ---------------------------------------------------------------------------
// Convolution

namespace {

// Straight quadruple loop; the library version is checked against this.
Tensor2 conv_reference(const Tensor2& input, const ConvFilter& f) {
  const int out_r = conv_out_dim(input.rows, f.kernel.rows, f.stride_r);
  const int out_c = conv_out_dim(input.cols, f.kernel.cols, f.stride_c);
  Tensor2 out(out_r, out_c);
  for (int i = 0; i < out_r; ++i)
    for (int j = 0; j < out_c; ++j) {
      double s = f.bias;
      for (int a = 0; a < f.kernel.rows; ++a)
        for (int b = 0; b < f.kernel.cols; ++b)
          s += f.kernel(a, b) * input(i * f.stride_r + a, j * f.stride_c + b);
      out(i, j) = s;
    }
  return out;
}

ConvFilter random_filter(int m, int n, int sr, int sc, Rng& rng) {
  ConvFilter f = init_filter(m, n, sr, sc, rng);
  f.bias = rng.uniform(-0.5, 0.5);
  return f;
}

}  // namespace

TEST_CASE("conv_out_dim follows the valid-convolution formula") {
  CHECK(conv_out_dim(48, 2, 2) == 24);
  CHECK(conv_out_dim(38, 10, 1) == 29);
  CHECK(conv_out_dim(29, 5, 2) == 13);
  CHECK(conv_out_dim(13, 5, 2) == 5);
  CHECK(conv_out_dim(24, 12, 12) == 2);
  CHECK(conv_out_dim(5, 5, 5) == 1);
}

TEST_CASE("conv2d_forward matches the brute-force reference") {
  Rng rng(91);
  const struct { int r, c, kr, kc, sr, sc; } shapes[] = {
      {48, 38, 2, 10, 2, 1}, {24, 29, 1, 5, 1, 2}, {24, 13, 1, 5, 1, 2},
      {24, 5, 12, 5, 12, 5}, {7, 9, 3, 4, 2, 3},
  };
  for (const auto& s : shapes) {
    Tensor2 x(s.r, s.c);
    for (double& v : x.v) v = rng.normal();
    const ConvFilter f = random_filter(s.kr, s.kc, s.sr, s.sc, rng);
    const Tensor2 got = conv2d_forward(x, f);
    const Tensor2 want = conv_reference(x, f);
    REQUIRE(got.rows == want.rows);
    REQUIRE(got.cols == want.cols);
    for (std::size_t i = 0; i < got.v.size(); ++i)
      CHECK_THAT(got.v[i], Catch::Matchers::WithinAbs(want.v[i], 1e-12));
  }
}

TEST_CASE("conv2d_backward gradients pass central finite differences") {
  Rng rng(17);
  Tensor2 x(6, 8);
  for (double& v : x.v) v = rng.normal();
  ConvFilter f = random_filter(2, 3, 2, 1, rng);

  // Scalar objective: weighted sum of the outputs.
  const Tensor2 y0 = conv2d_forward(x, f);
  Tensor2 w(y0.rows, y0.cols);
  for (double& v : w.v) v = rng.uniform(-1.0, 1.0);
  auto objective = [&w](const Tensor2& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.v.size(); ++i) s += w.v[i] * y.v[i];
    return s;
  };

  const ConvGrad g = conv2d_backward(x, f, w);
  const double h = 1e-6;

  for (int a = 0; a < f.kernel.rows; ++a)
    for (int b = 0; b < f.kernel.cols; ++b) {
      ConvFilter up = f, dn = f;
      up.kernel(a, b) += h;
      dn.kernel(a, b) -= h;
      const double fd = (objective(conv2d_forward(x, up)) - objective(conv2d_forward(x, dn))) /
                        (2.0 * h);
      CHECK_THAT(g.kernel(a, b), Catch::Matchers::WithinAbs(fd, 1e-7));
    }

  {
    ConvFilter up = f, dn = f;
    up.bias += h;
    dn.bias -= h;
    const double fd = (objective(conv2d_forward(x, up)) - objective(conv2d_forward(x, dn))) /
                      (2.0 * h);
    CHECK_THAT(g.bias, Catch::Matchers::WithinAbs(fd, 1e-7));
  }

  for (int r = 0; r < x.rows; ++r)
    for (int c = 0; c < x.cols; ++c) {
      Tensor2 up = x, dn = x;
      up(r, c) += h;
      dn(r, c) -= h;
      const double fd = (objective(conv2d_forward(up, f)) - objective(conv2d_forward(dn, f))) /
                        (2.0 * h);
      CHECK_THAT(g.input(r, c), Catch::Matchers::WithinAbs(fd, 1e-7));
    }
}

TEST_CASE("conv2d_backward skips cells with zero upstream gradient") {
  Rng rng(3);
  Tensor2 x(4, 6);
  for (double& v : x.v) v = rng.normal();
  const ConvFilter f = random_filter(2, 2, 2, 2, rng);
  Tensor2 zero_up(conv_out_dim(4, 2, 2), conv_out_dim(6, 2, 2), 0.0);
  const ConvGrad g = conv2d_backward(x, f, zero_up);
  for (double v : g.kernel.v) CHECK(v == 0.0);
  CHECK(g.bias == 0.0);
  for (double v : g.input.v) CHECK(v == 0.0);
}
