#pragma once

#include <stdexcept>
#include <string>

#include "hemcnn/tensor.hpp"

namespace hemcnn {

// One convolutional filter: a single kernel, scalar bias and a 2-D stride.
// Convolution here means valid (no padding) cross-correlation, the usual
// deep-learning convention.
struct ConvFilter {
  Tensor2 kernel;
  double bias = 0.0;
  int stride_r = 1;
  int stride_c = 1;

  ConvFilter() = default;
  ConvFilter(Tensor2 k, double b, int sr, int sc)
      : kernel(std::move(k)), bias(b), stride_r(sr), stride_c(sc) {
    if (kernel.rows < 1 || kernel.cols < 1 || stride_r < 1 || stride_c < 1)
      throw std::invalid_argument("ConvFilter: kernel dims and strides must be >= 1");
  }

  int param_count() const { return kernel.rows * kernel.cols + 1; }
};

inline int conv_out_dim(int in, int k, int stride) { return (in - k) / stride + 1; }

inline Tensor2 conv2d_forward(const Tensor2& input, const ConvFilter& f) {
  if (input.rows < f.kernel.rows || input.cols < f.kernel.cols)
    throw std::invalid_argument("conv2d_forward: kernel larger than input (" +
                                std::to_string(input.rows) + "x" + std::to_string(input.cols) +
                                " vs " + std::to_string(f.kernel.rows) + "x" +
                                std::to_string(f.kernel.cols) + ")");
  const int out_r = conv_out_dim(input.rows, f.kernel.rows, f.stride_r);
  const int out_c = conv_out_dim(input.cols, f.kernel.cols, f.stride_c);
  Tensor2 out(out_r, out_c);
  for (int i = 0; i < out_r; ++i) {
    for (int j = 0; j < out_c; ++j) {
      double acc = f.bias;
      const int base_r = i * f.stride_r;
      const int base_c = j * f.stride_c;
      for (int a = 0; a < f.kernel.rows; ++a)
        for (int b = 0; b < f.kernel.cols; ++b)
          acc += f.kernel(a, b) * input(base_r + a, base_c + b);
      out(i, j) = acc;
    }
  }
  return out;
}

struct ConvGrad {
  Tensor2 kernel;
  double bias = 0.0;
  Tensor2 input;
};

// Gradients of sum(out .* grad_out) w.r.t. kernel, bias and input.
inline ConvGrad conv2d_backward(const Tensor2& input, const ConvFilter& f,
                                const Tensor2& grad_out) {
  const int out_r = conv_out_dim(input.rows, f.kernel.rows, f.stride_r);
  const int out_c = conv_out_dim(input.cols, f.kernel.cols, f.stride_c);
  if (grad_out.rows != out_r || grad_out.cols != out_c)
    throw std::invalid_argument("conv2d_backward: grad_out shape mismatch");
  ConvGrad g;
  g.kernel = Tensor2(f.kernel.rows, f.kernel.cols);
  g.input = Tensor2(input.rows, input.cols);
  for (int i = 0; i < out_r; ++i) {
    for (int j = 0; j < out_c; ++j) {
      const double go = grad_out(i, j);
      if (go == 0.0) continue;
      g.bias += go;
      const int base_r = i * f.stride_r;
      const int base_c = j * f.stride_c;
      for (int a = 0; a < f.kernel.rows; ++a) {
        for (int b = 0; b < f.kernel.cols; ++b) {
          g.kernel(a, b) += go * input(base_r + a, base_c + b);
          g.input(base_r + a, base_c + b) += go * f.kernel(a, b);
        }
      }
    }
  }
  return g;
}

}  // namespace hemcnn
