#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hemcnn {

// 4th-order Butterworth lowpass as a cascade of two biquad sections, each in
// transposed w-state form:
//   w0 = x + d1*w1 + d2*w2;  y = A*(w0 + 2*w1 + w2);  w2 = w1; w1 = w0
// Coefficients from the bilinear transform with a = tan(pi*fc/fs) and pole
// angles pi*(2i+1)/(4n). Each section has DC gain exactly 1.
class ButterworthLP {
 public:
  static constexpr int kOrder = 4;

  ButterworthLP(double fs, double cutoff) {
    if (!(fs > 0.0) || !(cutoff > 0.0))
      throw std::invalid_argument("butterworth: fs and cutoff must be positive");
    if (!(fs > 2.0 * cutoff))
      throw std::invalid_argument("butterworth: cutoff must be below Nyquist");
    const double a = std::tan(std::numbers::pi * cutoff / fs);
    const double a2 = a * a;
    for (int i = 0; i < kOrder / 2; ++i) {
      const double r = std::sin(std::numbers::pi * (2.0 * i + 1.0) / (2.0 * kOrder));
      const double s = a2 + 2.0 * a * r + 1.0;
      sec_[i].A = a2 / s;
      sec_[i].d1 = 2.0 * (1.0 - a2) / s;
      sec_[i].d2 = -(a2 - 2.0 * a * r + 1.0) / s;
    }
  }

  // Single forward pass. Section states start at the steady state for x[0],
  // which avoids a startup transient on signals with a nonzero baseline.
  std::vector<double> filter_forward(const std::vector<double>& x) const {
    std::vector<double> y = x;
    for (const auto& sec : sec_) {
      const double w_ss = y.empty() ? 0.0 : y.front() / (1.0 - sec.d1 - sec.d2);
      double w1 = w_ss, w2 = w_ss;
      for (double& v : y) {
        const double w0 = v + sec.d1 * w1 + sec.d2 * w2;
        v = sec.A * (w0 + 2.0 * w1 + w2);
        w2 = w1;
        w1 = w0;
      }
    }
    return y;
  }

 private:
  struct Section {
    double A = 0.0, d1 = 0.0, d2 = 0.0;
  };
  Section sec_[kOrder / 2];
};

// Zero-phase lowpass: odd-reflection padding at both ends, then
// forward-backward filtering. Squares the magnitude response and cancels the
// phase, so features keep their temporal position.
inline std::vector<double> lowpass(const std::vector<double>& x, double fs, double cutoff) {
  const int n = static_cast<int>(x.size());
  if (n < 3 * ButterworthLP::kOrder)
    throw std::invalid_argument("lowpass: series too short for filter order");
  ButterworthLP filt(fs, cutoff);

  const int pad = std::min(n - 1, static_cast<int>(std::ceil(6.0 * fs / cutoff)));
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (int i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (int i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  ext = filt.filter_forward(ext);
  std::reverse(ext.begin(), ext.end());
  ext = filt.filter_forward(ext);
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + pad, ext.begin() + pad + n);
}

}  // namespace hemcnn
