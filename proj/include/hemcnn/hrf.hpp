#pragma once

#include <cmath>
#include <stdexcept>

namespace hemcnn {

// Canonical hemodynamic response as a single gamma density. The defaults
// (shape 6, scale 1 s) put the peak at (k-1)*tau = 5 s after onset.
struct HrfParams {
  double shape = 6.0;     // k, dimensionless
  double scale = 1.0;     // tau, seconds
  double duration = 20.0; // kernel support used when building regressors, seconds

  void validate() const {
    if (!(shape > 1.0)) throw std::invalid_argument("hrf: shape must be > 1");
    if (!(scale > 0.0)) throw std::invalid_argument("hrf: scale must be > 0");
    if (!(duration > 0.0)) throw std::invalid_argument("hrf: duration must be > 0");
  }
};

// h(t) = (t/tau)^(k-1) exp(-t/tau) / (tau * Gamma(k)); integrates to 1 over
// [0, inf) and vanishes for t <= 0 when k > 1.
inline double canonical_hrf(double t, const HrfParams& p) {
  p.validate();
  if (t < 0.0) throw std::invalid_argument("canonical_hrf: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double u = t / p.scale;
  return std::pow(u, p.shape - 1.0) * std::exp(-u) / (p.scale * std::tgamma(p.shape));
}

}  // namespace hemcnn
