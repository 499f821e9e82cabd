#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "hemcnn/tensor.hpp"

namespace hemcnn {

// Modified Beer-Lambert law parameters. The extinction matrix is indexed
// [wavelength][chromophore] with chromophore order (HbO, HbR). Defaults are
// standard published molar extinction values for 760/850 nm expressed in
// 1/(mM*cm), a differential pathlength factor of 6 at both wavelengths and
// a 3 cm source-detector separation.
struct MbllParams {
  std::array<std::array<double, 2>, 2> extinction{{{0.586, 1.5485}, {1.058, 0.6913}}};
  std::array<double, 2> dpf{6.0, 6.0};
  double distance = 3.0;  // cm

  void validate() const {
    if (distance <= 0.0) throw std::invalid_argument("mbll: distance must be > 0");
    if (dpf[0] <= 0.0 || dpf[1] <= 0.0)
      throw std::invalid_argument("mbll: dpf must be > 0");
    const double a = extinction[0][0], b = extinction[0][1];
    const double c = extinction[1][0], d = extinction[1][1];
    const double det = a * d - b * c;
    if (det == 0.0) throw std::invalid_argument("mbll: singular extinction matrix");
    // 2-norm condition number from the singular values of the 2x2 system.
    const double t = a * a + b * b + c * c + d * d;
    const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * det * det));
    const double smax = std::sqrt((t + disc) / 2.0);
    const double smin = std::sqrt(std::max(0.0, (t - disc) / 2.0));
    if (smin <= 0.0 || smax / smin >= 1e6)
      throw std::invalid_argument("mbll: extinction matrix ill-conditioned");
  }
};

// Solves dOD_l = eps_{l,c} * dc * d * DPF_l per sample for dc = (dHbO, dHbR):
// dc = E^-1 * (dOD ./ (d * DPF)). Input rows are the two wavelengths, output
// rows the two chromophores. Unit-agnostic: concentrations come out in the
// reciprocal of the extinction units.
inline Tensor2 mbll(const Tensor2& od, const MbllParams& params) {
  params.validate();
  if (od.rows != 2) throw std::invalid_argument("mbll: expected 2 wavelength rows");
  if (!od.all_finite()) throw std::invalid_argument("mbll: non-finite optical density");
  const double a = params.extinction[0][0], b = params.extinction[0][1];
  const double c = params.extinction[1][0], d = params.extinction[1][1];
  const double det = a * d - b * c;
  Tensor2 out(2, od.cols);
  for (int j = 0; j < od.cols; ++j) {
    const double r0 = od(0, j) / (params.distance * params.dpf[0]);
    const double r1 = od(1, j) / (params.distance * params.dpf[1]);
    out(0, j) = (d * r0 - b * r1) / det;
    out(1, j) = (-c * r0 + a * r1) / det;
  }
  return out;
}

// Forward model used for round-trip testing and synthetic OD generation.
inline Tensor2 mbll_forward(const Tensor2& conc, const MbllParams& params) {
  params.validate();
  if (conc.rows != 2) throw std::invalid_argument("mbll_forward: expected 2 chromophore rows");
  Tensor2 od(2, conc.cols);
  for (int j = 0; j < conc.cols; ++j) {
    for (int l = 0; l < 2; ++l) {
      od(l, j) = params.distance * params.dpf[l] *
                 (params.extinction[l][0] * conc(0, j) + params.extinction[l][1] * conc(1, j));
    }
  }
  return od;
}

}  // namespace hemcnn
