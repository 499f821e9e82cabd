#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "hemcnn/hrf.hpp"
#include "hemcnn/layout.hpp"
#include "hemcnn/rng.hpp"
#include "hemcnn/trial.hpp"

namespace hemcnn {

// Which hemisphere carries the stronger response relative to the gripping
// hand. Motor physiology is contralateral; Ipsi exists so wiring assumptions
// can be tested from both directions.
enum class Laterality { Contra, Ipsi };

inline std::string to_string(Laterality l) {
  return l == Laterality::Contra ? "contra" : "ipsi";
}

inline Laterality laterality_from_string(const std::string& s) {
  if (s == "contra") return Laterality::Contra;
  if (s == "ipsi") return Laterality::Ipsi;
  throw std::runtime_error("unknown laterality '" + s + "'");
}

struct SyntheticConfig {
  int n_subjects = 12;
  int trials_per_hand = 10;
  double fs = 12.6;                        // Hz
  double trial_len_s = 21.0;               // task segment; the response dies out by 21 s
  std::array<double, 2> rest_range_s{15.0, 21.0};
  double hrf_amplitude_active = 1.0;       // uM, hemisphere driven by the grip
  double hrf_amplitude_other = 0.2;        // uM, opposite hemisphere
  Laterality laterality = Laterality::Contra;
  double noise_sd = 0.5;                   // uM white noise
  double drift_slope_sd = 0.0;             // uM/s, per-row linear drift
  std::array<double, 2> gain_range{1.0, 1.0};  // per-trial global gain
  std::uint64_t seed = 0;

  void validate() const {
    if (n_subjects < 1 || trials_per_hand < 1)
      throw std::invalid_argument("synthetic: need >= 1 subject and >= 1 trial per hand");
    if (!(fs > 0.0)) throw std::invalid_argument("synthetic: fs must be positive");
    if (!(trial_len_s >= 21.0))
      throw std::invalid_argument("synthetic: trial_len_s must be >= 21");
    if (!(rest_range_s[0] >= 0.0) || !(rest_range_s[0] <= rest_range_s[1]))
      throw std::invalid_argument("synthetic: rest_range_s must satisfy 0 <= min <= max");
    if (hrf_amplitude_active < 0.0 || hrf_amplitude_other < 0.0)
      throw std::invalid_argument("synthetic: amplitudes must be >= 0");
    if (noise_sd < 0.0 || drift_slope_sd < 0.0)
      throw std::invalid_argument("synthetic: noise and drift sds must be >= 0");
    if (!(gain_range[0] > 0.0) || !(gain_range[0] <= gain_range[1]))
      throw std::invalid_argument("synthetic: gain_range must satisfy 0 < min <= max");
  }
};

namespace detail {

// Peak-normalized canonical HRF bump: r(t) = g(t) / g((shape-1)*scale), so
// the response tops out at exactly 1 at the HRF mode (5 s for the defaults)
// and has essentially returned to zero by 21 s.
class GripResponse {
 public:
  explicit GripResponse(const HrfParams& hrf) : hrf_(hrf) {
    peak_ = canonical_hrf((hrf.shape - 1.0) * hrf.scale, hrf);
    if (!(peak_ > 0.0)) throw std::logic_error("GripResponse: zero peak");
  }

  double operator()(double t) const {
    return t <= 0.0 ? 0.0 : canonical_hrf(t, hrf_) / peak_;
  }

 private:
  HrfParams hrf_;
  double peak_ = 0.0;
};

}  // namespace detail

// Lateralized synthetic grip dataset at the Hb stage. Per trial the active
// hemisphere's HbO rows carry the grip response at hrf_amplitude_active (HbR
// at -1/3 of that), the other hemisphere at hrf_amplitude_other; then a
// per-row linear drift, white noise, and one global gain are applied. Trials
// alternate Left/Right. Deterministic for a fixed config; rng draws per trial
// are rest duration, gain, 48 drift slopes, then noise row-major.
inline Dataset generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const HrfParams hrf{};
  const detail::GripResponse response(hrf);
  Rng rng(cfg.seed);

  Dataset ds;
  for (int subj = 1; subj <= cfg.n_subjects; ++subj) {
    for (int trial = 0; trial < 2 * cfg.trials_per_hand; ++trial) {
      const Hand hand = trial % 2 == 0 ? Hand::Left : Hand::Right;
      const double rest = rng.uniform(cfg.rest_range_s[0], cfg.rest_range_s[1]);
      const double duration = cfg.trial_len_s + rest;
      const int n = static_cast<int>(std::floor(duration * cfg.fs)) + 1;
      const double gain = rng.uniform(cfg.gain_range[0], cfg.gain_range[1]);

      std::array<double, 48> slope{};
      for (double& s : slope) s = cfg.drift_slope_sd > 0.0 ? rng.normal(0.0, cfg.drift_slope_sd) : 0.0;

      const Hemisphere active =
          (hand == Hand::Left) == (cfg.laterality == Laterality::Contra) ? Hemisphere::Right
                                                                         : Hemisphere::Left;
      Tensor2 data(48, n);
      for (int r = 0; r < 48; ++r) {
        const Hemisphere hemi = r < 24 ? Hemisphere::Left : Hemisphere::Right;
        const double amp = hemi == active ? cfg.hrf_amplitude_active : cfg.hrf_amplitude_other;
        const double hb_scale = r % 2 == 0 ? amp : -amp / 3.0;  // even rows HbO
        for (int c = 0; c < n; ++c) {
          const double t = static_cast<double>(c) / cfg.fs;
          const double noise = cfg.noise_sd > 0.0 ? rng.normal(0.0, cfg.noise_sd) : 0.0;
          data(r, c) = gain * (hb_scale * response(t) + slope[r] * t + noise);
        }
      }
      ds.trials.emplace_back(subj, trial, hand, cfg.fs, Stage::Hb, std::move(data));
    }
  }
  return ds;
}

}  // namespace hemcnn
