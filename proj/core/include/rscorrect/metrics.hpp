#pragma once

#include <utility>

#include "rscorrect/frame.hpp"

namespace rscorrect {

inline constexpr double kCharbonnierEps = 1e-3;
inline constexpr double kPsnrCap = 99.0;

/// Metrics take an optional `border`: that many rows/cols are dropped from
/// every side of both images before scoring.

/// mean(sqrt(d^2 + eps^2)) - eps over all samples; 0 for identical inputs.
double charbonnier(const Frame& a, const Frame& b, double eps = kCharbonnierEps,
                   int border = 0);

/// 10 log10(1 / MSE), capped at 99 dB.
double psnr(const Frame& a, const Frame& b, int border = 0);

/// Mean single-scale SSIM over valid 11x11 Gaussian windows (sigma 1.5,
/// K1 0.01, K2 0.03, range 1), averaged over channels.
double ssim(const Frame& a, const Frame& b, int border = 0);

struct LossReport {
  double l_se = 0.0;
  double l_sme = 0.0;
  double l_self = 0.0;
  // Per-image terms: full t2b, full b2t, mid t2b, mid b2t.
  double se_t2b = 0.0;
  double se_b2t = 0.0;
  double sme_t2b = 0.0;
  double sme_b2t = 0.0;
  int border = 0;
};

using FramePair = std::pair<Frame, Frame>;  // (t2b, b2t)

LossReport cycle_losses(const FramePair& inputs, const FramePair& recon_full,
                        const FramePair& recon_mid, int border = 0,
                        double eps = kCharbonnierEps);

}  // namespace rscorrect
