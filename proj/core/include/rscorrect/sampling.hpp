#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rscorrect/frame.hpp"

namespace rscorrect {

struct PixelSample {
  std::array<float, 3> value{};
  int channels = 0;
  bool in_bounds = false;
};

/// Bilinear interpolation at column x, row y. Coordinates outside
/// [0,W-1] x [0,H-1] are clamped to the edge and reported out of bounds.
/// Exact at grid nodes.
PixelSample bilinear_sample(const Frame& frame, double x, double y);

struct WarpResult {
  Frame frame;
  std::vector<std::uint8_t> valid;  // per pixel
};

/// out[p] = src(p + flow[p]). Invalid where the flow is invalid or the sample
/// left the image.
WarpResult backward_warp(const Frame& src, const FlowField& flow);

/// residual + mask * a + (1 - mask) * b, clamped to [0,1].
Frame blend_masked(const Frame& a, const Frame& b, const FusionMask& mask,
                   const Frame& residual);

/// Same without a residual term.
Frame blend_masked(const Frame& a, const Frame& b, const FusionMask& mask);

}  // namespace rscorrect
