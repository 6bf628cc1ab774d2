#include "rscorrect/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "rscorrect/error.hpp"
#include "rscorrect/parallel.hpp"

namespace rscorrect {

PixelSample bilinear_sample(const Frame& frame, double x, double y) {
  const int w = frame.width();
  const int h = frame.height();
  PixelSample s;
  s.channels = frame.channels();
  s.in_bounds = std::isfinite(x) && std::isfinite(y) && x >= 0.0 &&
                y >= 0.0 && x <= w - 1 && y <= h - 1;
  if (!std::isfinite(x)) x = 0.0;
  if (!std::isfinite(y)) y = 0.0;
  const double xc = std::clamp(x, 0.0, static_cast<double>(w - 1));
  const double yc = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = std::min(static_cast<int>(xc), w - 1);
  const int y0 = std::min(static_cast<int>(yc), h - 1);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = xc - x0;
  const double fy = yc - y0;
  for (int c = 0; c < s.channels; ++c) {
    const double top =
        (1.0 - fx) * frame.at(y0, x0, c) + fx * frame.at(y0, x1, c);
    const double bottom =
        (1.0 - fx) * frame.at(y1, x0, c) + fx * frame.at(y1, x1, c);
    s.value[c] = static_cast<float>((1.0 - fy) * top + fy * bottom);
  }
  return s;
}

WarpResult backward_warp(const Frame& src, const FlowField& flow) {
  if (flow.height != src.height() || flow.width != src.width()) {
    throw DimensionError("backward_warp: flow grid does not match image");
  }
  WarpResult out{Frame(src.height(), src.width(), src.channels()),
                 std::vector<std::uint8_t>(flow.size(), 0)};
  parallel_for(0, src.height(), [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r) {
      for (int c = 0; c < src.width(); ++c) {
        const auto i = flow.index(r, c);
        const bool flow_ok = flow.valid[i] != 0;
        const double dx = flow_ok ? flow.u[i] : 0.0;
        const double dy = flow_ok ? flow.v[i] : 0.0;
        const PixelSample s = bilinear_sample(src, c + dx, r + dy);
        for (int ch = 0; ch < src.channels(); ++ch) {
          out.frame.at(r, c, ch) = s.value[ch];
        }
        out.valid[i] = (flow_ok && s.in_bounds) ? 1 : 0;
      }
    }
  });
  return out;
}

Frame blend_masked(const Frame& a, const Frame& b, const FusionMask& mask,
                   const Frame& residual) {
  require_same_shape(a, b, "blend_masked");
  require_same_shape(a, residual, "blend_masked");
  if (mask.height != a.height() || mask.width != a.width()) {
    throw DimensionError("blend_masked: mask grid does not match images");
  }
  Frame out(a.height(), a.width(), a.channels());
  for (int r = 0; r < a.height(); ++r) {
    for (int c = 0; c < a.width(); ++c) {
      const double m = mask.at(r, c);
      for (int ch = 0; ch < a.channels(); ++ch) {
        const double v = residual.at(r, c, ch) + m * a.at(r, c, ch) +
                         (1.0 - m) * b.at(r, c, ch);
        out.at(r, c, ch) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return out;
}

Frame blend_masked(const Frame& a, const Frame& b, const FusionMask& mask) {
  return blend_masked(a, b, mask, Frame(a.height(), a.width(), a.channels()));
}

}  // namespace rscorrect
