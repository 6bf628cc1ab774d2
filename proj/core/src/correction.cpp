#include "rscorrect/correction.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "rscorrect/error.hpp"
#include "rscorrect/parallel.hpp"

namespace rscorrect {
namespace {

// Fills low-confidence motion by linear interpolation between the nearest
// confident rows of the same column.
void fill_low_confidence(MotionMap& mm) {
  const auto ok = [&](int r, int c) {
    const auto i = mm.index(r, c);
    return mm.valid[i] && !mm.low_confidence[i];
  };
  for (int c = 0; c < mm.width; ++c) {
    for (int r = 0; r < mm.height; ++r) {
      const auto i = mm.index(r, c);
      if (!mm.valid[i] || !mm.low_confidence[i]) continue;
      int above = r - 1;
      while (above >= 0 && !ok(above, c)) --above;
      int below = r + 1;
      while (below < mm.height && !ok(below, c)) ++below;
      const bool has_above = above >= 0;
      const bool has_below = below < mm.height;
      if (has_above && has_below) {
        const double f = static_cast<double>(r - above) / (below - above);
        const auto a = mm.index(above, c);
        const auto b = mm.index(below, c);
        mm.u[i] = static_cast<float>((1.0 - f) * mm.u[a] + f * mm.u[b]);
        mm.v[i] = static_cast<float>((1.0 - f) * mm.v[a] + f * mm.v[b]);
      } else if (has_above || has_below) {
        const auto s = mm.index(has_above ? above : below, c);
        mm.u[i] = mm.u[s];
        mm.v[i] = mm.v[s];
      }
    }
  }
}

MotionMap motion_from_flow(const FlowField& f, bool anchored_t2b, double floor) {
  MotionMap mm(f.height, f.width);
  const double h = f.height;
  for (int r = 0; r < f.height; ++r) {
    const double i = r + 1.0;
    for (int c = 0; c < f.width; ++c) {
      const auto k = f.index(r, c);
      if (!f.valid[k]) continue;
      const double j = i + f.v[k];
      // Capture-time gap between the two rows the flow connects.
      const double dt = anchored_t2b ? ((h - j) - (i - 1.0)) / (h - 1.0)
                                     : ((j - 1.0) - (h - i)) / (h - 1.0);
      double denom = dt;
      if (std::abs(dt) < floor) {
        denom = dt < 0.0 ? -floor : floor;
        mm.low_confidence[k] = 1;
      }
      mm.u[k] = static_cast<float>(f.u[k] / denom);
      mm.v[k] = static_cast<float>(f.v[k] / denom);
      mm.valid[k] = std::isfinite(mm.u[k]) && std::isfinite(mm.v[k]) ? 1 : 0;
    }
  }
  fill_low_confidence(mm);
  return mm;
}

void sample_motion(const MotionMap& mm, double x, double y, double& u, double& v) {
  const double xc = std::clamp(x, 0.0, mm.width - 1.0);
  const double yc = std::clamp(y, 0.0, mm.height - 1.0);
  const int x0 = std::min(static_cast<int>(xc), mm.width - 1);
  const int y0 = std::min(static_cast<int>(yc), mm.height - 1);
  const int x1 = std::min(x0 + 1, mm.width - 1);
  const int y1 = std::min(y0 + 1, mm.height - 1);
  const double fx = xc - x0;
  const double fy = yc - y0;
  const auto lerp2 = [&](const std::vector<float>& p) {
    const double top = (1.0 - fx) * p[mm.index(y0, x0)] + fx * p[mm.index(y0, x1)];
    const double bot = (1.0 - fx) * p[mm.index(y1, x0)] + fx * p[mm.index(y1, x1)];
    return (1.0 - fy) * top + fy * bot;
  };
  u = lerp2(mm.u);
  v = lerp2(mm.v);
}

void check_target(int height, int m) {
  if (m < 1 || m > height) {
    throw RangeError("target row " + std::to_string(m) + " outside 1.." +
                     std::to_string(height));
  }
}

}  // namespace

MotionMap::MotionMap(int h, int w)
    : height(h),
      width(w),
      u(static_cast<std::size_t>(h) * w, 0.0f),
      v(static_cast<std::size_t>(h) * w, 0.0f),
      valid(static_cast<std::size_t>(h) * w, 0),
      low_confidence(static_cast<std::size_t>(h) * w, 0) {}

void CorrectionParams::validate() const {
  if (fixed_point_iters < 0) {
    throw ParameterError("fixed_point_iters must be non-negative");
  }
  if (delta_t_floor && !(*delta_t_floor > 0.0)) {
    throw ParameterError("delta_t_floor must be positive");
  }
  if (!(mask_eps > 0.0)) {
    throw ParameterError("mask_eps must be positive");
  }
  flow.validate();
}

double CorrectionParams::floor_for(int height) const {
  return delta_t_floor ? *delta_t_floor : 0.5 / (height - 1);
}

RowDisplacementMap time_displacement(int height, int m, ScanDirection direction) {
  if (height < 2) throw DimensionError("time_displacement: need at least 2 rows");
  check_target(height, m);
  std::vector<double> d(height);
  const double span = height - 1.0;
  for (int i = 1; i <= height; ++i) {
    d[i - 1] = direction == ScanDirection::TopToBottom
                   ? (i - m) / span
                   : ((height - i) - (m - 1)) / span;
  }
  return RowDisplacementMap(std::move(d));
}

std::pair<MotionMap, MotionMap> motion_maps_from_flow(const DualFlow& flows,
                                                      double delta_t_floor) {
  const FlowField& a = flows.t2b_to_b2t;
  const FlowField& b = flows.b2t_to_t2b;
  if (a.height != b.height || a.width != b.width) {
    throw DimensionError("motion_maps_from_flow: flow grids differ");
  }
  if (a.height < 2) throw DimensionError("motion_maps_from_flow: need at least 2 rows");
  if (!(delta_t_floor > 0.0)) throw ParameterError("delta_t_floor must be positive");
  return {motion_from_flow(a, true, delta_t_floor),
          motion_from_flow(b, false, delta_t_floor)};
}

std::pair<MotionMap, MotionMap> estimate_motion_map(const Frame& i_t2b,
                                                    const Frame& i_b2t,
                                                    const CorrectionParams& params) {
  require_same_shape(i_t2b, i_b2t, "estimate_motion_map");
  params.validate();
  const double floor = params.floor_for(i_t2b.height());
  if (params.external_flow) {
    const DualFlow& ext = *params.external_flow;
    if (ext.t2b_to_b2t.height != i_t2b.height() ||
        ext.t2b_to_b2t.width != i_t2b.width()) {
      throw DimensionError("injected flow grid does not match the images");
    }
    return motion_maps_from_flow(ext, floor);
  }
  DualFlow flows{estimate_flow(i_t2b, i_b2t, params.flow),
                 estimate_flow(i_b2t, i_t2b, params.flow)};
  return motion_maps_from_flow(flows, floor);
}

WarpResult warp_rs_to_gs(const Frame& rs, const MotionMap& motion,
                         const RowDisplacementMap& d, int iters) {
  if (motion.height != rs.height() || motion.width != rs.width() ||
      d.rows() != rs.height()) {
    throw DimensionError("warp_rs_to_gs: image, motion and displacement disagree");
  }
  if (iters < 0) throw ParameterError("warp_rs_to_gs: iters must be non-negative");
  WarpResult out{Frame(rs.height(), rs.width(), rs.channels()),
                 std::vector<std::uint8_t>(motion.valid.size(), 0)};
  parallel_for(0, rs.height(), [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r) {
      for (int c = 0; c < rs.width(); ++c) {
        const auto k = motion.index(r, c);
        double fu = d.values[r] * motion.u[k];
        double fv = d.values[r] * motion.v[k];
        for (int it = 0; it < iters; ++it) {
          const double row = r + fv;
          double ou = 0.0, ov = 0.0;
          sample_motion(motion, c + fu, row, ou, ov);
          const double dd = d.at(row);
          fu = dd * ou;
          fv = dd * ov;
        }
        const PixelSample s = bilinear_sample(rs, c + fu, r + fv);
        for (int ch = 0; ch < rs.channels(); ++ch) out.frame.at(r, c, ch) = s.value[ch];
        bool ok = s.in_bounds && motion.valid[k];
        if (ok) {
          const int sx = static_cast<int>(std::lround(c + fu));
          const int sy = static_cast<int>(std::lround(r + fv));
          ok = motion.valid[motion.index(sy, sx)] != 0;
        }
        out.valid[k] = ok ? 1 : 0;
      }
    }
  });
  return out;
}

FusionMask fusion_mask(const RowDisplacementMap& d_t2b,
                       const RowDisplacementMap& d_b2t, double eps, int width) {
  if (d_t2b.rows() != d_b2t.rows()) {
    throw DimensionError("fusion_mask: displacement maps differ in height");
  }
  if (!(eps > 0.0)) throw ParameterError("fusion_mask: eps must be positive");
  if (width < 1) throw DimensionError("fusion_mask: width must be positive");
  FusionMask mask(d_t2b.rows(), width, 0.0f);
  for (int i = 0; i < d_t2b.rows(); ++i) {
    const double a = std::abs(d_t2b.values[i]);
    const double b = std::abs(d_b2t.values[i]);
    const auto m = static_cast<float>((b + eps / 2.0) / (a + b + eps));
    std::fill_n(mask.m.begin() + static_cast<std::ptrdiff_t>(i) * width, width, m);
  }
  return mask;
}

CorrectionResult correct_with_motion(const Frame& i_t2b, const Frame& i_b2t,
                                     const std::pair<MotionMap, MotionMap>& motion,
                                     int m, const CorrectionParams& params) {
  require_same_shape(i_t2b, i_b2t, "correct_to_time");
  params.validate();
  const int h = i_t2b.height();
  const int w = i_t2b.width();
  const int ch = i_t2b.channels();
  check_target(h, m);

  const RowDisplacementMap d1 = time_displacement(h, m, ScanDirection::TopToBottom);
  const RowDisplacementMap d2 = time_displacement(h, m, ScanDirection::BottomToTop);
  const WarpResult w1 = warp_rs_to_gs(i_t2b, motion.first, d1, params.fixed_point_iters);
  const WarpResult w2 = warp_rs_to_gs(i_b2t, motion.second, d2, params.fixed_point_iters);
  const FusionMask mask = fusion_mask(d1, d2, params.mask_eps, w);

  CorrectionResult res{Frame(h, w, ch), {}};
  std::vector<std::uint8_t> have(static_cast<std::size_t>(h) * w, 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto k = static_cast<std::size_t>(r) * w + c;
      const double mk = w1.valid[k] && w2.valid[k] ? mask.at(r, c)
                        : w1.valid[k]              ? 1.0
                        : w2.valid[k]              ? 0.0
                                                   : mask.at(r, c);
      for (int q = 0; q < ch; ++q) {
        const double v = mk * w1.frame.at(r, c, q) + (1.0 - mk) * w2.frame.at(r, c, q);
        res.frame.at(r, c, q) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
      have[k] = w1.valid[k] || w2.valid[k];
    }
  }

  // Pixels lost by both branches take the value of the nearest covered pixel.
  res.coverage.filled_mask.assign(have.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t k = 0; k < have.size(); ++k) {
    if (have[k]) queue.push_back(k);
    else res.coverage.filled_mask[k] = 1;
  }
  res.coverage.filled = static_cast<int>(have.size() - queue.size());
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    const int r = static_cast<int>(k / w);
    const int c = static_cast<int>(k % w);
    const int nr[4] = {r - 1, r + 1, r, r};
    const int nc[4] = {c, c, c - 1, c + 1};
    for (int n = 0; n < 4; ++n) {
      if (nr[n] < 0 || nr[n] >= h || nc[n] < 0 || nc[n] >= w) continue;
      const auto kn = static_cast<std::size_t>(nr[n]) * w + nc[n];
      if (have[kn]) continue;
      have[kn] = 1;
      for (int q = 0; q < ch; ++q) res.frame.at(nr[n], nc[n], q) = res.frame.at(r, c, q);
      queue.push_back(kn);
    }
  }
  return res;
}

CorrectionResult correct_to_time_report(const Frame& i_t2b, const Frame& i_b2t,
                                        const ScanConfig& scan, int m,
                                        const CorrectionParams& params) {
  scan.validate();
  require_same_shape(i_t2b, i_b2t, "correct_to_time");
  if (scan.height != i_t2b.height() || scan.width != i_t2b.width()) {
    throw DimensionError("correct_to_time: scan geometry does not match the images");
  }
  check_target(scan.height, m);
  return correct_with_motion(i_t2b, i_b2t, estimate_motion_map(i_t2b, i_b2t, params),
                             m, params);
}

Frame correct_to_time(const Frame& i_t2b, const Frame& i_b2t, const ScanConfig& scan,
                      int m, const CorrectionParams& params) {
  return correct_to_time_report(i_t2b, i_b2t, scan, m, params).frame;
}

std::vector<Frame> correct_video(const Frame& i_t2b, const Frame& i_b2t,
                                 const ScanConfig& scan,
                                 const std::vector<int>& targets,
                                 const CorrectionParams& params) {
  scan.validate();
  require_same_shape(i_t2b, i_b2t, "correct_video");
  if (scan.height != i_t2b.height() || scan.width != i_t2b.width()) {
    throw DimensionError("correct_video: scan geometry does not match the images");
  }
  for (int m : targets) check_target(scan.height, m);
  const auto motion = estimate_motion_map(i_t2b, i_b2t, params);
  std::vector<Frame> out;
  out.reserve(targets.size());
  for (int m : targets) {
    out.push_back(correct_with_motion(i_t2b, i_b2t, motion, m, params).frame);
  }
  return out;
}

FlowField flow_between_targets(const std::pair<MotionMap, MotionMap>& motion,
                               int from, int to) {
  const MotionMap& a = motion.first;
  const MotionMap& b = motion.second;
  if (a.height != b.height || a.width != b.width) {
    throw DimensionError("flow_between_targets: motion maps differ in size");
  }
  check_target(a.height, from);
  check_target(a.height, to);
  const double span = static_cast<double>(to - from) / (a.height - 1);
  FlowField f(a.height, a.width);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const int n = (a.valid[k] ? 1 : 0) + (b.valid[k] ? 1 : 0);
    f.valid[k] = n > 0 ? 1 : 0;
    if (n == 0) continue;
    const double u = (a.valid[k] ? a.u[k] : 0.0) + (b.valid[k] ? b.u[k] : 0.0);
    const double v = (a.valid[k] ? a.v[k] : 0.0) + (b.valid[k] ? b.v[k] : 0.0);
    f.u[k] = static_cast<float>(span * u / n);
    f.v[k] = static_cast<float>(span * v / n);
  }
  return f;
}

std::vector<int> default_target_rows(int height, int count) {
  if (height < 2) throw DimensionError("default_target_rows: need at least 2 rows");
  if (count < 1) throw ParameterError("default_target_rows: count must be positive");
  if (count == 1) return {1};
  std::vector<int> rows(count);
  const long long span = height - 1;
  const long long steps = count - 1;
  for (long long k = 0; k < count; ++k) {
    // Round half up of span * k / steps, in integers.
    rows[k] = 1 + static_cast<int>((2 * span * k + steps) / (2 * steps));
  }
  return rows;
}

}  // namespace rscorrect
