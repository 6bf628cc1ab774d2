#include "rscorrect/reconstruction.hpp"

#include <algorithm>
#include <string>

#include "rscorrect/error.hpp"
#include "rscorrect/parallel.hpp"
#include "rscorrect/sampling.hpp"

namespace rscorrect {
namespace {

void check_split(int m, int height) {
  if (m < 1 || m > height) {
    throw RangeError("split row " + std::to_string(m) + " outside 1.." +
                     std::to_string(height));
  }
}

TimeMap scaled(const TimeMap& t, double scale) {
  if (scale == 1.0) return t;
  std::vector<double> v(t.values);
  for (double& x : v) x = std::clamp(scale * x, 0.0, 1.0);
  return TimeMap(std::move(v));
}

TimeMap oriented(const TimeMap& t, ScanDirection direction) {
  return direction == ScanDirection::TopToBottom ? t : t.flipped();
}

void check_flows(const Frame& a, const PairFlows& f) {
  for (const FlowField* x : {&f.forward, &f.backward}) {
    if (x->height != a.height() || x->width != a.width()) {
      throw DimensionError("reconstruction: flow grid does not match the frames");
    }
  }
}

// (1 - T) * from_start + T * from_end, row-wise. Written so T = 0 and T = 1
// rows copy one operand bit for bit.
Frame blend_rows(const Frame& from_start, const Frame& from_end, const TimeMap& t) {
  Frame out(from_start.height(), from_start.width(), from_start.channels());
  for (int r = 0; r < out.height(); ++r) {
    const double w = t.values[r];
    const auto a = from_start.row(r);
    const auto b = from_end.row(r);
    auto o = out.row(r);
    for (std::size_t k = 0; k < o.size(); ++k) {
      const double v = (1.0 - w) * a[k] + w * b[k];
      o[k] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

Frame segment(const Frame& g0, const Frame& g1, const PairFlows& flows,
              const TimeMap& t) {
  const Frame forward = vfi_rowwise(g0, flows.forward, t);
  const Frame backward = vfi_rowwise(g1, flows.backward, t.complement());
  return blend_rows(forward, backward, t);
}

}  // namespace

TimeMap distorted_time_map(const SegmentSpec& seg) {
  const int h = seg.height;
  if (h < 2) throw DimensionError("distorted_time_map: need at least 2 rows");
  std::vector<double> t(h);
  switch (seg.kind) {
    case SegmentKind::FullSpan:
      for (int i = 1; i <= h; ++i) t[i - 1] = (i - 1.0) / (h - 1.0);
      break;
    case SegmentKind::StartToMid:
      check_split(seg.m, h);
      for (int i = 1; i <= h; ++i) {
        if (i > seg.m) t[i - 1] = 1.0;
        else if (seg.m == 1) t[i - 1] = 0.0;
        else t[i - 1] = (i - 1.0) / (seg.m - 1.0);
      }
      break;
    case SegmentKind::MidToEnd:
      check_split(seg.m, h);
      for (int i = 1; i <= h; ++i) {
        if (i <= seg.m) t[i - 1] = 0.0;
        else if (seg.m == h - 1) t[i - 1] = 1.0;
        else t[i - 1] = (i - seg.m - 1.0) / (h - seg.m - 1.0);
      }
      break;
  }
  return TimeMap(std::move(t));
}

RowMask time_mask(int m, int height, ScanDirection direction) {
  if (height < 2) throw DimensionError("time_mask: need at least 2 rows");
  check_split(m, height);
  std::vector<double> u(height);
  for (int i = 1; i <= height; ++i) u[i - 1] = i <= m ? 1.0 : 0.0;
  RowMask mask(std::move(u));
  return direction == ScanDirection::TopToBottom ? mask : mask.flipped();
}

Frame vfi_rowwise(const Frame& anchor, const FlowField& anchor_to_other,
                  const TimeMap& t) {
  if (anchor_to_other.height != anchor.height() ||
      anchor_to_other.width != anchor.width()) {
    throw DimensionError("vfi_rowwise: flow grid does not match the anchor");
  }
  if (t.rows() != anchor.height()) {
    throw DimensionError("vfi_rowwise: time map height does not match the anchor");
  }
  FlowField scaled_flow(anchor.height(), anchor.width());
  for (int r = 0; r < anchor.height(); ++r) {
    const double w = t.values[r];
    for (int c = 0; c < anchor.width(); ++c) {
      const auto k = anchor_to_other.index(r, c);
      scaled_flow.u[k] = static_cast<float>(-w * anchor_to_other.u[k]);
      scaled_flow.v[k] = static_cast<float>(-w * anchor_to_other.v[k]);
      scaled_flow.valid[k] = anchor_to_other.valid[k];
    }
  }
  return backward_warp(anchor, scaled_flow).frame;
}

Frame vfi_rowwise(const Frame& anchor, const Frame& other, const TimeMap& t,
                  const FlowParams& params) {
  require_same_shape(anchor, other, "vfi_rowwise");
  if (t.rows() != anchor.height()) {
    throw DimensionError("vfi_rowwise: time map height does not match the anchor");
  }
  return vfi_rowwise(anchor, estimate_flow(anchor, other, params), t);
}

PairFlows estimate_pair_flows(const Frame& a, const Frame& b, const FlowParams& params) {
  require_same_shape(a, b, "estimate_pair_flows");
  return {estimate_flow(a, b, params), estimate_flow(b, a, params)};
}

Frame reconstruct_rs_full(const Frame& g_start, const Frame& g_end,
                          ScanDirection direction,
                          const ReconstructionOptions& options) {
  require_same_shape(g_start, g_end, "reconstruct_rs_full");
  return reconstruct_rs_full(g_start, g_end,
                             estimate_pair_flows(g_start, g_end, options.flow),
                             direction, options.time_scale);
}

Frame reconstruct_rs_full(const Frame& g_start, const Frame& g_end,
                          const PairFlows& flows, ScanDirection direction,
                          double time_scale) {
  require_same_shape(g_start, g_end, "reconstruct_rs_full");
  check_flows(g_start, flows);
  if (!(time_scale > 0.0)) throw ParameterError("time_scale must be positive");
  const TimeMap t = oriented(
      scaled(distorted_time_map({SegmentKind::FullSpan, g_start.height(), 0}), time_scale),
      direction);
  return segment(g_start, g_end, flows, t);
}

Frame reconstruct_rs_with_intermediate(const Frame& g_start, const Frame& g_mid,
                                       const Frame& g_end, int m,
                                       ScanDirection direction,
                                       const ReconstructionOptions& options) {
  require_same_shape(g_start, g_mid, "reconstruct_rs_with_intermediate");
  require_same_shape(g_mid, g_end, "reconstruct_rs_with_intermediate");
  check_split(m, g_start.height());
  return reconstruct_rs_with_intermediate(
      g_start, g_mid, g_end, estimate_pair_flows(g_start, g_mid, options.flow),
      estimate_pair_flows(g_mid, g_end, options.flow), m, direction,
      options.time_scale);
}

Frame reconstruct_rs_with_intermediate(const Frame& g_start, const Frame& g_mid,
                                       const Frame& g_end,
                                       const PairFlows& start_mid,
                                       const PairFlows& mid_end, int m,
                                       ScanDirection direction,
                                       double time_scale) {
  require_same_shape(g_start, g_mid, "reconstruct_rs_with_intermediate");
  require_same_shape(g_mid, g_end, "reconstruct_rs_with_intermediate");
  check_flows(g_start, start_mid);
  check_flows(g_start, mid_end);
  if (!(time_scale > 0.0)) throw ParameterError("time_scale must be positive");
  const int h = g_start.height();
  check_split(m, h);
  const TimeMap t_sm = oriented(
      scaled(distorted_time_map({SegmentKind::StartToMid, h, m}), time_scale), direction);
  const TimeMap t_me = oriented(
      scaled(distorted_time_map({SegmentKind::MidToEnd, h, m}), time_scale), direction);
  const RowMask u = time_mask(m, h, direction);

  const Frame first = segment(g_start, g_mid, start_mid, t_sm);
  const Frame second = segment(g_mid, g_end, mid_end, t_me);
  Frame out(h, g_start.width(), g_start.channels());
  for (int r = 0; r < h; ++r) {
    const auto src = u.values[r] != 0.0 ? first.row(r) : second.row(r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace rscorrect
