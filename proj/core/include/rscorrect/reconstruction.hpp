#pragma once

#include "rscorrect/flow.hpp"
#include "rscorrect/frame.hpp"

namespace rscorrect {

enum class SegmentKind { FullSpan, StartToMid, MidToEnd };

struct SegmentSpec {
  SegmentKind kind = SegmentKind::FullSpan;
  int height = 0;
  int m = 0;  // 1-based split row; ignored for FullSpan
};

/// Per-row interpolation time for a top-to-bottom scan over the segment.
/// Degenerate one-row segments: StartToMid(1) gives T[1] = 0 and
/// MidToEnd(H-1) gives T[H] = 1.
TimeMap distorted_time_map(const SegmentSpec& seg);

/// 1 on rows 1..m of a top-to-bottom scan, vertically flipped for
/// bottom-to-top.
RowMask time_mask(int m, int height, ScanDirection direction);

/// out(q) = anchor(q - T[row] * f(q)) where anchor(p) ~ other(p + f(p)).
Frame vfi_rowwise(const Frame& anchor, const FlowField& anchor_to_other,
                  const TimeMap& t);

Frame vfi_rowwise(const Frame& anchor, const Frame& other, const TimeMap& t,
                  const FlowParams& params = {});

/// Flows in both directions between two GS frames.
struct PairFlows {
  FlowField forward;   // a -> b
  FlowField backward;  // b -> a
};

PairFlows estimate_pair_flows(const Frame& a, const Frame& b,
                              const FlowParams& params = {});

/// `time_scale` multiplies the time map (then clamps to [0,1]); 1 reproduces
/// the scan, other values serve as a deliberately wrong control.
struct ReconstructionOptions {
  FlowParams flow;
  double time_scale = 1.0;
};

/// RS image of the given direction from the GS frames at the scan start and
/// end, blending the two one-sided interpolations with weights 1-T and T.
Frame reconstruct_rs_full(const Frame& g_start, const Frame& g_end,
                          ScanDirection direction,
                          const ReconstructionOptions& options = {});

Frame reconstruct_rs_full(const Frame& g_start, const Frame& g_end,
                          const PairFlows& flows, ScanDirection direction,
                          double time_scale = 1.0);

/// Two segments split at scan step m: (g_start, g_mid) on rows up to m and
/// (g_mid, g_end) after, joined by the time mask.
Frame reconstruct_rs_with_intermediate(const Frame& g_start, const Frame& g_mid,
                                       const Frame& g_end, int m,
                                       ScanDirection direction,
                                       const ReconstructionOptions& options = {});

Frame reconstruct_rs_with_intermediate(const Frame& g_start, const Frame& g_mid,
                                       const Frame& g_end,
                                       const PairFlows& start_mid,
                                       const PairFlows& mid_end, int m,
                                       ScanDirection direction,
                                       double time_scale = 1.0);

}  // namespace rscorrect
