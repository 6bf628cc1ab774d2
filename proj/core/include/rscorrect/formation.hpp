#pragma once

#include <utility>
#include <vector>

#include "rscorrect/frame.hpp"

namespace rscorrect {

/// Ordered GS samples of the latent scene.
struct GsSequence {
  std::vector<Frame> frames;
  std::vector<double> times;  // strictly increasing, seconds

  void validate() const;
};

/// Capture time of 1-based image row `row`. A bottom-to-top scan reads image
/// row i at scan step H - i + 1.
double row_time(const ScanConfig& scan, int row);

/// Capture time for a continuous 0-based row coordinate (linear in the row).
double row_time_at(const ScanConfig& scan, double row0);

/// Per-pixel linear interpolation of the sequence at `time`; exact copy when a
/// sample time matches. Throws CoverageError outside the sequence span.
Frame interpolate_gs(const GsSequence& seq, double time);

/// Rolling-shutter image: row i taken from the GS content at row_time(scan, i).
Frame synthesize_rs(const GsSequence& seq, const ScanConfig& scan);

/// (I_t2b, I_b2t). The configs must agree on everything but direction.
std::pair<Frame, Frame> synthesize_dual_pair(const GsSequence& seq,
                                             const ScanConfig& scan_t2b,
                                             const ScanConfig& scan_b2t);

}  // namespace rscorrect
