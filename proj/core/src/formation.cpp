#include "rscorrect/formation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rscorrect/error.hpp"

namespace rscorrect {
namespace {

// Tolerance under which a row time snaps onto a GS sample time.
bool same_time(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

struct Bracket {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double weight_hi = 0.0;  // 0 means an exact copy of `lo`
};

// Returns false when `time` falls outside the sequence span.
bool bracket(const std::vector<double>& times, double time, Bracket& out) {
  if (same_time(time, times.front())) {
    out = {0, 0, 0.0};
    return true;
  }
  if (same_time(time, times.back())) {
    out = {times.size() - 1, times.size() - 1, 0.0};
    return true;
  }
  if (time < times.front() || time > times.back()) {
    return false;
  }
  const auto it = std::upper_bound(times.begin(), times.end(), time);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  if (same_time(time, times[lo])) {
    out = {lo, lo, 0.0};
  } else if (hi < times.size() && same_time(time, times[hi])) {
    out = {hi, hi, 0.0};
  } else {
    out = {lo, hi, (time - times[lo]) / (times[hi] - times[lo])};
  }
  return true;
}

void blend_row(const GsSequence& seq, const Bracket& b, int src_row,
               std::span<float> dst) {
  const auto a = seq.frames[b.lo].row(src_row);
  if (b.weight_hi == 0.0) {
    std::copy(a.begin(), a.end(), dst.begin());
    return;
  }
  const auto c = seq.frames[b.hi].row(src_row);
  const double w = b.weight_hi;
  for (std::size_t k = 0; k < dst.size(); ++k) {
    dst[k] = static_cast<float>((1.0 - w) * a[k] + w * c[k]);
  }
}

}  // namespace

void GsSequence::validate() const {
  if (frames.empty()) {
    throw ConfigError("GS sequence is empty");
  }
  if (frames.size() != times.size()) {
    throw ConfigError("GS sequence has " + std::to_string(frames.size()) +
                      " frames but " + std::to_string(times.size()) +
                      " times");
  }
  for (std::size_t k = 1; k < frames.size(); ++k) {
    require_same_shape(frames[0], frames[k], "GS sequence");
    if (!(times[k] > times[k - 1])) {
      throw ConfigError("GS sequence times must be strictly increasing");
    }
  }
}

double row_time(const ScanConfig& scan, int row) {
  if (row < 1 || row > scan.height) {
    throw RangeError("row index " + std::to_string(row) + " outside 1.." +
                     std::to_string(scan.height));
  }
  const int step =
      scan.direction == ScanDirection::TopToBottom ? row : scan.height - row + 1;
  return scan.t_mid + scan.tau * (step - (scan.height + 1) / 2.0);
}

double row_time_at(const ScanConfig& scan, double row0) {
  const double step = scan.direction == ScanDirection::TopToBottom
                          ? row0 + 1.0
                          : scan.height - row0;
  return scan.t_mid + scan.tau * (step - (scan.height + 1) / 2.0);
}

Frame interpolate_gs(const GsSequence& seq, double time) {
  seq.validate();
  Bracket b;
  if (!bracket(seq.times, time, b)) {
    throw CoverageError("time " + std::to_string(time) +
                        " outside the GS sequence span");
  }
  const Frame& ref = seq.frames[0];
  Frame out(ref.height(), ref.width(), ref.channels());
  for (int r = 0; r < ref.height(); ++r) {
    blend_row(seq, b, r, out.row(r));
  }
  return out;
}

Frame synthesize_rs(const GsSequence& seq, const ScanConfig& scan) {
  seq.validate();
  scan.validate();
  const Frame& ref = seq.frames[0];
  if (ref.height() != scan.height || ref.width() != scan.width) {
    throw DimensionError("synthesize_rs: scan geometry does not match frames");
  }
  Frame out(ref.height(), ref.width(), ref.channels());
  for (int r = 0; r < scan.height; ++r) {
    const double t = row_time(scan, r + 1);
    Bracket b;
    if (!bracket(seq.times, t, b)) {
      throw CoverageError("row " + std::to_string(r + 1) + " capture time " +
                          std::to_string(t) +
                          " not covered by the GS sequence");
    }
    blend_row(seq, b, r, out.row(r));
  }
  return out;
}

std::pair<Frame, Frame> synthesize_dual_pair(const GsSequence& seq,
                                             const ScanConfig& scan_t2b,
                                             const ScanConfig& scan_b2t) {
  if (scan_t2b.direction != ScanDirection::TopToBottom ||
      scan_b2t.direction != ScanDirection::BottomToTop) {
    throw ConfigError("dual pair needs a top-to-bottom and a bottom-to-top scan");
  }
  if (scan_t2b.height != scan_b2t.height || scan_t2b.width != scan_b2t.width ||
      scan_t2b.tau != scan_b2t.tau || scan_t2b.t_mid != scan_b2t.t_mid) {
    throw ConfigError("dual scan configs may differ only in direction");
  }
  return {synthesize_rs(seq, scan_t2b), synthesize_rs(seq, scan_b2t)};
}

}  // namespace rscorrect
