#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rscorrect/flow.hpp"
#include "rscorrect/frame.hpp"
#include "rscorrect/sampling.hpp"

namespace rscorrect {

/// Flows between the two RS images of a dual pair. `t2b_to_b2t` lives on the
/// top-to-bottom image grid: I_t2b(p) ~ I_b2t(p + f(p)).
struct DualFlow {
  FlowField t2b_to_b2t;
  FlowField b2t_to_t2b;
};

struct CorrectionParams {
  int fixed_point_iters = 3;
  // Minimum |dt| in scan units for the velocity division; 0.5/(H-1) if unset.
  std::optional<double> delta_t_floor;
  double mask_eps = 1e-6;
  // Oracle mode: skip flow estimation and use these flows.
  std::optional<DualFlow> external_flow;
  FlowParams flow;

  void validate() const;
  double floor_for(int height) const;
};

/// Scene displacement over one full scan, in pixels, anchored on an RS grid.
struct MotionMap {
  int height = 0;
  int width = 0;
  std::vector<float> u;
  std::vector<float> v;
  std::vector<std::uint8_t> valid;
  // Pixels whose capture-time gap fell below the floor. Their motion is
  // interpolated along the column from the nearest confident rows.
  std::vector<std::uint8_t> low_confidence;

  MotionMap() = default;
  MotionMap(int height, int width);

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width + col;
  }
};

/// Signed offset of each row's capture time from target row m (1-based), in
/// scan units.
RowDisplacementMap time_displacement(int height, int m, ScanDirection direction);

/// Converts inter-RS flows into motion maps, one per RS grid.
std::pair<MotionMap, MotionMap> motion_maps_from_flow(const DualFlow& flows,
                                                      double delta_t_floor);

/// Estimates both inter-RS flows (or takes params.external_flow) and converts
/// them. Returns (anchored on I_t2b, anchored on I_b2t).
std::pair<MotionMap, MotionMap> estimate_motion_map(const Frame& i_t2b,
                                                    const Frame& i_b2t,
                                                    const CorrectionParams& params);

/// Warps an RS image to the time where D vanishes, sampling at p + F with
/// F = D(r) * O and the source row r refined `iters` times.
WarpResult warp_rs_to_gs(const Frame& rs, const MotionMap& motion,
                         const RowDisplacementMap& d, int iters);

/// Row weights for the t2b branch; rows captured nearer the target count more.
FusionMask fusion_mask(const RowDisplacementMap& d_t2b,
                       const RowDisplacementMap& d_b2t, double eps, int width);

struct CoverageReport {
  int filled = 0;  // pixels invalid in both branches
  std::vector<std::uint8_t> filled_mask;
};

struct CorrectionResult {
  Frame frame;
  CoverageReport coverage;
};

/// GS frame at the capture time of row m (1-based) of the top-to-bottom scan.
CorrectionResult correct_to_time_report(const Frame& i_t2b, const Frame& i_b2t,
                                        const ScanConfig& scan, int m,
                                        const CorrectionParams& params = {});

Frame correct_to_time(const Frame& i_t2b, const Frame& i_b2t,
                      const ScanConfig& scan, int m,
                      const CorrectionParams& params = {});

/// Same with motion maps computed beforehand.
CorrectionResult correct_with_motion(const Frame& i_t2b, const Frame& i_b2t,
                                     const std::pair<MotionMap, MotionMap>& motion,
                                     int m, const CorrectionParams& params);

/// One frame per target row, sharing a single flow computation.
std::vector<Frame> correct_video(const Frame& i_t2b, const Frame& i_b2t,
                                 const ScanConfig& scan,
                                 const std::vector<int>& targets,
                                 const CorrectionParams& params = {});

/// Flow from the corrected frame at target row `from` to the one at `to`
/// implied by the motion maps: the mean valid O at each pixel times the scan
/// fraction between the two targets.
FlowField flow_between_targets(const std::pair<MotionMap, MotionMap>& motion,
                               int from, int to);

/// `count` target rows spread uniformly over 1..H. When (H-1) is not a
/// multiple of count-1, each target is the row nearest its ideal position.
std::vector<int> default_target_rows(int height, int count = 9);

}  // namespace rscorrect
