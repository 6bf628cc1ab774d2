#pragma once

#include <vector>

#include "rscorrect/frame.hpp"

namespace rscorrect {

struct FlowParams {
  double pyramid_factor = 0.5;
  int min_level_size = 16;   // px, smallest pyramid side
  int warp_iterations = 5;   // per level
  double smoothness = 0.15;  // lambda
  double epsilon = 1e-3;     // Charbonnier epsilon of the data term
  int median_radius = 2;

  void validate() const;
  bool operator==(const FlowParams&) const = default;
};

/// Coarse-to-fine variational flow from `a` to `b`: a(p) ~ b(p + flow(p)).
/// Each level runs warp_iterations linearized updates of a Charbonnier
/// brightness-constancy term with first-order smoothness, each followed by
/// a median filter.
FlowField estimate_flow(const Frame& a, const Frame& b,
                        const FlowParams& params = {});

/// Per-pixel |f_ab(p) + f_ba(p + f_ab(p))|; NaN where either flow is invalid
/// or the sample leaves the grid.
std::vector<double> forward_backward_residual(const FlowField& ab,
                                              const FlowField& ba);

/// Median of finite entries of `values` restricted to rows/cols at least
/// `border` px from the edge. NaN when nothing remains.
double interior_median(const std::vector<double>& values, int height,
                       int width, int border);

/// Per-pixel endpoint error |f - g|.
std::vector<double> endpoint_error(const FlowField& f, const FlowField& g);

/// Bilinear resample of a flow field at continuous position (x, y), clamped.
void sample_flow(const FlowField& f, double x, double y, double& u, double& v);

}  // namespace rscorrect
