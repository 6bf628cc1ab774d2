#pragma once

#include <cstdint>
#include <vector>

#include "rscorrect/frame.hpp"

namespace rscorrect {

inline constexpr int kFeatureCell = 8;
inline constexpr int kFeatureChannels = 12;

/// Per-cell feature vectors on a coarse grid, row-major [row][col][channel].
struct FeatureMap {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;

  FeatureMap() = default;
  FeatureMap(int h, int w, int c);

  float& at(int i, int j, int h) {
    return data[(static_cast<std::size_t>(i) * width + j) * channels + h];
  }
  float at(int i, int j, int h) const {
    return data[(static_cast<std::size_t>(i) * width + j) * channels + h];
  }
};

/// Hand-crafted features over 8x8 cells: mean gray, mean x/y gradient and a
/// 9-bin histogram of census counts (neighbors brighter than the center),
/// L2-normalized per cell. Needs a frame of at least 16x16.
FeatureMap extract_features(const Frame& frame);

/// One scale of a 4D volume V[i,j,k,l]; (i,j) index the query grid and
/// (k,l) the (possibly pooled) target grid.
struct CorrelationLevel {
  int rows = 0;
  int cols = 0;
  int target_rows = 0;
  int target_cols = 0;
  std::vector<float> data;

  float at(int i, int j, int k, int l) const {
    return data[index(i, j, k, l)];
  }
  std::size_t index(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * cols + j) * target_rows + k) *
               target_cols + l;
  }
};

struct CorrelationPyramid {
  std::vector<CorrelationLevel> levels;
  bool reverse = false;

  int num_levels() const { return static_cast<int>(levels.size()); }
};

inline constexpr int kCorrelationLevels = 4;

/// Level 0 is the dot-product volume sum_h a[i,j,h] b[k,l,h]; each further
/// level average-pools the last two dims with a 2x2 kernel, stride 2.
CorrelationPyramid build_correlation(const FeatureMap& a, const FeatureMap& b,
                                     int num_levels = kCorrelationLevels);

/// Pyramid for the b -> a direction, obtained by transposing level 0 of a
/// forward pyramid, then pooling. No dot products are recomputed.
CorrelationPyramid transpose_pyramid(const CorrelationPyramid& forward);

struct BidirectionalCorrelation {
  CorrelationPyramid forward;
  CorrelationPyramid reverse;
};

BidirectionalCorrelation build_bidirectional_correlation(
    const FeatureMap& a, const FeatureMap& b,
    int num_levels = kCorrelationLevels);

/// Windowed samples of every level around each cell's flow target.
struct CorrelationLookup {
  int rows = 0;
  int cols = 0;
  int radius = 0;
  int num_levels = 0;
  std::vector<float> values;            // [cell][level][dy][dx]
  std::vector<std::uint8_t> in_bounds;  // same layout

  int window() const { return 2 * radius + 1; }
  int samples_per_level() const { return window() * window(); }
  int samples_per_cell() const { return samples_per_level() * num_levels; }
  std::size_t offset(int i, int j, int level) const {
    return (static_cast<std::size_t>(i) * cols + j) * samples_per_cell() +
           static_cast<std::size_t>(level) * samples_per_level();
  }
};

/// For each cell (i,j) and level s, bilinearly samples V_s[i,j,.,.] on a
/// (2r+1)^2 window centred at ((i,j) + flow(i,j)) / 2^s. Samples outside the
/// volume clamp to the edge and are flagged.
CorrelationLookup lookup(const CorrelationPyramid& pyr, const FlowField& flow,
                         int radius);

/// Moves each cell's flow to the level-0 window argmax with a 1D quadratic
/// sub-cell fit per axis. Ties keep the incoming flow.
FlowField refine_flow_with_correlation(const FlowField& flow,
                                       const CorrelationPyramid& pyr,
                                       int radius);

}  // namespace rscorrect
