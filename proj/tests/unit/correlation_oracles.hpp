#pragma once

#include <cmath>
#include <random>

#include "rscorrect/correlation.hpp"

namespace testing {

inline rscorrect::FeatureMap random_unit_features(std::mt19937_64& rng, int h, int w, int c) {
  std::normal_distribution<float> n(0.0f, 1.0f);
  rscorrect::FeatureMap fm(h, w, c);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      double norm = 0.0;
      for (int k = 0; k < c; ++k) {
        fm.at(i, j, k) = n(rng);
        norm += double(fm.at(i, j, k)) * fm.at(i, j, k);
      }
      norm = std::sqrt(norm);
      for (int k = 0; k < c; ++k) fm.at(i, j, k) = static_cast<float>(fm.at(i, j, k) / norm);
    }
  }
  return fm;
}

// Level s entry as the mean of level-0 dot products over a 2^s x 2^s block
// of target cells, computed straight from the features.
inline double pooled_oracle(const rscorrect::FeatureMap& a, const rscorrect::FeatureMap& b,
                            int s, int i, int j, int k, int l) {
  const int block = 1 << s;
  double sum = 0.0;
  for (int dy = 0; dy < block; ++dy) {
    for (int dx = 0; dx < block; ++dx) {
      double dot = 0.0;
      for (int h = 0; h < a.channels; ++h) {
        dot += double(a.at(i, j, h)) * b.at(k * block + dy, l * block + dx, h);
      }
      sum += dot;
    }
  }
  return sum / (block * block);
}

}  // namespace testing
