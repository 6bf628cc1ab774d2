#include "rscorrect/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rscorrect/error.hpp"
#include "rscorrect/parallel.hpp"

namespace rscorrect {
namespace {

CorrelationLevel pool_level(const CorrelationLevel& src) {
  CorrelationLevel dst;
  dst.rows = src.rows;
  dst.cols = src.cols;
  dst.target_rows = std::max(1, src.target_rows / 2);
  dst.target_cols = std::max(1, src.target_cols / 2);
  dst.data.assign(static_cast<std::size_t>(dst.rows) * dst.cols *
                      dst.target_rows * dst.target_cols,
                  0.0f);
  const int ky = src.target_rows >= 2 ? 2 : 1;
  const int kx = src.target_cols >= 2 ? 2 : 1;
  const float inv = 1.0f / static_cast<float>(ky * kx);
  parallel_for(0, dst.rows, [&](int i0, int i1) {
    for (int i = i0; i < i1; ++i) {
      for (int j = 0; j < dst.cols; ++j) {
        for (int k = 0; k < dst.target_rows; ++k) {
          for (int l = 0; l < dst.target_cols; ++l) {
            float sum = 0.0f;
            for (int dy = 0; dy < ky; ++dy) {
              for (int dx = 0; dx < kx; ++dx) {
                sum += src.at(i, j, k * ky + dy, l * kx + dx);
              }
            }
            dst.data[dst.index(i, j, k, l)] = sum * inv;
          }
        }
      }
    }
  });
  return dst;
}

void add_pooled_levels(CorrelationPyramid& pyr, int num_levels) {
  while (pyr.num_levels() < num_levels) {
    pyr.levels.push_back(pool_level(pyr.levels.back()));
  }
}

// Bilinear sample of the (k,l) plane of V[i,j] with clamp-to-edge.
float sample_plane(const CorrelationLevel& lv, int i, int j, double k, double l,
                   bool& in_bounds) {
  const int tr = lv.target_rows;
  const int tc = lv.target_cols;
  in_bounds = k >= 0.0 && l >= 0.0 && k <= tr - 1 && l <= tc - 1;
  const double kc = std::clamp(k, 0.0, tr - 1.0);
  const double lc = std::clamp(l, 0.0, tc - 1.0);
  const int k0 = std::min(static_cast<int>(kc), tr - 1);
  const int l0 = std::min(static_cast<int>(lc), tc - 1);
  const int k1 = std::min(k0 + 1, tr - 1);
  const int l1 = std::min(l0 + 1, tc - 1);
  const double fk = kc - k0;
  const double fl = lc - l0;
  const double top = (1.0 - fl) * lv.at(i, j, k0, l0) + fl * lv.at(i, j, k0, l1);
  const double bot = (1.0 - fl) * lv.at(i, j, k1, l0) + fl * lv.at(i, j, k1, l1);
  return static_cast<float>((1.0 - fk) * top + fk * bot);
}

void check_flow_grid(const CorrelationPyramid& pyr, const FlowField& flow) {
  if (pyr.levels.empty()) {
    throw ParameterError("correlation pyramid has no levels");
  }
  if (flow.height != pyr.levels[0].rows || flow.width != pyr.levels[0].cols) {
    throw DimensionError("flow is not on the correlation query grid");
  }
}

}  // namespace

FeatureMap::FeatureMap(int h, int w, int c) : height(h), width(w), channels(c) {
  data.assign(static_cast<std::size_t>(h) * w * c, 0.0f);
}

FeatureMap extract_features(const Frame& frame) {
  const int h = frame.height();
  const int w = frame.width();
  if (h < 2 * kFeatureCell || w < 2 * kFeatureCell) {
    throw DimensionError("extract_features needs a frame of at least 16x16");
  }
  std::vector<double> gray(static_cast<std::size_t>(h) * w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int ch = 0; ch < frame.channels(); ++ch) s += frame.at(r, c, ch);
      gray[static_cast<std::size_t>(r) * w + c] = s / frame.channels();
    }
  }
  const auto g = [&](int r, int c) {
    r = std::clamp(r, 0, h - 1);
    c = std::clamp(c, 0, w - 1);
    return gray[static_cast<std::size_t>(r) * w + c];
  };

  FeatureMap fm(h / kFeatureCell, w / kFeatureCell, kFeatureChannels);
  for (int i = 0; i < fm.height; ++i) {
    for (int j = 0; j < fm.width; ++j) {
      double mean = 0.0, gx = 0.0, gy = 0.0;
      double hist[9] = {};
      for (int dr = 0; dr < kFeatureCell; ++dr) {
        for (int dc = 0; dc < kFeatureCell; ++dc) {
          const int r = i * kFeatureCell + dr;
          const int c = j * kFeatureCell + dc;
          const double center = g(r, c);
          mean += center;
          gx += 0.5 * (g(r, c + 1) - g(r, c - 1));
          gy += 0.5 * (g(r + 1, c) - g(r - 1, c));
          int brighter = 0;
          for (int nr = -1; nr <= 1; ++nr) {
            for (int nc = -1; nc <= 1; ++nc) {
              if ((nr != 0 || nc != 0) && g(r + nr, c + nc) > center) {
                ++brighter;
              }
            }
          }
          hist[brighter] += 1.0;
        }
      }
      const double n = kFeatureCell * kFeatureCell;
      double f[kFeatureChannels] = {mean / n, gx / n, gy / n};
      for (int b = 0; b < 9; ++b) f[3 + b] = hist[b] / n;
      double norm = 0.0;
      for (double x : f) norm += x * x;
      norm = std::sqrt(norm);
      for (int k = 0; k < kFeatureChannels; ++k) {
        fm.at(i, j, k) = static_cast<float>(f[k] / norm);
      }
    }
  }
  return fm;
}

CorrelationPyramid build_correlation(const FeatureMap& a, const FeatureMap& b,
                                     int num_levels) {
  if (a.height != b.height || a.width != b.width || a.channels != b.channels) {
    throw DimensionError("build_correlation: feature maps differ in shape");
  }
  if (num_levels < 1) {
    throw ParameterError("correlation pyramid needs at least one level");
  }
  CorrelationLevel v0;
  v0.rows = a.height;
  v0.cols = a.width;
  v0.target_rows = b.height;
  v0.target_cols = b.width;
  v0.data.assign(static_cast<std::size_t>(v0.rows) * v0.cols * v0.target_rows *
                     v0.target_cols,
                 0.0f);
  parallel_for(0, a.height, [&](int i0, int i1) {
    for (int i = i0; i < i1; ++i) {
      for (int j = 0; j < a.width; ++j) {
        for (int k = 0; k < b.height; ++k) {
          for (int l = 0; l < b.width; ++l) {
            double dot = 0.0;
            for (int h = 0; h < a.channels; ++h) {
              dot += static_cast<double>(a.at(i, j, h)) * b.at(k, l, h);
            }
            v0.data[v0.index(i, j, k, l)] = static_cast<float>(dot);
          }
        }
      }
    }
  });
  CorrelationPyramid pyr;
  pyr.levels.push_back(std::move(v0));
  add_pooled_levels(pyr, num_levels);
  return pyr;
}

CorrelationPyramid transpose_pyramid(const CorrelationPyramid& forward) {
  if (forward.levels.empty()) {
    throw ParameterError("cannot transpose an empty pyramid");
  }
  const CorrelationLevel& src = forward.levels[0];
  CorrelationLevel t;
  t.rows = src.target_rows;
  t.cols = src.target_cols;
  t.target_rows = src.rows;
  t.target_cols = src.cols;
  t.data.resize(src.data.size());
  for (int i = 0; i < src.rows; ++i) {
    for (int j = 0; j < src.cols; ++j) {
      for (int k = 0; k < src.target_rows; ++k) {
        for (int l = 0; l < src.target_cols; ++l) {
          t.data[t.index(k, l, i, j)] = src.at(i, j, k, l);
        }
      }
    }
  }
  CorrelationPyramid pyr;
  pyr.reverse = !forward.reverse;
  pyr.levels.push_back(std::move(t));
  add_pooled_levels(pyr, forward.num_levels());
  return pyr;
}

BidirectionalCorrelation build_bidirectional_correlation(const FeatureMap& a,
                                                         const FeatureMap& b,
                                                         int num_levels) {
  BidirectionalCorrelation out;
  out.forward = build_correlation(a, b, num_levels);
  out.reverse = transpose_pyramid(out.forward);
  return out;
}

CorrelationLookup lookup(const CorrelationPyramid& pyr, const FlowField& flow,
                         int radius) {
  if (radius < 0) {
    throw ParameterError("lookup radius must be non-negative, got " +
                         std::to_string(radius));
  }
  check_flow_grid(pyr, flow);
  CorrelationLookup out;
  out.rows = flow.height;
  out.cols = flow.width;
  out.radius = radius;
  out.num_levels = pyr.num_levels();
  const std::size_t total =
      static_cast<std::size_t>(out.rows) * out.cols * out.samples_per_cell();
  out.values.assign(total, 0.0f);
  out.in_bounds.assign(total, 0);
  for (int i = 0; i < out.rows; ++i) {
    for (int j = 0; j < out.cols; ++j) {
      const auto fi = flow.index(i, j);
      for (int s = 0; s < out.num_levels; ++s) {
        const double scale = std::ldexp(1.0, -s);
        const double ck = (i + flow.v[fi]) * scale;
        const double cl = (j + flow.u[fi]) * scale;
        std::size_t o = out.offset(i, j, s);
        for (int dy = -radius; dy <= radius; ++dy) {
          for (int dx = -radius; dx <= radius; ++dx, ++o) {
            bool inb = false;
            out.values[o] = sample_plane(pyr.levels[s], i, j, ck + dy, cl + dx, inb);
            out.in_bounds[o] = (inb && flow.valid[fi]) ? 1 : 0;
          }
        }
      }
    }
  }
  return out;
}

FlowField refine_flow_with_correlation(const FlowField& flow,
                                       const CorrelationPyramid& pyr,
                                       int radius) {
  if (radius < 0) {
    throw ParameterError("refine radius must be non-negative, got " +
                         std::to_string(radius));
  }
  check_flow_grid(pyr, flow);
  const CorrelationLevel& lv = pyr.levels[0];
  const int win = 2 * radius + 1;
  FlowField out = flow;
  std::vector<float> vals(static_cast<std::size_t>(win) * win);
  std::vector<std::uint8_t> inb(vals.size());
  for (int i = 0; i < flow.height; ++i) {
    for (int j = 0; j < flow.width; ++j) {
      const auto fi = flow.index(i, j);
      if (!flow.valid[fi]) continue;
      const double ck = i + flow.v[fi];
      const double cl = j + flow.u[fi];
      bool any = false;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const auto w = static_cast<std::size_t>(dy + radius) * win + (dx + radius);
          bool ok = false;
          vals[w] = sample_plane(lv, i, j, ck + dy, cl + dx, ok);
          inb[w] = ok ? 1 : 0;
          any = any || ok;
        }
      }
      if (!any) continue;

      const auto at = [&](int dy, int dx) {
        return static_cast<std::size_t>(dy + radius) * win + (dx + radius);
      };
      // Only a strictly better in-bounds sample moves the flow off the centre.
      int by = 0, bx = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (inb[at(dy, dx)] && vals[at(dy, dx)] > vals[at(by, bx)]) {
            by = dy;
            bx = dx;
          }
        }
      }
      // 1D parabola through the peak and its two window neighbors.
      const auto subcell = [](double cm, double cc, double cp) {
        const double denom = cm - 2.0 * cc + cp;
        if (!(denom < 0.0)) return 0.0;
        return std::clamp(0.5 * (cm - cp) / denom, -0.5, 0.5);
      };
      const double peak = vals[at(by, bx)];
      double ox = 0.0, oy = 0.0;
      if (bx > -radius && bx < radius && inb[at(by, bx - 1)] &&
          inb[at(by, bx + 1)]) {
        ox = subcell(vals[at(by, bx - 1)], peak, vals[at(by, bx + 1)]);
      }
      if (by > -radius && by < radius && inb[at(by - 1, bx)] &&
          inb[at(by + 1, bx)]) {
        oy = subcell(vals[at(by - 1, bx)], peak, vals[at(by + 1, bx)]);
      }
      out.u[fi] = static_cast<float>(flow.u[fi] + bx + ox);
      out.v[fi] = static_cast<float>(flow.v[fi] + by + oy);
    }
  }
  return out;
}

}  // namespace rscorrect
