#include "rscorrect/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rscorrect/error.hpp"
#include "rscorrect/parallel.hpp"

namespace rscorrect {
namespace {

constexpr int kIrlsIterations = 2;
constexpr int kSorSweeps = 10;
constexpr double kSorOmega = 1.8;

struct Plane {
  int w = 0;
  int h = 0;
  std::vector<double> d;

  Plane() = default;
  Plane(int width, int height, double fill = 0.0)
      : w(width), h(height), d(static_cast<std::size_t>(width) * height, fill) {}

  double& operator()(int x, int y) { return d[static_cast<std::size_t>(y) * w + x]; }
  double operator()(int x, int y) const {
    return d[static_cast<std::size_t>(y) * w + x];
  }
  double clamped(int x, int y) const {
    return (*this)(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  }
  // Bilinear with clamp-to-edge; reports whether (x, y) lies inside.
  double sample(double x, double y, bool* inside = nullptr) const {
    if (inside) *inside = x >= 0.0 && y >= 0.0 && x <= w - 1 && y <= h - 1;
    const double xc = std::clamp(x, 0.0, w - 1.0);
    const double yc = std::clamp(y, 0.0, h - 1.0);
    const int x0 = std::min(static_cast<int>(xc), w - 1);
    const int y0 = std::min(static_cast<int>(yc), h - 1);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = xc - x0;
    const double fy = yc - y0;
    const double top = (1.0 - fx) * (*this)(x0, y0) + fx * (*this)(x1, y0);
    const double bot = (1.0 - fx) * (*this)(x0, y1) + fx * (*this)(x1, y1);
    return (1.0 - fy) * top + fy * bot;
  }
};

Plane to_gray(const Frame& f) {
  Plane p(f.width(), f.height());
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      double s = 0.0;
      for (int c = 0; c < f.channels(); ++c) s += f.at(y, x, c);
      p(x, y) = s / f.channels();
    }
  }
  return p;
}

Plane gaussian_blur(const Plane& src, double sigma) {
  if (sigma <= 0.0) return src;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& x : k) x /= sum;
  Plane tmp(src.w, src.h), out(src.w, src.h);
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) s += k[i + radius] * src.clamped(x + i, y);
      tmp(x, y) = s;
    }
  }
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) s += k[i + radius] * tmp.clamped(x, y + i);
      out(x, y) = s;
    }
  }
  return out;
}

Plane resize(const Plane& src, int w, int h) {
  Plane out(w, h);
  const double sx = static_cast<double>(src.w) / w;
  const double sy = static_cast<double>(src.h) / h;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out(x, y) = src.sample((x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
    }
  }
  return out;
}

// Five-point central derivatives.
void gradients(const Plane& p, Plane& gx, Plane& gy) {
  gx = Plane(p.w, p.h);
  gy = Plane(p.w, p.h);
  for (int y = 0; y < p.h; ++y) {
    for (int x = 0; x < p.w; ++x) {
      gx(x, y) = (p.clamped(x - 2, y) - 8.0 * p.clamped(x - 1, y) +
                  8.0 * p.clamped(x + 1, y) - p.clamped(x + 2, y)) / 12.0;
      gy(x, y) = (p.clamped(x, y - 2) - 8.0 * p.clamped(x, y - 1) +
                  8.0 * p.clamped(x, y + 1) - p.clamped(x, y + 2)) / 12.0;
    }
  }
}

Plane median_filter(const Plane& src, int radius) {
  if (radius <= 0) return src;
  Plane out(src.w, src.h);
  const int side = 2 * radius + 1;
  std::vector<double> window(static_cast<std::size_t>(side) * side);
  for (int y = 0; y < src.h; ++y) {
    const int y0 = std::max(0, y - radius);
    const int y1 = std::min(src.h - 1, y + radius);
    for (int x = 0; x < src.w; ++x) {
      const int x0 = std::max(0, x - radius);
      const int x1 = std::min(src.w - 1, x + radius);
      std::size_t n = 0;
      for (int yy = y0; yy <= y1; ++yy) {
        const double* row = &src.d[static_cast<std::size_t>(yy) * src.w];
        for (int xx = x0; xx <= x1; ++xx) window[n++] = row[xx];
      }
      const auto mid = window.begin() + static_cast<std::ptrdiff_t>(n / 2);
      std::nth_element(window.begin(), mid, window.begin() + static_cast<std::ptrdiff_t>(n));
      out(x, y) = *mid;
    }
  }
  return out;
}

struct LevelSolver {
  const Plane& i1;
  const Plane& i2;
  const Plane& i1x;
  const Plane& i1y;
  const Plane& i2x;
  const Plane& i2y;
  const FlowParams& params;

  void run(Plane& u, Plane& v) const {
    const int w = i1.w;
    const int h = i1.h;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    Plane ix(w, h), iy(w, h), it(w, h), mask(w, h);
    // Normal-equation coefficients of the linearized, reweighted data term.
    std::vector<double> a11(n), a12(n), a22(n), b1(n), b2(n);
    const double lambda = params.smoothness;
    const double eps2 = params.epsilon * params.epsilon;

    for (int warp = 0; warp < params.warp_iterations; ++warp) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          bool inside = false;
          const double sx = x + u(x, y);
          const double sy = y + v(x, y);
          const double w2 = i2.sample(sx, sy, &inside);
          ix(x, y) = 0.5 * (i1x(x, y) + i2x.sample(sx, sy));
          iy(x, y) = 0.5 * (i1y(x, y) + i2y.sample(sx, sy));
          it(x, y) = w2 - i1(x, y);
          mask(x, y) = inside ? 1.0 : 0.0;
        }
      }
      // Unknowns are the total flow; u0/v0 hold the linearization point.
      const Plane u0 = u;
      const Plane v0 = v;
      for (int irls = 0; irls < kIrlsIterations; ++irls) {
        for (std::size_t k = 0; k < n; ++k) {
          const double du = u.d[k] - u0.d[k];
          const double dv = v.d[k] - v0.d[k];
          const double r = it.d[k] + ix.d[k] * du + iy.d[k] * dv;
          const double psi = mask.d[k] / std::sqrt(r * r + eps2);
          a11[k] = psi * ix.d[k] * ix.d[k];
          a12[k] = psi * ix.d[k] * iy.d[k];
          a22[k] = psi * iy.d[k] * iy.d[k];
          b1[k] = psi * ix.d[k] * (it.d[k] - ix.d[k] * u0.d[k] - iy.d[k] * v0.d[k]);
          b2[k] = psi * iy.d[k] * (it.d[k] - ix.d[k] * u0.d[k] - iy.d[k] * v0.d[k]);
        }
        for (int sweep = 0; sweep < kSorSweeps; ++sweep) {
          // Red-black ordering: each half-sweep reads only the other color.
          for (int color = 0; color < 2; ++color) {
            for (int y = 0; y < h; ++y) {
              double* ur = &u.d[static_cast<std::size_t>(y) * w];
              double* vr = &v.d[static_cast<std::size_t>(y) * w];
              const double* uu = y > 0 ? ur - w : nullptr;
              const double* vu = y > 0 ? vr - w : nullptr;
              const double* ud = y < h - 1 ? ur + w : nullptr;
              const double* vd = y < h - 1 ? vr + w : nullptr;
              const std::size_t row = static_cast<std::size_t>(y) * w;
              for (int x = (y + color) & 1; x < w; x += 2) {
                double su = 0.0, sv = 0.0;
                int nb = 0;
                if (x > 0) { su += ur[x - 1]; sv += vr[x - 1]; ++nb; }
                if (x < w - 1) { su += ur[x + 1]; sv += vr[x + 1]; ++nb; }
                if (uu) { su += uu[x]; sv += vu[x]; ++nb; }
                if (ud) { su += ud[x]; sv += vd[x]; ++nb; }
                const std::size_t k = row + x;
                const double un =
                    (lambda * su - a12[k] * vr[x] - b1[k]) / (a11[k] + lambda * nb);
                ur[x] += kSorOmega * (un - ur[x]);
                const double vn =
                    (lambda * sv - a12[k] * ur[x] - b2[k]) / (a22[k] + lambda * nb);
                vr[x] += kSorOmega * (vn - vr[x]);
              }
            }
          }
        }
      }
      u = median_filter(u, params.median_radius);
      v = median_filter(v, params.median_radius);
    }
  }
};

}  // namespace

void FlowParams::validate() const {
  if (!(pyramid_factor > 0.0 && pyramid_factor < 1.0)) {
    throw ParameterError("pyramid_factor must lie in (0, 1)");
  }
  if (min_level_size <= 0 || warp_iterations <= 0 || median_radius <= 0) {
    throw ParameterError("flow iteration counts and sizes must be positive");
  }
  if (!(smoothness > 0.0) || !(epsilon > 0.0)) {
    throw ParameterError("flow smoothness and epsilon must be positive");
  }
}

FlowField estimate_flow(const Frame& a, const Frame& b, const FlowParams& params) {
  require_same_shape(a, b, "estimate_flow");
  params.validate();
  if (std::min(a.height(), a.width()) < params.min_level_size) {
    throw DimensionError("estimate_flow: image smaller than min_level_size");
  }

  std::vector<Plane> pyr1{to_gray(a)};
  std::vector<Plane> pyr2{to_gray(b)};
  const double sigma = 1.0 / std::sqrt(2.0 * params.pyramid_factor);
  for (;;) {
    const Plane& top = pyr1.back();
    const int nw = static_cast<int>(std::lround(top.w * params.pyramid_factor));
    const int nh = static_cast<int>(std::lround(top.h * params.pyramid_factor));
    if (std::min(nw, nh) < params.min_level_size) break;
    pyr1.push_back(resize(gaussian_blur(top, sigma), nw, nh));
    pyr2.push_back(resize(gaussian_blur(pyr2.back(), sigma), nw, nh));
  }

  Plane u(pyr1.back().w, pyr1.back().h);
  Plane v(pyr1.back().w, pyr1.back().h);
  for (int level = static_cast<int>(pyr1.size()) - 1; level >= 0; --level) {
    const Plane& i1 = pyr1[level];
    const Plane& i2 = pyr2[level];
    if (u.w != i1.w || u.h != i1.h) {
      const double fx = static_cast<double>(i1.w) / u.w;
      const double fy = static_cast<double>(i1.h) / u.h;
      u = resize(u, i1.w, i1.h);
      v = resize(v, i1.w, i1.h);
      for (double& x : u.d) x *= fx;
      for (double& y : v.d) y *= fy;
    }
    Plane i1x, i1y, i2x, i2y;
    gradients(i1, i1x, i1y);
    gradients(i2, i2x, i2y);
    LevelSolver{i1, i2, i1x, i1y, i2x, i2y, params}.run(u, v);
  }

  FlowField out(a.height(), a.width());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.u[k] = static_cast<float>(u.d[k]);
    out.v[k] = static_cast<float>(v.d[k]);
    out.valid[k] = std::isfinite(u.d[k]) && std::isfinite(v.d[k]) ? 1 : 0;
  }
  return out;
}

void sample_flow(const FlowField& f, double x, double y, double& u, double& v) {
  const double xc = std::clamp(x, 0.0, f.width - 1.0);
  const double yc = std::clamp(y, 0.0, f.height - 1.0);
  const int x0 = std::min(static_cast<int>(xc), f.width - 1);
  const int y0 = std::min(static_cast<int>(yc), f.height - 1);
  const int x1 = std::min(x0 + 1, f.width - 1);
  const int y1 = std::min(y0 + 1, f.height - 1);
  const double fx = xc - x0;
  const double fy = yc - y0;
  const auto lerp2 = [&](const std::vector<float>& c) {
    const double top = (1.0 - fx) * c[f.index(y0, x0)] + fx * c[f.index(y0, x1)];
    const double bot = (1.0 - fx) * c[f.index(y1, x0)] + fx * c[f.index(y1, x1)];
    return (1.0 - fy) * top + fy * bot;
  };
  u = lerp2(f.u);
  v = lerp2(f.v);
}

std::vector<double> forward_backward_residual(const FlowField& ab,
                                              const FlowField& ba) {
  if (ab.height != ba.height || ab.width != ba.width) {
    throw DimensionError("forward_backward_residual: grid mismatch");
  }
  std::vector<double> out(ab.size(), std::numeric_limits<double>::quiet_NaN());
  for (int y = 0; y < ab.height; ++y) {
    for (int x = 0; x < ab.width; ++x) {
      const auto i = ab.index(y, x);
      if (!ab.valid[i]) continue;
      const double qx = x + ab.u[i];
      const double qy = y + ab.v[i];
      if (qx < 0.0 || qy < 0.0 || qx > ab.width - 1 || qy > ab.height - 1) continue;
      const int nx = static_cast<int>(std::lround(qx));
      const int ny = static_cast<int>(std::lround(qy));
      if (!ba.valid[ba.index(ny, nx)]) continue;
      double bu = 0.0, bv = 0.0;
      sample_flow(ba, qx, qy, bu, bv);
      out[i] = std::hypot(ab.u[i] + bu, ab.v[i] + bv);
    }
  }
  return out;
}

double interior_median(const std::vector<double>& values, int height, int width,
                       int border) {
  std::vector<double> kept;
  for (int y = border; y < height - border; ++y) {
    for (int x = border; x < width - border; ++x) {
      const double e = values[static_cast<std::size_t>(y) * width + x];
      if (std::isfinite(e)) kept.push_back(e);
    }
  }
  if (kept.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = kept.begin() + static_cast<std::ptrdiff_t>(kept.size() / 2);
  std::nth_element(kept.begin(), mid, kept.end());
  return *mid;
}

std::vector<double> endpoint_error(const FlowField& f, const FlowField& g) {
  if (f.height != g.height || f.width != g.width) {
    throw DimensionError("endpoint_error: grid mismatch");
  }
  std::vector<double> out(f.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f.valid[k] && g.valid[k]) {
      out[k] = std::hypot(static_cast<double>(f.u[k]) - g.u[k],
                          static_cast<double>(f.v[k]) - g.v[k]);
    }
  }
  return out;
}

}  // namespace rscorrect
