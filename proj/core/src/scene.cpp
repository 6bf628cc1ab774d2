#include "rscorrect/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rscorrect/error.hpp"
#include "rscorrect/formation.hpp"
#include "rscorrect/parallel.hpp"

namespace rscorrect {
namespace {

constexpr int kOctaves = 4;
constexpr double kBaseCell = 64.0;
// Raster samples per canvas pixel along each axis.
constexpr int kOversample = 2;
constexpr double kLacunarity = 2.0;
constexpr double kGain = 0.5;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double lattice(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(ix));
  h = splitmix64(h ^ static_cast<std::uint64_t>(iy));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(double x, double y, std::uint64_t seed) {
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx0);
  const auto iy = static_cast<std::int64_t>(fy0);
  const double sx = smoothstep(x - fx0);
  const double sy = smoothstep(y - fy0);
  const double a = lattice(ix, iy, seed);
  const double b = lattice(ix + 1, iy, seed);
  const double c = lattice(ix, iy + 1, seed);
  const double d = lattice(ix + 1, iy + 1, seed);
  return (1.0 - sy) * ((1.0 - sx) * a + sx * b) + sy * ((1.0 - sx) * c + sx * d);
}

double fractal_noise(double x, double y, std::uint64_t seed) {
  double sum = 0.0;
  double norm = 0.0;
  double amp = 1.0;
  double cell = kBaseCell;
  for (int o = 0; o < kOctaves; ++o) {
    sum += amp * value_noise(x / cell, y / cell, splitmix64(seed + o));
    norm += amp;
    amp *= kGain;
    cell /= kLacunarity;
  }
  const double v = sum / norm;
  return 0.5 + 0.5 * std::tanh(3.0 * (v - 0.5));
}

double max_radius(const SceneSpec& s, double cx, double cy) {
  double r = 0.0;
  for (double x : {0.0, s.width - 1.0}) {
    for (double y : {0.0, s.height - 1.0}) {
      r = std::max(r, std::hypot(x - cx, y - cy));
    }
  }
  return r;
}

}  // namespace

Scene::Scene(SceneSpec spec) : spec_(std::move(spec)) {
  if (spec_.height < 2 || spec_.width < 2) {
    throw DimensionError("scene canvas must be at least 2x2");
  }
  if (spec_.channels != 1 && spec_.channels != 3) {
    throw DimensionError("scene must have 1 or 3 channels");
  }
  if (spec_.margin < 0) {
    throw ConfigError("scene margin must be non-negative");
  }
  const int m = spec_.margin;
  raster_w_ = (spec_.width + 2 * m + 2) * kOversample;
  raster_h_ = (spec_.height + 2 * m + 2) * kOversample;
  const int ch = spec_.channels;
  raster_.assign(static_cast<std::size_t>(raster_w_) * raster_h_ * ch, 0.0f);

  for (int y = 0; y < raster_h_; ++y) {
    for (int x = 0; x < raster_w_; ++x) {
      float* px = &raster_[(static_cast<std::size_t>(y) * raster_w_ + x) * ch];
      const double tx = static_cast<double>(x) / kOversample;
      const double ty = static_cast<double>(y) / kOversample;
      if (spec_.texture == TextureKind::VerticalLine) {
        const double cx = tx - m - (spec_.width - 1) / 2.0;
        const double v = 0.15 + 0.7 * std::exp(-cx * cx / (2.0 * 1.5 * 1.5));
        for (int c = 0; c < ch; ++c) px[c] = static_cast<float>(v);
        continue;
      }
      const double base = fractal_noise(tx, ty, spec_.seed);
      if (ch == 1) {
        px[0] = static_cast<float>(base);
        continue;
      }
      for (int c = 0; c < ch; ++c) {
        const double tint =
            fractal_noise(tx, ty, splitmix64(spec_.seed ^ (0xc0ffeeULL + c)));
        px[c] = static_cast<float>(0.75 * base + 0.25 * tint);
      }
    }
  }
}

std::pair<double, double> Scene::validity_window() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double margin = spec_.margin;
  return std::visit(
      [&](const auto& mo) -> std::pair<double, double> {
        using T = std::decay_t<decltype(mo)>;
        if constexpr (std::is_same_v<T, Translation>) {
          const double speed = std::hypot(mo.vx, mo.vy);
          if (speed == 0.0) return {-inf, inf};
          return {-margin / speed, margin / speed};
        } else if constexpr (std::is_same_v<T, Rotation>) {
          const double r = max_radius(spec_, mo.cx, mo.cy);
          if (mo.omega == 0.0 || margin >= 2.0 * r) return {-inf, inf};
          const double t = 2.0 * std::asin(margin / (2.0 * r)) / std::abs(mo.omega);
          return {-t, t};
        } else {
          const double r = max_radius(spec_, mo.cx, mo.cy);
          if (mo.rate == 0.0 || r == 0.0) return {-inf, inf};
          // exp(-rate t) must stay within [1 - margin/r, 1 + margin/r].
          const double lo = margin >= r ? -inf : std::log(1.0 - margin / r);
          const double hi = std::log(1.0 + margin / r);
          const double a = -hi / mo.rate;
          const double b = -lo / mo.rate;
          return {std::min(a, b), std::max(a, b)};
        }
      },
      spec_.motion);
}

bool Scene::covers(double time) const {
  const auto [lo, hi] = validity_window();
  const double slack = 1e-12 * std::max(1.0, std::abs(time));
  return time >= lo - slack && time <= hi + slack;
}

Point2 Scene::to_texture(Point2 p, double time) const {
  return std::visit(
      [&](const auto& mo) -> Point2 {
        using T = std::decay_t<decltype(mo)>;
        if constexpr (std::is_same_v<T, Translation>) {
          return {p.x - mo.vx * time, p.y - mo.vy * time};
        } else if constexpr (std::is_same_v<T, Rotation>) {
          const double a = -mo.omega * time;
          const double dx = p.x - mo.cx;
          const double dy = p.y - mo.cy;
          return {mo.cx + std::cos(a) * dx - std::sin(a) * dy,
                  mo.cy + std::sin(a) * dx + std::cos(a) * dy};
        } else {
          const double s = std::exp(-mo.rate * time);
          return {mo.cx + (p.x - mo.cx) * s, mo.cy + (p.y - mo.cy) * s};
        }
      },
      spec_.motion);
}

Point2 Scene::from_texture(Point2 x, double time) const {
  return std::visit(
      [&](const auto& mo) -> Point2 {
        using T = std::decay_t<decltype(mo)>;
        if constexpr (std::is_same_v<T, Translation>) {
          return {x.x + mo.vx * time, x.y + mo.vy * time};
        } else if constexpr (std::is_same_v<T, Rotation>) {
          const double a = mo.omega * time;
          const double dx = x.x - mo.cx;
          const double dy = x.y - mo.cy;
          return {mo.cx + std::cos(a) * dx - std::sin(a) * dy,
                  mo.cy + std::sin(a) * dx + std::cos(a) * dy};
        } else {
          const double s = std::exp(mo.rate * time);
          return {mo.cx + (x.x - mo.cx) * s, mo.cy + (x.y - mo.cy) * s};
        }
      },
      spec_.motion);
}

float Scene::texture_at(Point2 x, int channel) const {
  const double m = spec_.margin;
  const double rx = std::clamp((x.x + m) * kOversample, 0.0, raster_w_ - 1.0);
  const double ry = std::clamp((x.y + m) * kOversample, 0.0, raster_h_ - 1.0);
  const int x0 = std::min(static_cast<int>(rx), raster_w_ - 2);
  const int y0 = std::min(static_cast<int>(ry), raster_h_ - 2);
  const double fx = rx - x0;
  const double fy = ry - y0;
  const int ch = spec_.channels;
  const auto at = [&](int xx, int yy) {
    return static_cast<double>(
        raster_[(static_cast<std::size_t>(yy) * raster_w_ + xx) * ch + channel]);
  };
  const double top = (1.0 - fx) * at(x0, y0) + fx * at(x0 + 1, y0);
  const double bottom = (1.0 - fx) * at(x0, y0 + 1) + fx * at(x0 + 1, y0 + 1);
  return static_cast<float>((1.0 - fy) * top + fy * bottom);
}

void Scene::render_row(int row, double time, std::span<float> out) const {
  const int ch = spec_.channels;
  for (int col = 0; col < spec_.width; ++col) {
    const Point2 x = to_texture({static_cast<double>(col), static_cast<double>(row)}, time);
    for (int c = 0; c < ch; ++c) {
      out[static_cast<std::size_t>(col) * ch + c] = texture_at(x, c);
    }
  }
}

Frame Scene::render_gs_at(double time) const {
  if (!covers(time)) {
    throw RangeError("scene time " + std::to_string(time) +
                     " outside the validity window implied by the margin");
  }
  Frame out(spec_.height, spec_.width, spec_.channels);
  parallel_for(0, spec_.height, [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r) render_row(r, time, out.row(r));
  });
  return out;
}

Frame Scene::render_rs_exact(const ScanConfig& scan) const {
  scan.validate();
  if (scan.height != spec_.height || scan.width != spec_.width) {
    throw DimensionError("render_rs_exact: scan geometry does not match scene");
  }
  for (int r = 1; r <= scan.height; ++r) {
    if (!covers(row_time(scan, r))) {
      throw RangeError("row " + std::to_string(r) +
                       " capture time outside the scene validity window");
    }
  }
  Frame out(spec_.height, spec_.width, spec_.channels);
  parallel_for(0, spec_.height, [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r) render_row(r, row_time(scan, r + 1), out.row(r));
  });
  return out;
}

FlowField Scene::exact_flow(const ScanConfig& from, const ScanConfig& to) const {
  from.validate();
  to.validate();
  if (from.height != spec_.height || from.width != spec_.width ||
      to.height != spec_.height || to.width != spec_.width) {
    throw DimensionError("exact_flow: scan geometry does not match scene");
  }
  FlowField flow(spec_.height, spec_.width);
  parallel_for(0, spec_.height, [&](int r0, int r1) {
    for (int r = r0; r < r1; ++r) {
      const double t_from = row_time(from, r + 1);
      for (int c = 0; c < spec_.width; ++c) {
        const Point2 p{static_cast<double>(c), static_cast<double>(r)};
        const Point2 x = to_texture(p, t_from);
        // Solve q = from_texture(x, t_to(q.y)) for the row q.y.
        Point2 q = p;
        for (int it = 0; it < 100; ++it) {
          const Point2 next = from_texture(x, row_time_at(to, q.y));
          const double step = std::abs(next.y - q.y) + std::abs(next.x - q.x);
          q = next;
          if (step < 1e-12) break;
        }
        const auto i = flow.index(r, c);
        flow.u[i] = static_cast<float>(q.x - p.x);
        flow.v[i] = static_cast<float>(q.y - p.y);
        flow.valid[i] = std::isfinite(q.x) && std::isfinite(q.y) ? 1 : 0;
      }
    }
  });
  return flow;
}

Frame render_gs_at(const SceneSpec& spec, double time) {
  return Scene(spec).render_gs_at(time);
}

Frame render_rs_exact(const SceneSpec& spec, const ScanConfig& scan) {
  return Scene(spec).render_rs_exact(scan);
}

}  // namespace rscorrect
