#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "rscorrect/frame.hpp"

namespace rscorrect {

enum class TextureKind {
  ValueNoise,    // 4-octave seeded value noise
  VerticalLine,  // one smooth vertical line on a flat background
};

struct Translation {
  double vx = 0.0;  // px / s
  double vy = 0.0;
  bool operator==(const Translation&) const = default;
};

struct Rotation {
  double omega = 0.0;  // rad / s, counter-clockwise in image coordinates
  double cx = 0.0;
  double cy = 0.0;
  bool operator==(const Rotation&) const = default;
};

struct Zoom {
  double rate = 0.0;  // 1 / s; scale grows as exp(rate * t)
  double cx = 0.0;
  double cy = 0.0;
  bool operator==(const Zoom&) const = default;
};

using Motion = std::variant<Translation, Rotation, Zoom>;

/// Parametric scene. The texture sits at rest at time 0 and is carried by
/// `motion`; `margin` bounds how far any canvas pixel may travel.
struct SceneSpec {
  TextureKind texture = TextureKind::ValueNoise;
  std::uint64_t seed = 1;
  Motion motion = Translation{};
  int height = 256;
  int width = 256;
  int channels = 3;
  int margin = 32;

  bool operator==(const SceneSpec&) const = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// A SceneSpec with its texture raster generated. Rendering is a pure
/// function of (spec, time).
class Scene {
 public:
  explicit Scene(SceneSpec spec);

  const SceneSpec& spec() const { return spec_; }

  // Closed time interval over which no pixel moves further than the margin.
  std::pair<double, double> validity_window() const;
  bool covers(double time) const;

  // Inverse motion: texture coordinate seen at canvas point p at `time`.
  Point2 to_texture(Point2 p, double time) const;
  // Forward motion: canvas point where texture coordinate X appears.
  Point2 from_texture(Point2 x, double time) const;

  Frame render_gs_at(double time) const;
  Frame render_rs_exact(const ScanConfig& scan) const;

  // Ground-truth flow from the image captured with `from` to the image
  // captured with `to`, on the `from` grid: from(p) = to(p + flow(p)).
  FlowField exact_flow(const ScanConfig& from, const ScanConfig& to) const;

  // Texture value at canvas-space texture coordinate x for channel c.
  float texture_at(Point2 x, int channel) const;

 private:
  void render_row(int row, double time, std::span<float> out) const;

  SceneSpec spec_;
  int raster_w_ = 0;
  int raster_h_ = 0;
  std::vector<float> raster_;  // interleaved channels
};

Frame render_gs_at(const SceneSpec& spec, double time);
Frame render_rs_exact(const SceneSpec& spec, const ScanConfig& scan);

}  // namespace rscorrect
