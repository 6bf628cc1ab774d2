#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "rscorrect/correction.hpp"
#include "rscorrect/formation.hpp"
#include "rscorrect/frame.hpp"
#include "rscorrect/scene.hpp"

namespace testing {

inline rscorrect::Frame random_frame(std::mt19937_64& rng, int h, int w, int c = 3) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  rscorrect::Frame f(h, w, c);
  for (float& x : f.data()) x = u(rng);
  return f;
}

inline double max_abs_diff(const rscorrect::Frame& a, const rscorrect::Frame& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
  }
  return m;
}

inline bool rows_equal(const rscorrect::Frame& a, int ra, const rscorrect::Frame& b, int rb) {
  const auto x = a.row(ra);
  const auto y = b.row(rb);
  return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

inline rscorrect::ScanConfig scan(int h, int w, double tau,
                                  rscorrect::ScanDirection d = rscorrect::ScanDirection::TopToBottom,
                                  double t_mid = 0.0) {
  return rscorrect::ScanConfig{h, w, tau, d, t_mid};
}

inline rscorrect::SceneSpec translation_scene(double vx, double vy, std::uint64_t seed,
                                              int h = 256, int w = 256) {
  rscorrect::SceneSpec s;
  s.seed = seed;
  s.motion = rscorrect::Translation{vx, vy};
  s.height = h;
  s.width = w;
  return s;
}

// Dual RS pair of a scene over a one-second scan centred on t=0, so scene
// velocities read as pixels per scan.
struct DualScene {
  rscorrect::Scene scene;
  rscorrect::ScanConfig t2b;
  rscorrect::ScanConfig b2t;
  rscorrect::Frame i_t2b;
  rscorrect::Frame i_b2t;
  rscorrect::DualFlow exact;

  // Analytic GS frame at the capture time of t2b row m.
  rscorrect::Frame gs_at_row(int m) const {
    return scene.render_gs_at(rscorrect::row_time(t2b, m));
  }
};

inline DualScene make_dual(const rscorrect::SceneSpec& spec) {
  const double tau = 1.0 / (spec.height - 1);
  DualScene d{rscorrect::Scene(spec),
              scan(spec.height, spec.width, tau),
              scan(spec.height, spec.width, tau, rscorrect::ScanDirection::BottomToTop),
              {}, {}, {}};
  d.i_t2b = d.scene.render_rs_exact(d.t2b);
  d.i_b2t = d.scene.render_rs_exact(d.b2t);
  d.exact = {d.scene.exact_flow(d.t2b, d.b2t), d.scene.exact_flow(d.b2t, d.t2b)};
  return d;
}

}  // namespace testing
