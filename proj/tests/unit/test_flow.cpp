#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "rscorrect/error.hpp"
#include "rscorrect/flow.hpp"
#include "rscorrect/scene.hpp"

using namespace rscorrect;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> magnitudes(const FlowField& f) {
  std::vector<double> m(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) m[k] = std::hypot(f.u[k], f.v[k]);
  return m;
}

}  // namespace

TEST_CASE("flow params validation") {
  FlowParams p;
  CHECK_NOTHROW(p.validate());
  p.pyramid_factor = 1.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = {};
  p.smoothness = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = {};
  p.median_radius = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  CHECK_THROWS_AS(estimate_flow(Frame(8, 8, 3), Frame(8, 8, 3)), DimensionError);
  CHECK_THROWS_AS(estimate_flow(Frame(32, 32, 3), Frame(32, 33, 3)), DimensionError);
}

TEST_CASE("identical frames give near-zero flow") {
  const Frame a = render_gs_at(testing::translation_scene(0, 0, 40, 96, 96), 0.0);
  const FlowField f = estimate_flow(a, a);
  CHECK(interior_median(magnitudes(f), 96, 96, 0) < 0.05);
}

TEST_CASE("global translation is recovered and the reverse flow is consistent") {
  const SceneSpec s = testing::translation_scene(3.0, -2.0, 41, 112, 112);
  const Frame a = render_gs_at(s, 0.0);
  const Frame b = render_gs_at(s, 1.0);
  const FlowField ab = estimate_flow(a, b);
  const FlowField ba = estimate_flow(b, a);
  const FlowField truth(112, 112, 3.0f, -2.0f);
  CHECK(interior_median(endpoint_error(ab, truth), 112, 112, 16) <= 0.25);
  CHECK(interior_median(forward_backward_residual(ab, ba), 112, 112, 16) <= 0.5);
}

TEST_CASE("flow estimation is deterministic") {
  const SceneSpec s = testing::translation_scene(1.5, 0.5, 42, 64, 64);
  const Frame a = render_gs_at(s, 0.0);
  const Frame b = render_gs_at(s, 1.0);
  const FlowField f = estimate_flow(a, b);
  const FlowField g = estimate_flow(a, b);
  CHECK(f.u == g.u);
  CHECK(f.v == g.v);
}

TEST_CASE("endpoint error and forward-backward residual on constructed fields") {
  FlowField f(3, 4, 1.0f, 0.0f), g(3, 4, 1.0f, 0.0f);
  g.u[g.index(1, 1)] = 4.0f;
  g.valid[g.index(2, 2)] = 0;
  const auto e = endpoint_error(f, g);
  CHECK(e[f.index(1, 1)] == 3.0);
  CHECK(std::isnan(e[f.index(2, 2)]));
  CHECK(e[0] == 0.0);

  const FlowField back(3, 4, -1.0f, 0.0f);
  const auto r = forward_backward_residual(f, back);
  CHECK(r[f.index(0, 0)] == 0.0);
  CHECK(std::isnan(r[f.index(0, 3)]));  // lands outside
  CHECK_THROWS_AS(endpoint_error(f, FlowField(3, 5)), DimensionError);
}

TEST_CASE("interior median ignores the border and non-finite entries") {
  std::vector<double> v(25, 100.0);
  v[6] = 1.0;
  v[7] = 2.0;
  v[8] = kNan;
  v[12] = 3.0;
  v[13] = 3.0;
  v[16] = 5.0;
  v[17] = 6.0;
  v[18] = 7.0;
  v[11] = 0.0;
  // Interior values (border 1): 1 2 0 3 3 5 6 7 -> sorted 0 1 2 3 3 5 6 7, upper middle 3.
  CHECK(interior_median(v, 5, 5, 1) == 3.0);
  CHECK(std::isnan(interior_median(std::vector<double>(4, kNan), 2, 2, 0)));
}
