#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "rscorrect/error.hpp"
#include "rscorrect/formation.hpp"
#include "rscorrect/scene.hpp"

using namespace rscorrect;

namespace {

GsSequence sequence_at_row_times(const Scene& scene, const ScanConfig& sc) {
  GsSequence seq;
  for (int step = 1; step <= sc.height; ++step) {
    ScanConfig t2b = sc;
    t2b.direction = ScanDirection::TopToBottom;
    const double t = row_time(t2b, step);
    seq.frames.push_back(scene.render_gs_at(t));
    seq.times.push_back(t);
  }
  return seq;
}

GsSequence random_sequence(std::mt19937_64& rng, int n, int h, int w, double t0, double dt) {
  GsSequence seq;
  for (int k = 0; k < n; ++k) {
    seq.frames.push_back(testing::random_frame(rng, h, w));
    seq.times.push_back(t0 + k * dt);
  }
  return seq;
}

}  // namespace

TEST_CASE("row times for H=5") {
  const ScanConfig t2b = testing::scan(5, 4, 1.0);
  const ScanConfig b2t = testing::scan(5, 4, 1.0, ScanDirection::BottomToTop);
  for (int i = 1; i <= 5; ++i) {
    CHECK(row_time(t2b, i) == i - 3.0);
    CHECK(row_time(b2t, i) == 3.0 - i);
  }
  CHECK(row_time(testing::scan(7, 4, 0.3, ScanDirection::TopToBottom, 2.5), 4) == 2.5);
  CHECK_THROWS_AS(row_time(t2b, 0), RangeError);
  CHECK_THROWS_AS(row_time(t2b, 6), RangeError);
}

TEST_CASE("sequence validation") {
  GsSequence seq;
  CHECK_THROWS_AS(seq.validate(), ConfigError);
  seq.frames = {Frame(4, 4, 3), Frame(4, 4, 3)};
  seq.times = {1.0, 1.0};
  CHECK_THROWS_AS(seq.validate(), ConfigError);
  seq.times = {0.0};
  CHECK_THROWS_AS(seq.validate(), ConfigError);
}

TEST_CASE("identical GS frames give an undistorted RS image") {
  std::mt19937_64 rng(20);
  const Frame f = testing::random_frame(rng, 9, 6);
  GsSequence seq{{f, f, f}, {-10.0, 0.0, 10.0}};
  const ScanConfig t2b = testing::scan(9, 6, 0.5);
  ScanConfig b2t = t2b;
  b2t.direction = ScanDirection::BottomToTop;
  CHECK(synthesize_rs(seq, t2b) == f);
  const auto [a, b] = synthesize_dual_pair(seq, t2b, b2t);
  CHECK(a == f);
  CHECK(b == f);
}

TEST_CASE("a row midway between two frames is their average") {
  const Frame a(5, 3, 3, 0.2f), b(5, 3, 3, 0.8f);
  GsSequence seq{{a, b}, {-2.0, 2.0}};
  const Frame rs = synthesize_rs(seq, testing::scan(5, 3, 1.0));
  for (float v : rs.row(2)) CHECK(v == doctest::Approx(0.5).epsilon(1e-6));
  for (float v : rs.row(0)) CHECK(v == 0.2f);
  for (float v : rs.row(4)) CHECK(v == 0.8f);
}

TEST_CASE("coverage error names the offending row") {
  const Frame a(5, 3, 3, 0.2f);
  GsSequence seq{{a, a}, {-1.0, 2.0}};
  try {
    synthesize_rs(seq, testing::scan(5, 3, 1.0));
    FAIL("expected a coverage error");
  } catch (const CoverageError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("dual pair rejects mismatched configs") {
  const Frame a(5, 3, 3, 0.2f);
  GsSequence seq{{a, a}, {-3.0, 3.0}};
  ScanConfig t2b = testing::scan(5, 3, 1.0);
  ScanConfig b2t = testing::scan(5, 3, 1.1, ScanDirection::BottomToTop);
  CHECK_THROWS_AS(synthesize_dual_pair(seq, t2b, b2t), ConfigError);
  CHECK_THROWS_AS(synthesize_dual_pair(seq, t2b, t2b), ConfigError);
}

TEST_CASE("synthesis from frames at every row time reproduces the exact render") {
  for (const Motion& mo : {Motion{Translation{300.0, -150.0}}, Motion{Rotation{2.0, 15.0, 20.0}},
                           Motion{Zoom{1.5, 16.0, 12.0}}}) {
    SceneSpec s;
    s.seed = 5;
    s.motion = mo;
    s.height = 33;
    s.width = 30;
    const Scene scene(s);
    for (ScanDirection d : {ScanDirection::TopToBottom, ScanDirection::BottomToTop}) {
      const ScanConfig sc = testing::scan(33, 30, 1e-3, d, 0.004);
      const Frame rs = synthesize_rs(sequence_at_row_times(scene, sc), sc);
      CHECK(testing::max_abs_diff(rs, scene.render_rs_exact(sc)) <= 1e-6);
    }
  }
}

TEST_CASE("property: b2t synthesis equals flipped t2b synthesis of the flipped sequence") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> tau(0.05, 0.4);
  for (int trial = 0; trial < 15; ++trial) {
    const int h = 5 + trial;
    GsSequence seq = random_sequence(rng, 4, h, 6, -10.0, 7.0);
    GsSequence flipped = seq;
    for (Frame& f : flipped.frames) f = flip_vertical(f);
    const double t = tau(rng);
    const ScanConfig b2t = testing::scan(h, 6, t, ScanDirection::BottomToTop, 0.3);
    const ScanConfig t2b = testing::scan(h, 6, t, ScanDirection::TopToBottom, 0.3);
    CHECK(testing::max_abs_diff(synthesize_rs(seq, b2t),
                                flip_vertical(synthesize_rs(flipped, t2b))) < 1e-6);
    if (h % 2 == 1) {
      const auto [a, b] = synthesize_dual_pair(seq, t2b, b2t);
      CHECK(testing::rows_equal(a, (h - 1) / 2, b, (h - 1) / 2));
    }
  }
}

TEST_CASE("property: each row only depends on the frames bracketing its time") {
  std::mt19937_64 rng(22);
  GsSequence seq = random_sequence(rng, 5, 9, 4, -4.0, 2.0);  // times -4..4
  const ScanConfig sc = testing::scan(9, 4, 0.5);             // rows at -2..2
  const Frame base = synthesize_rs(seq, sc);
  // Perturb the frame at t=-4; only rows with time < -2 could see it, and none do.
  GsSequence changed = seq;
  changed.frames[0] = testing::random_frame(rng, 9, 4);
  CHECK(synthesize_rs(changed, sc) == base);
  // Perturb the frame at t=2; rows 6..9 (t>0) see it, rows 1..4 do not.
  changed = seq;
  changed.frames[3] = testing::random_frame(rng, 9, 4);
  const Frame other = synthesize_rs(changed, sc);
  for (int r = 0; r < 4; ++r) CHECK(testing::rows_equal(other, r, base, r));
  CHECK(testing::rows_equal(other, 4, base, 4));
  for (int r = 5; r < 9; ++r) CHECK_FALSE(testing::rows_equal(other, r, base, r));
}

TEST_CASE("interpolate_gs is exact at sample times and errors outside") {
  std::mt19937_64 rng(23);
  GsSequence seq = random_sequence(rng, 3, 4, 4, 0.0, 1.0);
  CHECK(interpolate_gs(seq, 1.0) == seq.frames[1]);
  CHECK_THROWS_AS(interpolate_gs(seq, 2.5), CoverageError);
  CHECK_THROWS_AS(interpolate_gs(seq, -0.1), CoverageError);
}
