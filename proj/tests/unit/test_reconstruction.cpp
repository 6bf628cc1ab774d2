#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "recon_oracles.hpp"
#include "rscorrect/error.hpp"
#include "rscorrect/metrics.hpp"
#include "rscorrect/reconstruction.hpp"

using namespace rscorrect;

namespace {

constexpr auto T2B = ScanDirection::TopToBottom;
constexpr auto B2T = ScanDirection::BottomToTop;

FlowField flip_flow(const FlowField& f) {
  FlowField out(f.height, f.width);
  for (int r = 0; r < f.height; ++r)
    for (int c = 0; c < f.width; ++c) {
      const auto s = f.index(f.height - 1 - r, c);
      const auto d = out.index(r, c);
      out.u[d] = f.u[s];
      out.v[d] = -f.v[s];
      out.valid[d] = f.valid[s];
    }
  return out;
}

PairFlows exact_pair(const Scene& scene, double t0, double t1, int h, int w) {
  // GS frames are RS scans with zero readout time.
  const ScanConfig a{h, w, 1e-300, T2B, t0};
  const ScanConfig b{h, w, 1e-300, T2B, t1};
  return {scene.exact_flow(a, b), scene.exact_flow(b, a)};
}

}  // namespace

TEST_CASE("time map hand vectors for H=5") {
  CHECK(distorted_time_map({SegmentKind::FullSpan, 5, 0}).values ==
        std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(distorted_time_map({SegmentKind::StartToMid, 5, 3}).values ==
        std::vector<double>{0, 0.5, 1, 1, 1});
  CHECK(distorted_time_map({SegmentKind::MidToEnd, 5, 3}).values ==
        std::vector<double>{0, 0, 0, 0, 1});
  CHECK(distorted_time_map({SegmentKind::StartToMid, 5, 1}).values ==
        std::vector<double>{0, 1, 1, 1, 1});
  CHECK(distorted_time_map({SegmentKind::MidToEnd, 5, 4}).values ==
        std::vector<double>{0, 0, 0, 0, 1});
  CHECK_THROWS_AS(distorted_time_map({SegmentKind::MidToEnd, 5, 6}), RangeError);
  CHECK_THROWS_AS(distorted_time_map({SegmentKind::FullSpan, 1, 0}), DimensionError);
}

TEST_CASE("time mask hand vectors") {
  CHECK(time_mask(3, 5, T2B).values == std::vector<double>{1, 1, 1, 0, 0});
  CHECK(time_mask(3, 5, B2T).values == std::vector<double>{0, 0, 1, 1, 1});
  CHECK(time_mask(5, 5, T2B).values == std::vector<double>(5, 1.0));
  CHECK_THROWS_AS(time_mask(0, 5, T2B), RangeError);
}

TEST_CASE("property: maps match the hand formulas and their identities") {
  for (int h : {2, 3, 5, 8, 33}) {
    const TimeMap full = distorted_time_map({SegmentKind::FullSpan, h, 0});
    CHECK(testing::max_abs(full.values, testing::full_span_oracle(h)) <= 1e-12);
    const TimeMap comp = full.complement();
    for (int i = 0; i < h; ++i) CHECK(comp.values[i] == 1.0 - full.values[i]);
    for (int m = 1; m <= h; ++m) {
      CHECK(testing::max_abs(distorted_time_map({SegmentKind::StartToMid, h, m}).values,
                             testing::start_to_mid_oracle(h, m)) <= 1e-12);
      CHECK(testing::max_abs(distorted_time_map({SegmentKind::MidToEnd, h, m}).values,
                             testing::mid_to_end_oracle(h, m)) <= 1e-12);
      CHECK(time_mask(m, h, T2B).values == testing::mask_oracle(h, m, false));
      CHECK(time_mask(m, h, B2T).values == testing::mask_oracle(h, m, true));
      CHECK(time_mask(m, h, B2T).values == time_mask(m, h, T2B).flipped().values);
    }
  }
}

TEST_CASE("vfi endpoints and static input") {
  std::mt19937_64 rng(60);
  const Frame a = testing::random_frame(rng, 8, 6);
  const FlowField f(8, 6, 1.3f, -0.7f);
  CHECK(vfi_rowwise(a, f, TimeMap(std::vector<double>(8, 0.0))) == a);
  const Frame big = testing::random_frame(rng, 32, 32);
  CHECK(vfi_rowwise(big, big, distorted_time_map({SegmentKind::FullSpan, 32, 0})) == big);
  CHECK_THROWS_AS(vfi_rowwise(a, f, TimeMap(std::vector<double>(7, 0.0))), DimensionError);
  CHECK_THROWS_AS(vfi_rowwise(a, FlowField(8, 5), TimeMap(std::vector<double>(8, 0.0))),
                  DimensionError);
}

TEST_CASE("row-wise interpolation of a translation scene approximates the RS render") {
  const testing::DualScene d = testing::make_dual(testing::translation_scene(6.0, 2.0, 61, 97, 96));
  const Frame g1 = d.gs_at_row(1);
  const Frame gh = d.gs_at_row(97);
  const Frame out = vfi_rowwise(g1, gh, distorted_time_map({SegmentKind::FullSpan, 97, 0}));
  CHECK(psnr(out, d.i_t2b, 16) >= 35.0);
}

TEST_CASE("full reconstruction endpoints are exact") {
  std::mt19937_64 rng(62);
  const Frame gs = testing::random_frame(rng, 20, 24);
  const Frame ge = testing::random_frame(rng, 20, 24);
  const PairFlows flows{FlowField(20, 24, 2.0f, 1.0f), FlowField(20, 24, -2.0f, -1.0f)};
  const Frame t2b = reconstruct_rs_full(gs, ge, flows, T2B);
  CHECK(testing::rows_equal(t2b, 0, gs, 0));
  CHECK(testing::rows_equal(t2b, 19, ge, 19));
  const Frame b2t = reconstruct_rs_full(gs, ge, flows, B2T);
  CHECK(testing::rows_equal(b2t, 19, gs, 19));
  CHECK(testing::rows_equal(b2t, 0, ge, 0));
  CHECK(reconstruct_rs_full(gs, gs, PairFlows{FlowField(20, 24), FlowField(20, 24)}, T2B) == gs);
  CHECK_THROWS_AS(reconstruct_rs_full(gs, ge, flows, T2B, 0.0), ParameterError);
}

TEST_CASE("identical frames reconstruct to themselves") {
  const Frame g = render_gs_at(testing::translation_scene(0, 0, 63, 48, 40), 0.0);
  CHECK(reconstruct_rs_full(g, g, T2B) == g);
  for (int m : {1, 10, 47, 48}) {
    CHECK(reconstruct_rs_with_intermediate(g, g, g, m, B2T) == g);
  }
}

TEST_CASE("split at the last row equals the first segment alone") {
  std::mt19937_64 rng(64);
  const Frame a = testing::random_frame(rng, 16, 16);
  const Frame b = testing::random_frame(rng, 16, 16);
  const Frame c = testing::random_frame(rng, 16, 16);
  const PairFlows f1{FlowField(16, 16, 1.0f, 0.5f), FlowField(16, 16, -1.0f, -0.5f)};
  const PairFlows f2{FlowField(16, 16, 0.5f, 0.0f), FlowField(16, 16, -0.5f, 0.0f)};
  CHECK(reconstruct_rs_with_intermediate(a, b, c, f1, f2, 16, T2B) ==
        reconstruct_rs_full(a, b, f1, T2B));
}

TEST_CASE("property: b2t reconstruction is the flip of t2b on flipped inputs") {
  std::mt19937_64 rng(65);
  std::uniform_real_distribution<float> u(-3.0f, 3.0f);
  for (int trial = 0; trial < 8; ++trial) {
    const int h = 10 + trial;
    const Frame a = testing::random_frame(rng, h, 12);
    const Frame b = testing::random_frame(rng, h, 12);
    const Frame c = testing::random_frame(rng, h, 12);
    const PairFlows f1{FlowField(h, 12, u(rng), u(rng)), FlowField(h, 12, u(rng), u(rng))};
    const PairFlows f2{FlowField(h, 12, u(rng), u(rng)), FlowField(h, 12, u(rng), u(rng))};
    const PairFlows f1f{flip_flow(f1.forward), flip_flow(f1.backward)};
    const PairFlows f2f{flip_flow(f2.forward), flip_flow(f2.backward)};
    const Frame af = flip_vertical(a), bf = flip_vertical(b), cf = flip_vertical(c);
    CHECK(testing::max_abs_diff(reconstruct_rs_full(a, b, f1, B2T),
                                flip_vertical(reconstruct_rs_full(af, bf, f1f, T2B))) < 1e-6);
    const int m = 1 + trial;
    CHECK(testing::max_abs_diff(
              reconstruct_rs_with_intermediate(a, b, c, f1, f2, m, B2T),
              flip_vertical(reconstruct_rs_with_intermediate(af, bf, cf, f1f, f2f, m, T2B))) < 1e-6);
  }
}

TEST_CASE("flip equivariance with estimated flow holds approximately") {
  const Scene scene(testing::translation_scene(4.0, 3.0, 66, 64, 64));
  const Frame a = scene.render_gs_at(-0.5), b = scene.render_gs_at(0.5);
  const Frame direct = reconstruct_rs_full(a, b, B2T);
  const Frame mirrored = flip_vertical(reconstruct_rs_full(flip_vertical(a), flip_vertical(b), T2B));
  CHECK(psnr(direct, mirrored, 8) >= 40.0);
}

TEST_CASE("oracle reconstruction through an intermediate frame") {
  const testing::DualScene d = testing::make_dual(testing::translation_scene(8.0, -4.0, 67, 97, 96));
  const int m = 40;
  const Frame gs = d.gs_at_row(1), gm = d.gs_at_row(m), ge = d.gs_at_row(97);
  for (ScanDirection dir : {T2B, B2T}) {
    const Frame exact = dir == T2B ? d.i_t2b : d.i_b2t;
    const Frame full = reconstruct_rs_full(gs, ge, dir);
    const Frame mid = reconstruct_rs_with_intermediate(gs, gm, ge, m, dir);
    CHECK(psnr(full, exact, 16) >= 35.0);
    CHECK(psnr(mid, exact, 16) >= 35.0);
    const int row_m = dir == T2B ? m - 1 : 97 - m;
    CHECK(testing::rows_equal(mid, row_m, gm, row_m));
    CHECK(testing::seam_continuous(mid, exact, m, dir == B2T));
  }
}

TEST_CASE("exact flows give near-perfect reconstruction") {
  const testing::DualScene d = testing::make_dual(testing::translation_scene(8.0, -4.0, 68, 65, 64));
  const double t1 = row_time(d.t2b, 1), th = row_time(d.t2b, 65);
  const PairFlows flows = exact_pair(d.scene, t1, th, 65, 64);
  const Frame out = reconstruct_rs_full(d.gs_at_row(1), d.gs_at_row(65), flows, T2B);
  CHECK(psnr(out, d.i_t2b, 12) >= 40.0);
}

TEST_CASE("a mis-scaled time map makes reconstruction worse") {
  const testing::DualScene d = testing::make_dual(testing::translation_scene(8.0, 3.0, 69, 65, 64));
  const Frame g1 = d.gs_at_row(1), gh = d.gs_at_row(65);
  const PairFlows flows = estimate_pair_flows(g1, gh);
  const double good = charbonnier(reconstruct_rs_full(g1, gh, flows, T2B), d.i_t2b, kCharbonnierEps, 8);
  const double bad = charbonnier(reconstruct_rs_full(g1, gh, flows, T2B, 2.0), d.i_t2b, kCharbonnierEps, 8);
  CHECK(bad > good);
}
