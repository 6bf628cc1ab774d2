#include <benchmark/benchmark.h>

#include "rscorrect/correction.hpp"
#include "rscorrect/correlation.hpp"
#include "rscorrect/flow.hpp"
#include "rscorrect/metrics.hpp"
#include "rscorrect/reconstruction.hpp"
#include "rscorrect/scene.hpp"

using namespace rscorrect;

namespace {

SceneSpec spec(int size) {
  SceneSpec s;
  s.seed = 7;
  s.motion = Translation{6.0, -3.0};
  s.height = size;
  s.width = size;
  return s;
}

ScanConfig scan(int size, ScanDirection d) {
  return ScanConfig{size, size, 1.0 / (size - 1), d, 0.0};
}

void BM_SceneBuild(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Scene(spec(n)));
}
BENCHMARK(BM_SceneBuild)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RenderRs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Scene scene(spec(n));
  const ScanConfig sc = scan(n, ScanDirection::TopToBottom);
  for (auto _ : state) benchmark::DoNotOptimize(scene.render_rs_exact(sc));
}
BENCHMARK(BM_RenderRs)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_EstimateFlow(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Scene scene(spec(n));
  const Frame a = scene.render_gs_at(0.0);
  const Frame b = scene.render_gs_at(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_flow(a, b));
}
BENCHMARK(BM_EstimateFlow)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Correlation(benchmark::State& state) {
  const Scene scene(spec(static_cast<int>(state.range(0))));
  const FeatureMap fa = extract_features(scene.render_gs_at(0.0));
  const FeatureMap fb = extract_features(scene.render_gs_at(1.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_bidirectional_correlation(fa, fb));
  }
}
BENCHMARK(BM_Correlation)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_CorrectWithMotion(benchmark::State& state) {
  const Scene scene(spec(256));
  const ScanConfig t2b = scan(256, ScanDirection::TopToBottom);
  const ScanConfig b2t = scan(256, ScanDirection::BottomToTop);
  const Frame i1 = scene.render_rs_exact(t2b), i2 = scene.render_rs_exact(b2t);
  CorrectionParams p;
  p.external_flow = DualFlow{scene.exact_flow(t2b, b2t), scene.exact_flow(b2t, t2b)};
  const auto motion = estimate_motion_map(i1, i2, p);
  for (auto _ : state) benchmark::DoNotOptimize(correct_with_motion(i1, i2, motion, 128, p));
}
BENCHMARK(BM_CorrectWithMotion)->Unit(benchmark::kMillisecond);

void BM_ReconstructFull(benchmark::State& state) {
  const Scene scene(spec(256));
  const Frame a = scene.render_gs_at(-0.5), b = scene.render_gs_at(0.5);
  const PairFlows flows = estimate_pair_flows(a, b);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reconstruct_rs_full(a, b, flows, ScanDirection::TopToBottom));
  }
}
BENCHMARK(BM_ReconstructFull)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const Scene scene(spec(256));
  const Frame a = scene.render_gs_at(0.0), b = scene.render_gs_at(0.25);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
