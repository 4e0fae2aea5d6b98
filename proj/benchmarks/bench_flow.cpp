#include <benchmark/benchmark.h>

#include "caflow/analysis.hpp"
#include "caflow/flow.hpp"
#include "caflow/gradient.hpp"
#include "caflow/synth.hpp"

using namespace caflow;

namespace {

MovieStack wave_movie(int size, int frames) {
  SynthSpec spec;
  spec.kind = SynthKind::radial_wave;
  spec.width = size;
  spec.height = size;
  spec.frame_count = frames;
  spec.background = 10.0;
  spec.wave_ox = size / 2.0;
  spec.wave_oy = size / 2.0;
  spec.wave_speed = 0.9;
  spec.wave_width = 2.5;
  spec.wave_amplitude = 1000.0;
  spec.noise_sigma = 1.0;
  spec.seed = 7;
  return generate(spec);
}

void bm_gradients(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const MovieStack movie = wave_movie(size, 2);
  for (auto _ : state) {
    GradientTriplet g = gradients_for_pair(movie, 0);
    benchmark::DoNotOptimize(g.ix.pixels().data());
  }
  state.SetItemsProcessed(state.iterations() * (size - 1) * (size - 1));
}
BENCHMARK(bm_gradients)->Arg(128)->Arg(256)->Arg(512);

void bm_flow_window(benchmark::State& state) {
  const MovieStack movie = wave_movie(128, 2);
  FlowParams params;
  params.window_width = static_cast<int>(state.range(0));
  for (auto _ : state) {
    FlowSequence seq = compute_flow_field(movie, params, 1);
    benchmark::DoNotOptimize(seq.fields.front().u.pixels().data());
  }
  const int valid = 127 - (params.window_width - 1);
  state.SetItemsProcessed(state.iterations() * valid * valid);
}
BENCHMARK(bm_flow_window)->Arg(5)->Arg(9)->Arg(11)->Arg(15);

void bm_flow_jobs(benchmark::State& state) {
  const MovieStack movie = wave_movie(256, 3);
  FlowParams params;
  params.window_width = 9;
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    FlowSequence seq = compute_flow_field(movie, params, jobs);
    benchmark::DoNotOptimize(seq.fields.front().u.pixels().data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * 247 * 247);
}
BENCHMARK(bm_flow_jobs)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

void bm_match(benchmark::State& state) {
  const MovieStack movie = wave_movie(96, 12);
  FlowParams params;
  params.window_width = 9;
  const FlowSequence seq = compute_flow_field(movie, params, 1);
  const FlowField kernel = divergence_kernel(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    MatchMap m = clifford_match(seq.fields[9], kernel, 0.5);
    benchmark::DoNotOptimize(m.response.pixels().data());
  }
}
BENCHMARK(bm_match)->Arg(9)->Arg(21);

void bm_histogram(benchmark::State& state) {
  const MovieStack movie = wave_movie(96, 12);
  FlowParams params;
  params.window_width = 9;
  const FlowSequence seq = compute_flow_field(movie, params, 1);
  std::vector<double> edges;
  for (double e = 0.0; e <= 15.0; e += 0.5) edges.push_back(e);
  const RegionOfInterest roi{0, 0, seq.width(), seq.height()};
  for (auto _ : state) {
    SpeedHistogram h = roi_speed_histogram(seq, roi, 0.5, edges);
    benchmark::DoNotOptimize(h.total);
  }
}
BENCHMARK(bm_histogram);

}  // namespace

BENCHMARK_MAIN();
