#include <benchmark/benchmark.h>

#include <random>

#include "uscut/growcut.hpp"
#include "uscut/maxflow.hpp"
#include "uscut/metrics.hpp"
#include "uscut/phantom.hpp"
#include "uscut/radial_graph.hpp"
#include "uscut/segmenter.hpp"

using namespace uscut;

namespace {

Phantom make_phantom(int size, double radius) {
    PhantomSpec s;
    s.size = size;
    s.radius_x = s.radius_y = radius;
    s.speckle_sigma = 0.08;
    s.rng_seed = 1;
    return generate_phantom(s);
}

} // namespace

static void BM_SegmentDefaults512(benchmark::State& state) {
    const auto ph = make_phantom(512, 60);
    for (auto _ : state) {
        benchmark::DoNotOptimize(segment(ph.image, {256, 256}, TemplateParams{}));
    }
}
BENCHMARK(BM_SegmentDefaults512)->Unit(benchmark::kMillisecond);

// Template size sweep: rays x nodes.
static void BM_SegmentTemplate(benchmark::State& state) {
    const auto ph = make_phantom(512, 60);
    TemplateParams p;
    p.rays = static_cast<int>(state.range(0));
    p.nodes_per_ray = static_cast<int>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(segment(ph.image, {256, 256}, p));
    }
    state.counters["nodes"] = p.rays * p.nodes_per_ray;
}
BENCHMARK(BM_SegmentTemplate)->Args({30, 20})->Args({60, 40})->Args({120, 80})->Args({240, 120})->Unit(benchmark::kMillisecond);

static void BM_MaxflowRadialNetwork(benchmark::State& state) {
    const auto ph = make_phantom(512, 60);
    const auto grid = sample_ray_nodes(ph.image, {256, 256}, TemplateParams{});
    const auto net = build_flow_network(grid, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(max_flow_min_cut(net));
    }
}
BENCHMARK(BM_MaxflowRadialNetwork)->Unit(benchmark::kMicrosecond);

static void BM_GrowCut(benchmark::State& state) {
    const auto ph = make_phantom(static_cast<int>(state.range(0)), state.range(0) / 8.0);
    const int c = static_cast<int>(state.range(0)) / 2;
    const std::vector<PixelCoord> fg{{c, c}};
    const std::vector<PixelCoord> bg{{2, 2}, {2 * c - 3, 2 * c - 3}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(grow_cut(ph.image, fg, bg));
    }
}
BENCHMARK(BM_GrowCut)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_Hausdorff(benchmark::State& state) {
    const auto ph = make_phantom(512, 60);
    const auto res = segment(ph.image, {256, 256}, TemplateParams{});
    for (auto _ : state) {
        benchmark::DoNotOptimize(hausdorff(res.mask, ph.ground_truth));
    }
}
BENCHMARK(BM_Hausdorff)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
