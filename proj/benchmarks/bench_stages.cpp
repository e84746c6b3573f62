#include <benchmark/benchmark.h>

#include <random>

#include "dehaze/color_line.hpp"
#include "dehaze/dark_channel.hpp"
#include "dehaze/pipeline.hpp"
#include "dehaze/regularization.hpp"
#include "dehaze/synthesis.hpp"

using namespace dehaze;

namespace {

Image scene_image(int size)
{
    SceneDescription d;
    d.width = size;
    d.height = size;
    d.sky = true;
    return synthesize_haze(build_scene(d));
}

}  // namespace

static void BM_DarkChannel(benchmark::State& state)
{
    const Image img = scene_image(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dark_channel(img, 15));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(img.pixel_count()));
}
BENCHMARK(BM_DarkChannel)->Arg(128)->Arg(512);

static void BM_ColorLineFits(benchmark::State& state)
{
    const Image img = scene_image(128);
    const auto patches = iterate_patches(img, 7, 7);
    const ClassifierParams params;
    for (auto _ : state) {
        int ok = 0;
        for (const PatchRef& p : patches) {
            ok += fit_and_validate(p, img, params, 0).ok();
        }
        benchmark::DoNotOptimize(ok);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(patches.size()));
}
BENCHMARK(BM_ColorLineFits);

static void BM_FeatureIndexQuery(benchmark::State& state)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<IndexedPoint> pts;
    for (int i = 0; i < state.range(0); ++i) {
        pts.push_back({{{u(rng), u(rng), u(rng), 0.1 * u(rng), 0.1 * u(rng)}}, u(rng)});
    }
    const FeatureIndex index(pts);
    std::vector<FeatureVector> queries;
    for (int i = 0; i < 4096; ++i) {
        queries.push_back({{u(rng), u(rng), u(rng), 0.1 * u(rng), 0.1 * u(rng)}});
    }
    for (auto _ : state) {
        double s = 0.0;
        for (const auto& q : queries) {
            s += index.nearest(q).payload;
        }
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(queries.size()));
}
BENCHMARK(BM_FeatureIndexQuery)->Arg(200)->Arg(5000);

static void BM_InterpolationSolve(benchmark::State& state)
{
    const int size = static_cast<int>(state.range(0));
    const Image img = scene_image(size);
    AirlightEstimates est{ScalarMap(size, size), ScalarMap(size, size, 0.01),
                          std::vector<std::uint8_t>(img.pixel_count(), 0)};
    for (std::size_t i = 0; i < img.pixel_count(); i += 7) {
        est.valid[i] = 1;
        est.value[i] = 0.5;
    }
    const InterpolationSystem sys = assemble_interpolation_system(est, img);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_airlight_field(sys));
    }
}
BENCHMARK(BM_InterpolationSolve)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_FullPipeline(benchmark::State& state)
{
    const Image img = scene_image(128);
    const PipelineConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_pipeline(img, cfg));
    }
}
BENCHMARK(BM_FullPipeline)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
