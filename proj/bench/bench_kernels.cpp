#include "chairsearch/engine.hpp"
#include "chairsearch/index.hpp"
#include "chairsearch/render.hpp"
#include "chairsearch/sim.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

using namespace chairsearch;

namespace {

const Engine& engine() {
    static const auto e = Engine::reference();
    return *e;
}

std::vector<float> random_query(std::size_t dims, unsigned seed) {
    std::mt19937 g(seed);
    std::uniform_real_distribution<float> u(0, 1);
    std::vector<float> q(dims);
    for (auto& x : q) x = u(g);
    return q;
}

const DescriptorTable& table(int which) {
    return which == 0 ? engine().index().semantic() : engine().index().visual();
}

void BM_KnnParallel(benchmark::State& state) {
    const auto& t = table(static_cast<int>(state.range(0)));
    const auto q = random_query(t.dims(), 7);
    for (auto _ : state) benchmark::DoNotOptimize(knn_scan(t, q));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}

void BM_KnnSerial(benchmark::State& state) {
    const auto& t = table(static_cast<int>(state.range(0)));
    const auto q = random_query(t.dims(), 7);
    for (auto _ : state) benchmark::DoNotOptimize(knn_scan_serial(t, q));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
}

// A chair with its oracle silhouette strokes drawn over it.
struct SketchScene {
    Sketch sketch;
    Scene scene;
    SketchScene() {
        static const auto library = SilhouetteLibrary::build(engine().manifest());
        const auto& inst = engine().manifest().instances()[4321];
        for (const auto& s : library.strokes(inst.shape_id))
            sketch.strokes.push_back(Stroke{s.points, *inst.assignment[s.part], s.width});
        scene = Scene{&sketch, ModelRef{&engine().shape_of(inst.chair_id), inst.assignment}};
    }
};

void BM_ViewsParallel(benchmark::State& state) {
    static const SketchScene s;
    for (auto _ : state) benchmark::DoNotOptimize(snapshot_views(s.scene));
}

void BM_ViewsSerial(benchmark::State& state) {
    static const SketchScene s;
    for (auto _ : state) benchmark::DoNotOptimize(snapshot_views_serial(s.scene));
}

void BM_IndexBuild(benchmark::State& state) {
    const auto small = Engine::reference(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(RetrievalIndex::build(small->manifest()));
}

void BM_IndexBuildSerial(benchmark::State& state) {
    const auto small = Engine::reference(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(RetrievalIndex::build_serial(small->manifest()));
}

} // namespace

// 0 = semantic table, 1 = visual table
BENCHMARK(BM_KnnParallel)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KnnSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ViewsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ViewsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndexBuild)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndexBuildSerial)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    benchmark::AddCustomContext("omp_threads", std::to_string(omp_get_max_threads()));
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
}
