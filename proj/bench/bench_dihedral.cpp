// Serial reference against the OpenMP path for the three parallel hot spots.
// Thread count follows OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include <map>

#include "dihedral/localform.hpp"
#include "dihedral/matching.hpp"
#include "dihedral/presets.hpp"
#include "dihedral/sim.hpp"

using namespace dihedral;

namespace {

const PreparedRun& kgs_run(int n) {
    static std::map<int, PreparedRun> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        PresetOverrides ov;
        ov.n_grid = n;
        it = cache.emplace(n, prepare_preset("kgs:hexagon", ov)).first;
    }
    return it->second;
}

void sim_steps(benchmark::State& state, bool parallel) {
    const int n = static_cast<int>(state.range(0));
    const PreparedRun& r = kgs_run(n);
    Integrator it(r.model, initial_field(r), r.cfg.dt, r.cfg.mu, parallel);
    for (auto _ : state) benchmark::DoNotOptimize(it.step());
    state.SetItemsProcessed(state.iterations() * n * n);
}

void p4map(benchmark::State& state, bool parallel) {
    const int cells = static_cast<int>(state.range(0));
    const ModelSpec kgs = builtin_model("kgs");
    for (auto _ : state) {
        const SignMap m = p4_sign_map(kgs, {"delta_v", 0.5, 20.0, cells}, {"m", 0.1, 2.0, cells}, {}, parallel);
        benchmark::DoNotOptimize(m.cells.data());
    }
    state.SetItemsProcessed(state.iterations() * cells * cells);
}

void multistart_run(benchmark::State& state, bool parallel) {
    MultistartOptions opt;
    opt.trials = static_cast<int>(state.range(0));
    opt.parallel = parallel;
    for (auto _ : state) benchmark::DoNotOptimize(multistart(PatternKind::spotA, 4, 5, opt).size());
    state.SetItemsProcessed(state.iterations() * opt.trials);
}

}  // namespace

BENCHMARK_CAPTURE(sim_steps, serial, false)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sim_steps, omp, true)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(p4map, serial, false)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(p4map, omp, true)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(multistart_run, serial, false)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(multistart_run, omp, true)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
