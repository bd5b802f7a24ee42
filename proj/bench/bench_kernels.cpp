// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <vector>

#include "cleanspread/allowance_solver.hpp"
#include "cleanspread/mc_pricer.hpp"

using namespace cleanspread;

namespace {

struct StepFixture {
    ModelParams model;
    Grid4 grid;
    std::vector<double> next, out;

    StepFixture() : grid(Grid4::build(GridSpec{}, model)), next(grid.size()), out(grid.size()) {
        terminal_slice(grid, model.cap, next);
    }
};

StepFixture& step_fixture() {
    static StepFixture f;
    return f;
}

template <bool Reference>
void BM_imex_step(benchmark::State& state) {
    StepFixture& f = step_fixture();
    const int k = f.grid.n_t - 1;
    for (auto _ : state) {
        if constexpr (Reference) imex_step_reference(f.grid, f.model, true, k, f.next, f.out);
        else imex_step(f.grid, f.model, true, k, f.next, f.out);
        benchmark::DoNotOptimize(f.out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.grid.size()));
}

const AllowanceSurface& coarse_surface() {
    static const SolveResult r = [] {
        GridSpec spec;
        spec.n_d = 13;
        spec.n_c = spec.n_g = 10;
        spec.n_e = 20;
        spec.n_t = 183;
        return solve(ModelParams{}, spec);
    }();
    return r.surface;
}

template <bool Reference>
void BM_simulate(benchmark::State& state) {
    const ModelParams model;
    AllowanceModel am;
    am.surface = &coarse_surface();
    SimulationConfig cfg;
    cfg.n_paths = static_cast<int>(state.range(0));
    for (auto _ : state) {
        PathSet p = Reference ? simulate_reference(model, am, cfg) : simulate(model, am, cfg);
        benchmark::DoNotOptimize(p.price.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * cfg.n_steps);
}

}  // namespace

BENCHMARK(BM_imex_step<true>)->Name("imex_step/reference")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_imex_step<false>)->Name("imex_step/optimized")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate<true>)->Name("simulate/reference")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_simulate<false>)->Name("simulate/optimized")->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
