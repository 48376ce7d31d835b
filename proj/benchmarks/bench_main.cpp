#include <benchmark/benchmark.h>

#include "bubblepair/chaos.hpp"
#include "bubblepair/integrator.hpp"
#include "bubblepair/model.hpp"

using namespace bubblepair;

namespace {

Model hyperchaotic_point() {
    PhysicalParams p;
    p.p_ac = 1.52e6;
    p.eps = 1.024;
    p.set_d_ratio(17.5);
    return Model(p);
}

const State kState{1.09, -0.47, 0.77, 0.49, 0.3};

void BM_VectorField(benchmark::State& st) {
    const Model m = hyperchaotic_point();
    for (auto _ : st) benchmark::DoNotOptimize(m.vector_field(kState));
}
BENCHMARK(BM_VectorField);

void BM_Jacobian(benchmark::State& st) {
    const Model m = hyperchaotic_point();
    for (auto _ : st) benchmark::DoNotOptimize(m.jacobian(kState));
}
BENCHMARK(BM_Jacobian);

void BM_Step(benchmark::State& st) {
    const Model m = hyperchaotic_point();
    const IntegratorConfig cfg;
    const double h = 0.01 * m.scales().period();
    for (auto _ : st) benchmark::DoNotOptimize(step(m, kState, h, cfg));
}
BENCHMARK(BM_Step);

void BM_DrivePeriod(benchmark::State& st) {
    const Model m = hyperchaotic_point();
    Trajectory t(m, kState, IntegratorConfig{});
    for (auto _ : st) t.advance_periods(1);
    st.counters["steps/period"] = benchmark::Counter(double(t.accepted_steps()), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_DrivePeriod)->Unit(benchmark::kMicrosecond);

void BM_TangentPeriod(benchmark::State& st) {
    const Model m = hyperchaotic_point();
    const double T = m.scales().period();
    TangentFlow flow(m, TangentBundle::identity(kState), IntegratorConfig{});
    for (auto _ : st) flow.advance(T, T);
}
BENCHMARK(BM_TangentPeriod)->Unit(benchmark::kMillisecond);

void BM_Analyze(benchmark::State& st) {
    const Model m = hyperchaotic_point();
    AnalysisConfig a;
    a.run.transient_periods = 50;
    a.run.measure_periods = 100;
    a.max_extensions = 0;
    for (auto _ : st) benchmark::DoNotOptimize(analyze(kState, m, IntegratorConfig{}, a));
}
BENCHMARK(BM_Analyze)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
