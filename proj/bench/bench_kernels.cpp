// Serial reference vs OpenMP for each data-parallel kernel on the 118-bus case.
// Thread count comes from OMP_NUM_THREADS.

#include <random>

#include <benchmark/benchmark.h>

#include "pmu/kernels.hpp"
#include "pmu/power_flow.hpp"
#include "pmu/resistance_distance.hpp"

using namespace pmu;
using kernels::Execution;

namespace {

struct Fixture {
    PowerCase pc;
    ComplexMatrix y;
    OperatingPoint op;
    RealMatrix e;

    Fixture() {
        pc = load_case(std::string(PMU_DATA_DIR) + "/ieee118cdf.txt");
        y = build_ybus(pc);
        op = solve_power_flow(pc);
        e = resistance_matrix(p_theta_jacobian(pc, op), pc.slack_index()).e;
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_JacobiReal(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::jacobi_orthogonalize(f.e, {}, mode(state)));
}

void BM_JacobiComplex(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::jacobi_orthogonalize(f.y, {}, mode(state)));
}

void BM_TriangleAudit(benchmark::State& state) {
    const auto& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::triangle_violations(f.e, 1e-9, 100, mode(state)));
}

void BM_PThetaJacobian(benchmark::State& state) {
    const auto& f = fixture();
    const ComplexVector v = f.op.phasors();
    for (auto _ : state) benchmark::DoNotOptimize(kernels::p_theta_jacobian(f.y, v, mode(state)));
}

void BM_ExhaustiveCover(benchmark::State& state) {
    BinaryAdjacency adj(24, AdjacencyKind::Topological);
    for (int i = 0; i < 24; ++i) adj.connect(i, (i + 1) % 24);
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> bus(0, 23);
    for (int k = 0; k < 4; ++k) {
        int a = bus(rng);
        int b = bus(rng);
        if (a != b) adj.connect(a, b);
    }
    for (auto _ : state) {
        for (int k = 1; k <= 24; ++k) {
            auto cover = kernels::first_cover_of_size(adj, k, mode(state));
            if (cover) {
                benchmark::DoNotOptimize(cover);
                break;
            }
        }
    }
}

}  // namespace

BENCHMARK(BM_JacobiReal)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JacobiComplex)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TriangleAudit)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PThetaJacobian)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ExhaustiveCover)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
