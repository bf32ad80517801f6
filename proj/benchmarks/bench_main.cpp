#include "npnslab/core/block_tridiagonal.hpp"
#include "npnslab/core/elliptic.hpp"
#include "npnslab/npns/npns.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace npnslab;
using namespace npnslab::core;

namespace {
constexpr double pi = std::numbers::pi;

ScalarField source(const ChannelGrid& g) {
    return ScalarField::from_function(g, [](double x, double y) { return std::sin(2 * pi * x) * std::sin(pi * y) + y; });
}
} // namespace

static void BM_PoissonSolve(benchmark::State& state) {
    const ChannelGrid g(state.range(0) > 1 ? 2 : 1, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const auto rhs = source(g);
    const auto bc = zero_trace(g);
    for (auto _ : state) benchmark::DoNotOptimize(solve_poisson(rhs, 1e-4, bc));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rhs.size()));
}
BENCHMARK(BM_PoissonSolve)->Args({1, 2048})->Args({32, 257})->Args({64, 513});

static void BM_NpnsStep(benchmark::State& state) {
    const int nx = static_cast<int>(state.range(0));
    const ChannelGrid g(nx > 1 ? 2 : 1, nx, static_cast<int>(state.range(1)));
    npns::NpnsConfig cfg;
    cfg.params.eps = 0.05;
    cfg.grid = g;
    cfg.bdata = BoundaryData::electroneutral(cfg.params, BoundaryTrace::constant(nx, 1.0, 1.5),
                                             BoundaryTrace::constant(nx, 0.0, 1.0));
    cfg.dt = 1e-4;
    cfg.t_end = 1.0;
    const auto c1 = ScalarField::from_function(g, [](double x, double y) {
        return 1.0 + 0.5 * y + 0.2 * std::sin(pi * y) * (1.0 + 0.3 * std::cos(2 * pi * x));
    });
    const npns::NpnsStepper stepper(cfg);
    const auto s0 = npns::well_prepared_init(c1, VelocityField(g), cfg);
    for (auto _ : state) benchmark::DoNotOptimize(stepper.step(s0));
}
BENCHMARK(BM_NpnsStep)->Args({1, 2048})->Args({16, 129})->Args({32, 257});

template <int B>
static void BM_BlockTridiagonal(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int bs = B == Eigen::Dynamic ? static_cast<int>(state.range(1)) : B;
    BlockTridiagonal<B> sys(n, bs);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < bs; ++i) {
            for (int j = 0; j < bs; ++j) sys.diag(k)(i, j) = i == j ? 4.0 + i : 0.1 / (1 + i + j);
            sys.rhs(k)(i) = std::sin(k + i);
        }
        if (k > 0) sys.lower(k).setIdentity();
        if (k + 1 < n) sys.upper(k).setIdentity();
    }
    for (auto _ : state) benchmark::DoNotOptimize(sys.solve());
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BlockTridiagonal<2>)->Args({2048, 2});
BENCHMARK(BM_BlockTridiagonal<3>)->Args({2048, 3});
BENCHMARK(BM_BlockTridiagonal<Eigen::Dynamic>)->Args({1024, 6});
BENCHMARK_MAIN();
