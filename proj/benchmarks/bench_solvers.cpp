// Microbenchmarks for the hot kernels: Cholesky, the integer quadratic
// search, the LP-based follower, and the two end-to-end solvers on one
// generated instance per matrix kind.

#include <benchmark/benchmark.h>

#include "bilevel/exact.hpp"
#include "bilevel/foresight.hpp"
#include "bilevel/instances.hpp"
#include "bilevel/oracles.hpp"

using namespace bilevel;

namespace {

QuadBilevelInstance make_instance(QKind kind, std::size_t n_y) {
    GenConfig cfg;
    cfg.seed = 777;
    cfg.n_y = n_y;
    cfg.q_kind = kind;
    cfg.sense = Sense::pessimistic;
    return gen_quad(cfg);
}

void bm_cholesky(benchmark::State& state) {
    const auto inst = make_instance(QKind::bounded_eigenvalues, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(linalg::cholesky(inst.Q_y));
}
BENCHMARK(bm_cholesky)->Arg(10)->Arg(20);

void bm_minimize_iqp(benchmark::State& state) {
    const auto inst = make_instance(QKind::cholesky_based, state.range(0));
    Vector c = inst.d_y;
    for (auto _ : state) benchmark::DoNotOptimize(minimize_iqp(inst.Q_y, c));
}
BENCHMARK(bm_minimize_iqp)->Arg(10)->Arg(20);

void bm_simplex(benchmark::State& state) {
    const std::size_t n = state.range(0);
    Matrix d(n, n);
    Vector rhs(n), obj(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) d(i, j) = 1.0;
        rhs[i] = static_cast<double>(i + 1);
    }
    const VarBounds bounds{Vector(n, 0.0), Vector(n, 50.0)};
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_lp(obj, OptDirection::maximize, d, rhs, bounds));
}
BENCHMARK(bm_simplex)->Arg(8)->Arg(16);

void bm_relaxed_foresight(benchmark::State& state) {
    const auto inst = make_instance(static_cast<QKind>(state.range(0)), 20);
    for (auto _ : state) benchmark::DoNotOptimize(relaxed_foresight_quad(inst));
}
BENCHMARK(bm_relaxed_foresight)->Arg(0)->Arg(1)->Arg(2);

void bm_exact(benchmark::State& state) {
    const auto inst = make_instance(static_cast<QKind>(state.range(0)), 20);
    for (auto _ : state) benchmark::DoNotOptimize(solve_exact_quad(inst, {}));
}
BENCHMARK(bm_exact)->Arg(0)->Arg(1)->Arg(2);

}  // namespace

BENCHMARK_MAIN();
