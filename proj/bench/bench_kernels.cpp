// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <random>

#include "ecrom/cases.hpp"
#include "ecrom/kernels.hpp"
#include "ecrom/pod.hpp"
#include "ecrom/rom.hpp"

namespace {

using namespace ecrom;

const CaseSetup& shear_case(int n) {
    static std::map<int, CaseSetup> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, case_shear_layer(n, n)).first;
    return it->second;
}

Vector random_vector(Index n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}

template <bool Parallel>
void BM_spmv(benchmark::State& state) {
    const FomOperators& ops = *shear_case(int(state.range(0))).ops;
    const Vector x = random_vector(ops.D.cols(), 1);
    Vector y(ops.D.rows());
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::spmv(ops.D, x.data(), y.data());
        else kernels::serial::spmv(ops.D, x.data(), y.data());
        benchmark::DoNotOptimize(y.data());
    }
}

template <bool Parallel>
void BM_convection(benchmark::State& state) {
    const FomOperators& ops = *shear_case(int(state.range(0))).ops;
    const Vector v = random_vector(ops.num_velocity(), 2);
    Vector out;
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::convection(ops, v, v, out);
        else kernels::serial::convection(ops, v, v, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_quadratic(benchmark::State& state) {
    const Index M = state.range(0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    kernels::RowMatrix F2(M, M * M);
    for (Index k = 0; k < F2.size(); ++k) F2.data()[k] = u(rng);
    const Vector a = random_vector(M, 4);
    Vector out;
    for (auto _ : state) {
        if constexpr (Parallel) kernels::parallel::quadratic(F2, a, out);
        else kernels::serial::quadratic(F2, a, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_precompute(benchmark::State& state) {
    const CaseSetup& cs = shear_case(64);
    const FomOperators& ops = *cs.ops;
    const Index M = state.range(0);
    Matrix X(ops.num_velocity(), M + 4);
    for (Index k = 0; k < X.cols(); ++k) X.col(k) = random_vector(ops.num_velocity(), 10 + unsigned(k));
    RomBasis b;
    b.Phi = weighted_pod(X, ops.omega, M).Phi;
    PrecomputeOptions opt;
    opt.with_pressure = false;
    opt.parallel = Parallel;
    const Vector V_bc = Vector::Zero(ops.num_velocity());
    for (auto _ : state) {
        RomOperators r = precompute_rom_operators(ops, b, V_bc, 0.0, opt);
        benchmark::DoNotOptimize(r.F2.data());
    }
}

}  // namespace

BENCHMARK(BM_spmv<false>)->Arg(64)->Arg(200);
BENCHMARK(BM_spmv<true>)->Arg(64)->Arg(200);
BENCHMARK(BM_convection<false>)->Arg(64)->Arg(200);
BENCHMARK(BM_convection<true>)->Arg(64)->Arg(200);
BENCHMARK(BM_quadratic<false>)->Arg(16)->Arg(40)->Arg(80);
BENCHMARK(BM_quadratic<true>)->Arg(16)->Arg(40)->Arg(80);
BENCHMARK(BM_precompute<false>)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_precompute<true>)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
