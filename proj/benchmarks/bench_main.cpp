#include "hartree/dynamics.hpp"
#include "hartree/lab.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace hartree;

namespace {

const Lab& lab() {
    static const Lab instance{LabConfig{}};
    return instance;
}

void BM_Convolve(benchmark::State& st) {
    const Vec W = lab().bubble().W_on(lab().grid());
    const Vec f = W.cwiseProduct(W);
    for (auto _ : st) benchmark::DoNotOptimize(lab().kernel().convolve(f));
}
BENCHMARK(BM_Convolve)->Unit(benchmark::kMicrosecond);

void BM_Laplacian(benchmark::State& st) {
    const Vec W = lab().bubble().W_on(lab().grid());
    for (auto _ : st) benchmark::DoNotOptimize(lab().lap().apply(W));
}
BENCHMARK(BM_Laplacian)->Unit(benchmark::kMicrosecond);

void BM_SplitStep(benchmark::State& st) {
    const SplitStepper stepper(lab(), 1e-3, int(st.range(0)), true);
    CVec u = lab().bubble().W_on(lab().grid()).cast<cplx>();
    for (auto _ : st) {
        stepper.step(u);
        benchmark::DoNotOptimize(u.data());
    }
}
BENCHMARK(BM_SplitStep)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Kernel(benchmark::State& st) {
    const RadialGrid g(7, 1e-4, 1e3, int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(RieszKernel(g).matrix().data());
}
BENCHMARK(BM_Kernel)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Eigen(benchmark::State& st) {
    const RadialGrid g(7, 1e-3, 1e2, 768);
    const RieszKernel k(g);
    const Laplacian lap(g);
    const AmplitudeFit fit = fit_amplitude(g, k, lap);
    const LinOps ops(g, k, lap, Bubble{7, fit.c0});
    for (auto _ : st) benchmark::DoNotOptimize(solve_eigen(ops).nu);
}
BENCHMARK(BM_Eigen)->Unit(benchmark::kMillisecond)->Iterations(1);

} // namespace

BENCHMARK_MAIN();
