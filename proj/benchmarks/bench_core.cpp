#include <benchmark/benchmark.h>

#include <numbers>

#include <truncld/limits.hpp>
#include <truncld/ratefn.hpp>
#include <truncld/sampler.hpp>
#include <truncld/tilted.hpp>

using namespace truncld;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

void BM_AddRow1D(benchmark::State& state) {
    const Sampler sampler(TailShape(1.5, SpectralMeasure::symmetric_pair(v1(1.0))));
    Stream rng(1);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        double s = 0.0;
        sampler.add_row(rng, n, 1000.0, &s);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AddRow1D)->Arg(1000)->Arg(100000);

void BM_AddRowIsotropic3D(benchmark::State& state) {
    const Sampler sampler(TailShape(1.5, SpectralMeasure::isotropic(3)), LightTailLaw::exponential(1.0));
    Stream rng(1);
    for (auto _ : state) {
        double s[3] = {0.0, 0.0, 0.0};
        sampler.add_row(rng, 1000, 100.0, s);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_AddRowIsotropic3D);

void BM_TiltedDraw(benchmark::State& state) {
    const TiltedSummand t(TailShape(0.5, SpectralMeasure::point(v1(1.0))), 25.0, 0.05);
    Stream rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(t.draw(rng));
}
BENCHMARK(BM_TiltedDraw);

void BM_LambdaValue(benchmark::State& state) {
    const auto rf = RateFunction::for_model(PowerLawModel(1.5, SpectralMeasure::symmetric_pair(v1(1.0))));
    double l = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rf.value(v1(l)));
        l = l < 3.0 ? l + 0.01 : 0.3;
    }
}
BENCHMARK(BM_LambdaValue);

void BM_LambdaIsotropic2D(benchmark::State& state) {
    const auto rf = RateFunction::for_model(PowerLawModel(0.7, SpectralMeasure::isotropic(2)));
    Vector l(2);
    l << 0.8, -0.4;
    for (auto _ : state) {
        Vector g;
        Matrix h;
        double v = 0.0;
        rf.evaluate(l, &v, &g, &h);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_LambdaIsotropic2D);

void BM_Legendre(benchmark::State& state) {
    const auto rf = RateFunction::for_model(PowerLawModel(0.5, SpectralMeasure::point(v1(1.0))));
    for (auto _ : state) benchmark::DoNotOptimize(legendre(rf, v1(3.0)).value);
}
BENCHMARK(BM_Legendre);

void BM_Nu2Exact(benchmark::State& state) {
    const NuK nk(TailShape(1.0, SpectralMeasure::symmetric_pair(v1(1.0))), 2);
    const auto reg = RadialCapRegion::full(1, 1.5);
    for (auto _ : state) benchmark::DoNotOptimize(nu_k_eval(nk, reg).value);
}
BENCHMARK(BM_Nu2Exact);

void BM_Nu3Exact(benchmark::State& state) {
    const NuK nk(TailShape(1.0, SpectralMeasure::symmetric_pair(v1(1.0))), 3);
    const auto reg = RadialCapRegion::full(1, 2.2);
    for (auto _ : state) benchmark::DoNotOptimize(nu_k_eval(nk, reg).value);
}
BENCHMARK(BM_Nu3Exact)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
