#include <benchmark/benchmark.h>

#include "qhop/connection.hpp"
#include "qhop/dft.hpp"
#include "qhop/field.hpp"
#include "qhop/scalar.hpp"
#include "qhop/spinor.hpp"

namespace {

using qhop::cdouble;

const qhop::LatticeSpec lat32 = qhop::LatticeSpec::cube(3, 32);
const qhop::LatticeSpec lat16 = qhop::LatticeSpec::cube(3, 16);

void BM_dft_forward(benchmark::State& state) {
    const auto f = qhop::make_packet(lat32, qhop::PacketProfile::gaussian(0.3), {0.5, 0.3, 0.1});
    for (auto _ : state) benchmark::DoNotOptimize(qhop::dft_forward(f));
}
BENCHMARK(BM_dft_forward);

void BM_scalar_spectral_step(benchmark::State& state) {
    const qhop::ScalarHopping model{lat32, cdouble(0, -3), cdouble(0, 0.5)};
    const auto f = qhop::make_packet(lat32, qhop::PacketProfile::gaussian(0.3), {0.5, 0.3, 0.1});
    for (auto _ : state) benchmark::DoNotOptimize(qhop::propagate_spectral(f, model, 0.01));
}
BENCHMARK(BM_scalar_spectral_step);

void BM_scalar_stencil_step(benchmark::State& state) {
    const qhop::ScalarHopping model{lat32, cdouble(0, -3), cdouble(0, 0.5)};
    const auto f = qhop::make_packet(lat32, qhop::PacketProfile::gaussian(0.3), {0.5, 0.3, 0.1});
    const int threads = int(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(qhop::propagate_stencil(f, model, 0.01, 1, threads));
}
BENCHMARK(BM_scalar_stencil_step)->Arg(1)->Arg(4);

void BM_spinor_stencil_step(benchmark::State& state) {
    const qhop::SpinorHopping model{lat16, cdouble(0, 0.4), cdouble(0, -0.1), cdouble(0.6, 0)};
    const auto f =
        qhop::make_spinor_packet(lat16, qhop::PacketProfile::gaussian(0.3), {0.5, 0.3, 0.1});
    const int threads = int(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(qhop::propagate_stencil_spinor(f, model, 0.01, 1, threads));
}
BENCHMARK(BM_spinor_stencil_step)->Arg(1)->Arg(4);

void BM_metric_affine_step(benchmark::State& state) {
    const qhop::SpinorHopping model{lat16, cdouble(0, 2.5), 0, cdouble(2.5, 0)};
    const auto gamma = qhop::make_fourier_connection(lat16, 5, 1, 0.5);
    const auto f =
        qhop::make_spinor_packet(lat16, qhop::PacketProfile::gaussian(0.3), {0.5, 0.3, 0.1});
    for (auto _ : state)
        benchmark::DoNotOptimize(qhop::evolve_metric_affine(f, model, gamma, 0.01, 1));
}
BENCHMARK(BM_metric_affine_step);

void BM_connection_solve(benchmark::State& state) {
    std::array<qhop::Mat2, 4> gamma;
    for (int a = 0; a < 4; ++a)
        gamma[size_t(a)] = 0.3 * qhop::sigma(1) + cdouble(0, 0.2) * qhop::sigma(a);
    for (auto _ : state) benchmark::DoNotOptimize(qhop::solve_affine_connection(gamma));
}
BENCHMARK(BM_connection_solve);

void BM_classify_spinor(benchmark::State& state) {
    const qhop::SpinorHopping model{lat32, 0, 0, cdouble(1, 0.1)};
    for (auto _ : state) benchmark::DoNotOptimize(qhop::classify_spinor(model));
}
BENCHMARK(BM_classify_spinor);

}  // namespace

BENCHMARK_MAIN();
