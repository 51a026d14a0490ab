#include <benchmark/benchmark.h>

#include "mflab/fluctuation.hpp"
#include "mflab/hartree.hpp"
#include "mflab/manybody.hpp"

namespace {

mflab::MeanFieldSetup desk_setup() {
  mflab::MeanFieldSetup s;
  s.phi0 = mflab::CVector(2);
  s.phi0 << 0.8, 0.6;
  s.alpha = 0.25;
  return s;
}

void BM_StrangStep(benchmark::State& state) {
  auto g = mflab::make_grid(1, static_cast<int>(state.range(0)), 6.283185307179586);
  mflab::StrangStepper stepper(mflab::build_kernel(g, 0.125), 1e-3);
  auto modes = mflab::lowest_modes(g, 3);
  mflab::CVector c = mflab::CVector::Ones(3) / std::sqrt(3.0);
  mflab::Field phi = modes.synthesize(c);
  for (auto _ : state) {
    phi = stepper.step(phi);
    benchmark::DoNotOptimize(phi.values.data());
  }
}
BENCHMARK(BM_StrangStep)->Arg(64)->Arg(256)->Arg(1024);

void BM_InteractionTensor(benchmark::State& state) {
  auto g = mflab::make_grid(1, 64, 6.283185307179586);
  auto k = mflab::build_kernel(g, 0.125);
  auto modes = mflab::lowest_modes(g, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mflab::interaction_tensor(k, modes));
}
BENCHMARK(BM_InteractionTensor)->Arg(2)->Arg(3)->Arg(4);

void BM_MeanFieldCell(benchmark::State& state) {
  auto setup = desk_setup();
  auto model = mflab::build_model(setup);
  int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mflab::mean_field_run(N, 0.5, model, setup).trace_distance);
}
BENCHMARK(BM_MeanFieldCell)->Arg(8)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_GeneratorAssembly(benchmark::State& state) {
  auto setup = desk_setup();
  auto model = mflab::build_model(setup);
  int N = static_cast<int>(state.range(0));
  auto basis = std::make_shared<const mflab::FockBasis>(2, 4 * N);
  mflab::GeneratorFactory fac(basis, model.tensor, model.modes.eps, N);
  for (auto _ : state) benchmark::DoNotOptimize(fac.at(model.phi0).full());
}
BENCHMARK(BM_GeneratorAssembly)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_FluctuationPropagation(benchmark::State& state) {
  auto setup = desk_setup();
  auto model = mflab::build_model(setup);
  mflab::FluctuationModel fm(model.tensor, model.modes.eps, model.phi0, 8, 32, 0.5);
  for (auto _ : state) {
    auto w = fm.propagate({}, fm.vacuum(), 0.0, 0.5);
    benchmark::DoNotOptimize(w.amp.data());
  }
}
BENCHMARK(BM_FluctuationPropagation)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
