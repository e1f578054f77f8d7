#include <benchmark/benchmark.h>

#include "filtfit/certificates.hpp"
#include "filtfit/estimators.hpp"
#include "filtfit/scenarios.hpp"

using namespace filtfit;

namespace {

ComplexSignal make_observation(long n) {
  Rng rng(42);
  const ComplexSignal x = generate_ransin(4, n, rng);
  return add_noise(x, 1.0 / (8.0 * std::sqrt(static_cast<double>(n))), rng);
}

SpectralVector random_spectral(std::size_t complex_dim, std::uint64_t seed) {
  Rng rng(seed);
  SpectralVector u(complex_dim);
  for (std::size_t i = 0; i < u.dim(); ++i) u[i] = 2.0 * rng.uniform() - 1.0;
  return u;
}

void OperatorApply(benchmark::State& state) {
  const long n = state.range(0);
  const auto op = ConvolutionOperator::build(make_observation(n));
  const SpectralVector u = random_spectral(static_cast<std::size_t>(n + 1), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.apply(u));
  }
  state.SetComplexityN(n);
}
BENCHMARK(OperatorApply)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oNLogN);

void OperatorApplyOracleChain(benchmark::State& state) {
  const long n = state.range(0);
  const ComplexSignal y = make_observation(n);
  const SpectralVector u = random_spectral(static_cast<std::size_t>(n + 1), 7);
  for (auto _ : state) {
    const ComplexVector phi = idft(vec_adjoint(u));
    benchmark::DoNotOptimize(vec(dft(convolve_oracle(ComplexSignal::causal(phi), y, n))));
  }
  state.SetComplexityN(n);
}
BENCHMARK(OperatorApplyOracleChain)->RangeMultiplier(4)->Range(16, 256)->Complexity(benchmark::oNSquared);

void ProxPenQ1(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  const auto setup = ProximalSetup::complex_l1(m);
  Rng rng(3);
  ComplexVector z(m);
  for (auto& c : z) c = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(prox_pen_q1(setup, z, 0.1));
  }
  state.SetComplexityN(static_cast<int64_t>(m));
}
BENCHMARK(ProxPenQ1)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void ProjectL1Ball(benchmark::State& state) {
  const std::size_t m = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  ComplexVector z(m);
  for (auto& c : z) c = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_l1_ball_complex(z, 1.0));
  }
  state.SetComplexityN(static_cast<int64_t>(m));
}
BENCHMARK(ProjectL1Ball)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oNLogN);

void CmpIteration(benchmark::State& state) {
  const long n = state.range(0);
  const ComplexSignal y = make_observation(n);
  auto op = std::make_shared<const ConvolutionOperator>(ConvolutionOperator::build(y));
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::ConUF;
  cfg.r_bar = 8.0;
  const SaddleProblem problem = make_saddle_problem(op, cfg);
  for (auto _ : state) {
    SolveOptions opt;
    opt.max_iter = 10;
    opt.record_trace = false;
    benchmark::DoNotOptimize(cmp_run(problem, opt));
  }
  state.SetComplexityN(n);
}
BENCHMARK(CmpIteration)->RangeMultiplier(4)->Range(32, 512)->Complexity(benchmark::oNLogN);

void FgmIteration(benchmark::State& state) {
  const long n = state.range(0);
  const ComplexSignal y = make_observation(n);
  auto op = std::make_shared<const ConvolutionOperator>(ConvolutionOperator::build(y));
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::ConLS;
  cfg.r_bar = 8.0;
  const CompositeProblem problem = make_composite_problem(op, cfg);
  for (auto _ : state) {
    SolveOptions opt;
    opt.max_iter = 10;
    opt.record_trace = false;
    benchmark::DoNotOptimize(fgm_run(problem, opt));
  }
  state.SetComplexityN(n);
}
BENCHMARK(FgmIteration)->RangeMultiplier(4)->Range(32, 512)->Complexity(benchmark::oNLogN);

}  // namespace

BENCHMARK_MAIN();
