#include <benchmark/benchmark.h>

#include "aicc/datagen.hpp"
#include "aicc/linalg.hpp"
#include "aicc/random.hpp"
#include "aicc/scheme.hpp"

namespace {

aicc::Matrix random_matrix(std::size_t n, std::uint64_t seed) {
  aicc::Rng rng(seed);
  aicc::Matrix m(n, n);
  for (double& v : m.data()) v = rng.uniform(-1.0, 1.0);
  return m;
}

aicc::SchemeConfig scheme(std::size_t m) {
  aicc::SchemeConfig c;
  c.m = m;
  c.k = 3;
  c.v = 1;
  c.seed = 1;
  return c;
}

std::vector<aicc::Matrix> inputs(std::size_t m) {
  aicc::Rng rng(7);
  std::vector<aicc::Matrix> xs;
  for (int k = 0; k < 3; ++k) xs.push_back(aicc::sample_p4(rng, m));
  return xs;
}

void BM_MatMul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const aicc::Matrix a = random_matrix(n, 1), b = random_matrix(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MatMul)->RangeMultiplier(2)->Range(8, 128)->Complexity(benchmark::oNCubed);

void BM_SymEigenvalues(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const aicc::Matrix a = random_matrix(n, 3);
  const aicc::Matrix s = 0.5 * (a + a.transpose());
  for (auto _ : state) benchmark::DoNotOptimize(aicc::sym_eigenvalues(s));
}
BENCHMARK(BM_SymEigenvalues)->RangeMultiplier(2)->Range(8, 64);

void BM_MatrixExp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const aicc::Matrix a = random_matrix(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(aicc::matrix_exp(a));
}
BENCHMARK(BM_MatrixExp)->RangeMultiplier(2)->Range(8, 64);

void BM_LuDeterminant(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const aicc::Matrix a = random_matrix(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(aicc::lu_determinant(a));
}
BENCHMARK(BM_LuDeterminant)->RangeMultiplier(2)->Range(8, 128);

void BM_MlpForward(benchmark::State& state) {
  aicc::Rng rng(6);
  const aicc::Mlp net(aicc::NetworkArch{300, {100, 100}, 100}, rng);
  aicc::Vector x(300, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_MlpForward);

// Coefficient generation for one K-tuple (all encoder networks plus lambda0).
void BM_DeriveCoefficients(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const aicc::SchemeModel model(scheme(m));
  const auto xs = inputs(m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.encoder_coeffs(xs));
    benchmark::DoNotOptimize(model.computation_coeffs(xs));
  }
}
BENCHMARK(BM_DeriveCoefficients)->Arg(10)->Arg(20);

void BM_WorkerCompute(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const aicc::SchemeModel model(scheme(m));
  const auto xs = inputs(m);
  const auto enc = model.encoder_coeffs(xs);
  const auto comp = model.computation_coeffs(xs);
  const aicc::Matrix x = aicc::encode(enc, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(aicc::worker_compute(comp, x));
}
BENCHMARK(BM_WorkerCompute)->Arg(10)->Arg(20)->Arg(40);

void BM_Decode(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const aicc::SchemeModel model(scheme(m));
  const auto xs = inputs(m);
  const auto enc = model.encoder_coeffs(xs);
  const auto comp = model.computation_coeffs(xs);
  std::vector<aicc::WorkerResult> results;
  for (double a : aicc::default_alphas(5))
    results.push_back({a, aicc::worker_compute(comp, aicc::encode(enc, a))});
  for (auto _ : state) benchmark::DoNotOptimize(aicc::decode(results, model.config()));
}
BENCHMARK(BM_Decode)->Arg(10);

void BM_TrainStep(benchmark::State& state) {
  const aicc::SchemeModel model(scheme(10));
  const auto xs = inputs(10);
  const aicc::ProblemSpec det(aicc::Problem::determinant, 10);
  for (auto _ : state) {
    const auto fwd = aicc::forward_train(model, xs, det);
    benchmark::DoNotOptimize(aicc::backward_train(model, fwd.tape));
  }
}
BENCHMARK(BM_TrainStep);

}  // namespace

BENCHMARK_MAIN();
