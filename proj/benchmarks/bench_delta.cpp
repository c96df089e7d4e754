// Cost of the lifted evaluation relative to plain double arithmetic and to
// the multiprecision oracle.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "cdd/delta_scalar.hpp"
#include "cdd/expr.hpp"
#include "cdd/kernels.hpp"
#include "cdd/linalg.hpp"
#include "cdd/optim.hpp"
#include "cdd/oracle.hpp"
#include "cdd/spline.hpp"
#include "cdd/stagnation.hpp"

namespace {

const char* const kSource = "exp(x0) * log(x1) + sqrt(x0 * x1) / (1 + sq(x2)) - x2^1.5";
const std::vector<double> kX = {0.7, 1.9, 1.3};
const std::vector<double> kS = {1e-9, -2e-9, 5e-10};

void BM_EvalPlainTwice(benchmark::State& state) {
  const cdd::Expr e = cdd::parse(kSource, 3);
  std::vector<double> y(3);
  for (std::size_t i = 0; i < 3; ++i) y[i] = kX[i] + kS[i];
  for (auto _ : state) {
    benchmark::DoNotOptimize(cdd::eval_plain(e, y) - cdd::eval_plain(e, kX));
  }
}
BENCHMARK(BM_EvalPlainTwice);

void BM_EvalDelta(benchmark::State& state) {
  const cdd::Expr e = cdd::parse(kSource, 3);
  for (auto _ : state) benchmark::DoNotOptimize(cdd::eval_delta(e, kX, kS));
}
BENCHMARK(BM_EvalDelta);

void BM_OracleDelta(benchmark::State& state) {
  const cdd::Expr e = cdd::parse(kSource, 3);
  for (auto _ : state) benchmark::DoNotOptimize(cdd::oracle_delta(e, kX, kS));
}
BENCHMARK(BM_OracleDelta);

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cdd::parse(kSource, 3));
}
BENCHMARK(BM_Parse);

void BM_ExpRule(benchmark::State& state) {
  const cdd::DeltaScalar a = cdd::seed_input(0.3, 1e-12);
  for (auto _ : state) benchmark::DoNotOptimize(cdd::exp(a));
}
BENCHMARK(BM_ExpRule);

void BM_Expm1Taylor(benchmark::State& state) {
  double d = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d);
    benchmark::DoNotOptimize(cdd::expm1_taylor(d));
  }
}
BENCHMARK(BM_Expm1Taylor);

void BM_StdExpm1(benchmark::State& state) {
  double d = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d);
    benchmark::DoNotOptimize(std::expm1(d));
  }
}
BENCHMARK(BM_StdExpm1);

// x³ on integer knots 0..k−1, both forms exact.
cdd::CubicSpline cube_spline(std::size_t k) {
  std::vector<double> knots(k);
  for (std::size_t i = 0; i < k; ++i) knots[i] = static_cast<double>(i);
  auto shifted = [](double c) {  // (t + c)³ expanded in t
    return cdd::CubicPiece{1.0, 3 * c, 3 * c * c, c * c * c};
  };
  std::vector<cdd::CubicPiece> left(k + 1), right(k);
  left[0] = right[0] = shifted(knots[0]);
  for (std::size_t l = 1; l < k; ++l) {
    left[l] = shifted(knots[l - 1]);
    right[l] = shifted(knots[l]);
  }
  left[k] = shifted(knots[k - 1]);
  return cdd::CubicSpline(knots, left, right);
}

void BM_SplineDelta(benchmark::State& state) {
  const auto span = static_cast<double>(state.range(0));
  const cdd::CubicSpline sp = cube_spline(64);
  const cdd::DeltaScalar x = cdd::seed_input(1.25, span);
  for (auto _ : state) benchmark::DoNotOptimize(cdd::spline_eval_delta(sp, x));
}
BENCHMARK(BM_SplineDelta)->Arg(0)->Arg(1)->Arg(8)->Arg(32);

cdd::Matrix diagonally_dominant(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  cdd::Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng);
    a(i, i) += static_cast<double>(n);
  }
  return a;
}

void BM_SolveDelta(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const cdd::Matrix a = diagonally_dominant(n, rng);
  cdd::Matrix da(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) da(i, j) = 1e-10 * a(j, i);
  const cdd::DeltaMatrix am(a, da);
  const cdd::DeltaVector b(std::vector<double>(n, 1.0), std::vector<double>(n, 1e-12));
  for (auto _ : state) benchmark::DoNotOptimize(cdd::solve_delta(am, b));
}
BENCHMARK(BM_SolveDelta)->Arg(2)->Arg(8)->Arg(32);

void BM_TwoSolves(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  const cdd::Matrix a = diagonally_dominant(n, rng);
  const std::vector<double> b(n, 1.0);
  for (auto _ : state) {
    const cdd::LuFactorization lu0(a), lu1(a);
    benchmark::DoNotOptimize(lu0.solve(b));
    benchmark::DoNotOptimize(lu1.solve(b));
  }
}
BENCHMARK(BM_TwoSolves)->Arg(2)->Arg(8)->Arg(32);

void BM_StagnationExperiment(benchmark::State& state) {
  const double cond = static_cast<double>(state.range(0));
  cdd::Matrix m(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = cond;
  const cdd::QuadraticObjective q(m, {-1.0, -0.75});
  const std::vector<double> x0 = {0.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(cdd::run_quadratic_experiment(q, x0));
}
BENCHMARK(BM_StagnationExperiment)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
