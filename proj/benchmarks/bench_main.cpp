#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "unred/curve.hpp"
#include "unred/hopf.hpp"
#include "unred/hypflow.hpp"
#include "unred/sobolev.hpp"
#include "unred/spectral.hpp"
#include "unred/unreduction.hpp"

using namespace unred;

namespace {

std::vector<double> smooth_signal(std::size_t n) {
  std::vector<double> f(n);
  for (std::size_t q = 0; q < n; ++q) {
    const double t = kTwoPi * static_cast<double>(q) / static_cast<double>(n);
    f[q] = std::exp(std::sin(t)) + 0.2 * std::cos(7.0 * t);
  }
  return f;
}

void spectral_derivative(benchmark::State& state) {
  const auto f = smooth_signal(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral::derivative(f, 2));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(spectral_derivative)->RangeMultiplier(2)->Range(64, 4096)->Complexity(benchmark::oNLogN);

void sobolev_solve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SobolevOperator op(0.1, n);
  const auto f = smooth_signal(n);
  for (auto _ : state) benchmark::DoNotOptimize(op.solve(f));
}
BENCHMARK(sobolev_solve)->RangeMultiplier(4)->Range(64, 4096);

void frenet_frame(benchmark::State& state) {
  const auto c = shapes::ellipse(static_cast<std::size_t>(state.range(0)), 2.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(frenet(c));
}
BENCHMARK(frenet_frame)->RangeMultiplier(4)->Range(64, 4096);

// One residual evaluation on an N × (M+1)² field: jets, R_h and R_v.
void residual_evaluation(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t m = static_cast<std::size_t>(state.range(1));
  const SobolevOperator op(0.1, n);
  const auto field = CurveField::sample(m, m, [&](double x, double t) {
    return sample_curve(n, [&](double th) {
      const double r = 1.0 + 0.5 * t + 0.05 * std::sin(2.0 * th + x);
      return Vec2{r * std::cos(th), r * std::sin(th)};
    });
  });
  const auto force = ForceProfile::zero();
  for (auto _ : state) {
    const auto d = jet_decompose(field, op);
    benchmark::DoNotOptimize(residual_horizontal(field, d, op));
    benchmark::DoNotOptimize(residual_vertical(field, d, op, force));
  }
}
BENCHMARK(residual_evaluation)->Args({64, 8})->Args({128, 16})->Args({256, 16})->Unit(benchmark::kMillisecond);

void circle_solve(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t m = static_cast<std::size_t>(state.range(1));
  BoundaryData b;
  b.bottom.assign(m + 1, shapes::circle(n, 1.0));
  b.top.assign(m + 1, shapes::circle(n, 2.0));
  for (std::size_t j = 0; j <= m; ++j) {
    const auto c = shapes::circle(n, 1.0 + static_cast<double>(j) / static_cast<double>(m));
    b.left.push_back(c);
    b.right.push_back(c);
  }
  const SobolevOperator op(0.1, n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_bvp(b, op, ForceProfile::zero(), {}));
}
BENCHMARK(circle_solve)->Args({64, 8})->Args({128, 8})->Unit(benchmark::kMillisecond);

void holonomy_great_circle(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto path = SpherePath::great_circle(k);
  const auto sigma = vertical_ode([](double t) { return std::cos(t); }, -0.5, k);
  for (auto _ : state) benchmark::DoNotOptimize(holonomy(path, sigma));
}
BENCHMARK(holonomy_great_circle)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void flow_steps(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FlowState s{shapes::ellipse(n, 1.5, 1.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(integrate(s, ForceProfile::zero(), 0.01, 1e-3, {.save_stride = 10}));
}
BENCHMARK(flow_steps)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
