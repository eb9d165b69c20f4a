#include <benchmark/benchmark.h>

#include "mf/pde.hpp"
#include "mf/transport.hpp"
#include "mf/velocity.hpp"

namespace {

mf::Cloud random_cloud(int n, uint64_t seed) {
  mf::RngStream rng(seed, mf::stream::kMc, 0);
  mf::Cloud c;
  c.reserve(n);
  for (int i = 0; i < n; ++i)
    c.push_back(mf::Vec{rng.uniform(), rng.uniform()});
  return c;
}

const mf::SensitivitySpec kSens = mf::SensitivitySpec::fixed_ball(0.2);
const mf::KernelSpec kKernel = mf::KernelSpec::gaussian_grad(1.0, 0.3);

void BM_VelocityNaive(benchmark::State& state) {
  mf::Cloud cloud = random_cloud(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) {
    mf::Vec v = mf::velocity_empirical(cloud[0], cloud, kSens, kKernel);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_VelocityNaive)->Range(64, 4096);

void BM_VelocityBinned(benchmark::State& state) {
  mf::Cloud cloud = random_cloud(static_cast<int>(state.range(0)), 7);
  mf::BinIndex bins(cloud, kSens.radius());
  for (auto _ : state) {
    mf::Vec v =
        mf::velocity_empirical_binned(cloud[0], cloud, kSens, kKernel, bins);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_VelocityBinned)->Range(64, 4096);

void BM_Assignment(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  mf::Cloud a = random_cloud(n, 11), b = random_cloud(n, 13);
  for (auto _ : state) {
    double w = mf::wasserstein_p(a, b, 1.0);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_Assignment)->Range(16, 1024);

void BM_PdeStep(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  mf::PdeConfig cfg;
  cfg.domain = mf::DomainSpec::box(mf::Vec{0.0, 0.0}, mf::Vec{1.0, 1.0});
  cfg.cells = {n, n, 1};
  cfg.sigma = 0.01;
  cfg.sensitivity = kSens;
  cfg.kernel = kKernel;
  cfg.initial = mf::GridDensity::uniform(cfg.domain, cfg.cells);
  cfg.dt = 1e-5;
  cfg.T = 1.0;
  mf::GridDensity rho = cfg.initial;
  for (auto _ : state) {
    rho = mf::step_fv(rho, cfg);
    benchmark::DoNotOptimize(rho[0]);
  }
}
BENCHMARK(BM_PdeStep)->Arg(32)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
