#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "mf/harness.hpp"

using namespace mf;

namespace {

GridDensity unit_box_uniform(int cells) {
  return GridDensity::uniform(DomainSpec::box(Vec{0.0, 0.0}, Vec{1.0, 1.0}),
                              {cells, cells, 1});
}

LlnConfig small_lln() {
  LlnConfig cfg;
  cfg.Ns = {16, 32, 64, 128};
  cfg.M = 30;
  cfg.m = 2;
  cfg.rho = unit_box_uniform(16);
  cfg.sensitivity = SensitivitySpec::fixed_ball(0.3);
  cfg.kernel = KernelSpec::gaussian_grad(1.0, 0.2);
  cfg.u_points = 32;
  return cfg;
}

DensityProvider uniform_provider(double T) {
  GridDensity a = unit_box_uniform(16);
  GridDensity b = a;
  b.set_time(T);
  return DensityProvider({a, b});
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("moment constant") {
  // m = 1: (2!)^{1/2} sqrt(8) + 8 e^2 = 4 + 8 e^2
  CHECK(lln_constant(1) ==
        doctest::Approx(4.0 + 8.0 * std::exp(2.0)).epsilon(1e-12));
  CHECK(lln_constant(2) > lln_constant(1));
  CHECK_THROWS_AS(lln_constant(0), std::invalid_argument);
}

TEST_CASE("theoretical bound formula and branches") {
  // critical branch 2p = d: d = 2, p = 1, q = 3, m = 2
  TheoreticalRate tr{1.0, 3.0, 2, 2};
  double N = 100.0;
  double expect = lln_constant(2) * std::pow(N, -0.25) +
                  std::pow(N, -0.5) * std::log(1.0 + N) +
                  std::pow(N, -(3.0 - 1.0) / (3.0 * 1.0));
  CHECK(theoretical_bound(tr, N) == doctest::Approx(expect).epsilon(1e-12));

  // supercritical branch 2p > d: d = 1, p = 1, q = 3
  TheoreticalRate sup{1.0, 3.0, 1, 1};
  double e2 = lln_constant(1) + std::pow(N, -0.5) + std::pow(N, -2.0 / 3.0);
  CHECK(theoretical_bound(sup, N) == doctest::Approx(e2).epsilon(1e-12));

  // subcritical branch 2p < d: d = 3, p = 1, q = 2
  TheoreticalRate sub{1.0, 2.0, 3, 1};
  double e3 = lln_constant(1) + std::pow(N, -1.0 / 3.0) + std::pow(N, -0.5);
  CHECK(theoretical_bound(sub, N) == doctest::Approx(e3).epsilon(1e-12));

  // N below (2m)^2
  CHECK_THROWS_AS(theoretical_bound(TheoreticalRate{1.0, 3.0, 2, 2}, 15.0),
                  std::invalid_argument);
  // q must exceed p
  CHECK_THROWS_AS(theoretical_bound(TheoreticalRate{2.0, 2.0, 2, 1}, 100.0),
                  std::invalid_argument);
  // excluded exponents: q = 2p (supercritical), q = d/(d-p) (subcritical)
  CHECK_THROWS_AS(theoretical_bound(TheoreticalRate{1.0, 2.0, 1, 1}, 100.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(theoretical_bound(TheoreticalRate{1.0, 1.5, 3, 1}, 100.0),
                  std::invalid_argument);

  // monotone decreasing in N
  double prev = theoretical_bound(tr, 16.0);
  for (double n : {32.0, 64.0, 256.0, 4096.0, 1e6}) {
    double b = theoretical_bound(tr, n);
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("log-log slope fit") {
  // exact power law N^{-1/2}
  std::vector<std::pair<double, double>> rows;
  for (double n : {10.0, 100.0, 1000.0, 10000.0})
    rows.emplace_back(n, 3.0 * std::pow(n, -0.5));
  SlopeFit fit = fit_loglog_slope(rows);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.half_width <= 1e-10);

  // constant data -> slope 0
  std::vector<std::pair<double, double>> flat;
  for (double n : {10.0, 100.0, 1000.0, 10000.0}) flat.emplace_back(n, 2.0);
  CHECK(fit_loglog_slope(flat).slope == doctest::Approx(0.0));

  // too few rows / nonpositive means
  rows.resize(3);
  CHECK_THROWS_AS(fit_loglog_slope(rows), std::invalid_argument);
  std::vector<std::pair<double, double>> bad = {
      {10.0, 1.0}, {100.0, 0.0}, {1000.0, 1.0}, {10000.0, 1.0}};
  CHECK_THROWS_AS(fit_loglog_slope(bad), std::invalid_argument);

  // noisy synthetic N^{-1/4}: the 95% interval covers the truth most of
  // the time and the point estimate stays in a generous window
  RngStream rng(113, stream::kMc, 30);
  int covered = 0, window = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::pair<double, double>> noisy;
    for (int k = 0; k < 8; ++k) {
      double n = 16.0 * std::pow(2.0, k);
      noisy.emplace_back(n, std::pow(n, -0.25) *
                                (1.0 + 0.05 * (2.0 * rng.uniform() - 1.0)));
    }
    SlopeFit f = fit_loglog_slope(noisy);
    if (std::abs(f.slope + 0.25) <= f.half_width) ++covered;
    if (f.slope >= -0.35 && f.slope <= -0.15) ++window;
  }
  CHECK(covered >= 900);
  CHECK(window >= 950);
}

TEST_CASE("rate table validation") {
  RateTable t;
  t.rows = {{16, 30, 1.0, 0.1, 2.0}, {32, 30, 0.8, 0.1, 1.8}};
  CHECK_NOTHROW(t.validate());
  t.rows[1].M = 29;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
  t.rows[1].M = 30;
  t.rows[1].N = 16;
  CHECK_THROWS_AS(t.validate(), std::invalid_argument);
}

TEST_CASE("velocity fluctuation sweep (smoke)") {
  LlnConfig cfg = small_lln();
  RateTable table = run_lln_velocity(cfg, 2024);
  table.validate();
  REQUIRE(table.rows.size() == 4);
  for (const auto& r : table.rows) {
    CHECK(r.mean > 0.0);
    CHECK(r.mean <= r.theory);  // explicit-constant bound
    CHECK(r.std_error >= 0.0);
  }
  // means decay and the fitted slope is negative
  CHECK(table.rows.back().mean < table.rows.front().mean);
  CHECK(table.fit.slope < 0.0);

  // determinism
  RateTable again = run_lln_velocity(cfg, 2024);
  for (size_t i = 0; i < table.rows.size(); ++i) {
    CHECK(again.rows[i].mean == table.rows[i].mean);
    CHECK(again.rows[i].std_error == table.rows[i].std_error);
  }
  // different seed changes the draw
  RateTable other = run_lln_velocity(cfg, 2025);
  CHECK(other.rows[0].mean != table.rows[0].mean);

  // invalid sweeps
  LlnConfig bad = cfg;
  bad.Ns = {8, 16};  // below (2m)^2 = 16
  CHECK_THROWS_AS(run_lln_velocity(bad, 1), std::invalid_argument);
  bad = cfg;
  bad.Ns = {32, 32};
  CHECK_THROWS_AS(run_lln_velocity(bad, 1), std::invalid_argument);
}

TEST_CASE("boundary occupation sweep (smoke)") {
  LlnConfig cfg = small_lln();
  RateTable table = run_lln_theta(cfg, 7);
  table.validate();
  REQUIRE(table.rows.size() == 4);
  for (const auto& r : table.rows) {
    CHECK(r.mean > 0.0);
    CHECK(r.mean <= 1.0);  // sup of a CDF difference
    CHECK(r.mean <= r.theory);
  }
  CHECK(table.rows.back().mean < table.rows.front().mean);
  CHECK(table.fit.slope < 0.0);

  RateTable again = run_lln_theta(cfg, 7);
  for (size_t i = 0; i < table.rows.size(); ++i)
    CHECK(again.rows[i].mean == table.rows[i].mean);

  // a non-constant orientation field is rejected for the cone
  LlnConfig rot = cfg;
  rot.sensitivity = SensitivitySpec::fixed_cone(
      2, 0.3, 1.0, OrientationField::rotational(2, 1.0));
  CHECK_THROWS_AS(run_lln_theta(rot, 7), std::invalid_argument);
}

TEST_CASE("stability of the coupled mean-field flow (smoke)") {
  StabilityConfig cfg;
  cfg.sim.N = 64;
  cfg.sim.dt = 0.01;
  cfg.sim.T = 0.2;
  cfg.sim.sigma = 0.0;
  cfg.sim.seed = 11;
  cfg.sim.domain = DomainSpec::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  cfg.sim.sensitivity = SensitivitySpec::fixed_ball(0.3);
  cfg.sim.kernel = KernelSpec::zero();
  cfg.deltas = {0.0, 0.01, 0.02};
  DensityProvider provider = uniform_provider(0.2);
  StabilityReport rep = run_stability(cfg, provider);
  REQUIRE(rep.curves.size() == 3);

  // delta = 0: glued trajectories stay glued
  for (double r : rep.curves[0].ratio) CHECK(r == 0.0);

  // zero kernel, zero noise: the flow is the projection map, which is
  // nonexpansive, so D(t) <= D(0) exactly
  for (size_t c = 1; c < rep.curves.size(); ++c) {
    CHECK(rep.curves[c].ratio.front() == 1.0);
    for (double r : rep.curves[c].ratio) CHECK(r <= 1.0 + 1e-12);
    CHECK(rep.curves[c].lambda <= 1e-9);
  }
  CHECK(rep.max_rel_spread >= 0.0);
}

TEST_CASE("chaos sweep (smoke)") {
  ChaosConfig cfg;
  cfg.Ns = {8, 16, 32, 64};
  cfg.M = 5;
  cfg.p = 1.0;
  cfg.sample_replicas = 2;
  cfg.theory = TheoreticalRate{1.0, 3.0, 2, 1};

  DomainSpec box = DomainSpec::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  cfg.pde.domain = box;
  cfg.pde.cells = {16, 16, 1};
  cfg.pde.sigma = 0.05;
  cfg.pde.sensitivity = SensitivitySpec::fixed_ball(0.3);
  cfg.pde.kernel = KernelSpec::zero();
  cfg.pde.initial = GridDensity::uniform(box, cfg.pde.cells);
  cfg.pde.dt = 0.0005;
  cfg.pde.T = 0.05;

  cfg.base.dt = 0.01;
  cfg.base.T = 0.05;
  cfg.base.sigma = 0.05;
  cfg.base.seed = 99;
  cfg.base.domain = box;
  cfg.base.sensitivity = cfg.pde.sensitivity;
  cfg.base.kernel = cfg.pde.kernel;
  cfg.base.snapshot_times = {0.05};

  RateTable table = run_chaos(cfg);
  REQUIRE(table.rows.size() == 4);
  for (const auto& r : table.rows) {
    CHECK(r.mean > 0.0);
    CHECK(r.mean <= r.theory);
    CHECK(r.std_error >= 0.0);
  }
  // uniform initial data vs uniform steady state: W1 shrinks with N
  CHECK(table.rows.back().mean < table.rows.front().mean);

  RateTable again = run_chaos(cfg);
  for (size_t i = 0; i < table.rows.size(); ++i)
    CHECK(again.rows[i].mean == table.rows[i].mean);

  ChaosConfig bad = cfg;
  bad.base.snapshot_times = {1.0};  // beyond the PDE horizon
  CHECK_THROWS_AS(run_chaos(bad), std::invalid_argument);
}

TEST_SUITE_END();
