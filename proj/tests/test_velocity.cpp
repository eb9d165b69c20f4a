#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "mf/velocity.hpp"

using namespace mf;

TEST_SUITE_BEGIN("velocity");

TEST_CASE("kernel constants are true upper bounds") {
  // construction cross-checks the reported constants by dense sampling
  auto g = KernelSpec::gaussian_grad(1.5, 0.4);
  CHECK(g.sup_norm() == doctest::Approx(1.5 / (0.4 * std::sqrt(std::exp(1.0)))));
  CHECK(g.lipschitz() >= 1.5 / (0.4 * 0.4) - 1e-12);
  auto m = KernelSpec::morse_grad(1.0, 0.5, 0.6, 0.2, 0.05);
  CHECK(m.sup_norm() > 0.0);
  CHECK(m.lipschitz() > 0.0);
  auto z = KernelSpec::zero();
  CHECK(norm(z.grad(Vec{0.3, 0.4})) == 0.0);
}

TEST_CASE("empirical velocity basics") {
  auto sens = SensitivitySpec::fixed_ball(1.0);
  auto kernel = KernelSpec::gaussian_grad(1.0, 0.5);
  Vec x{0.0, 0.0};

  Cloud single{Vec{0.4, 0.1}};
  Vec v = velocity_empirical(x, single, sens, kernel);
  Vec expect = kernel.grad(x - single[0]);
  CHECK(dist(v, expect) == 0.0);

  Cloud outside{Vec{2.0, 0.0}, Vec{0.0, -3.0}};
  v = velocity_empirical(x, outside, sens, kernel);
  CHECK(norm(v) == 0.0);

  Cloud pair{Vec{0.3, 0.2}, Vec{-0.3, -0.2}};  // x +- v, odd gradient
  v = velocity_empirical(x, pair, sens, kernel);
  CHECK(norm(v) <= 1e-16);

  CHECK_THROWS_AS(velocity_empirical(x, Cloud{}, sens, kernel),
                  std::invalid_argument);
}

TEST_CASE("binned path equals the naive path bit for bit") {
  auto sens = SensitivitySpec::fixed_ball(0.25);
  auto kernel = KernelSpec::gaussian_grad(1.0, 0.2);
  RngStream rng(47, stream::kMc, 13);
  Cloud cloud;
  for (int i = 0; i < 10000; ++i)
    cloud.push_back(Vec{rng.uniform(), rng.uniform()});
  BinIndex bins(cloud, sens.radius());
  for (int q = 0; q < 100; ++q) {
    Vec x{rng.uniform(), rng.uniform()};
    Vec a = velocity_empirical(x, cloud, sens, kernel);
    Vec b = velocity_empirical_binned(x, cloud, sens, kernel, bins);
    CHECK(a == b);  // exact equality
  }
  // cluster cloud: everything in one bin
  Cloud cluster(64, Vec{0.5, 0.5});
  Vec a = velocity_empirical(Vec{0.5, 0.52}, cluster, sens, kernel);
  Vec b = velocity_empirical_binned(Vec{0.5, 0.52}, cluster, sens, kernel,
                                    sens.radius());
  CHECK(a == b);
  CHECK_THROWS_AS(velocity_empirical_binned(Vec{0.5, 0.5}, cloud, sens, kernel,
                                            0.1),
                  std::invalid_argument);
}

TEST_CASE("density velocity basics") {
  auto sens = SensitivitySpec::fixed_ball(0.4);
  auto kernel = KernelSpec::gaussian_grad(1.0, 0.3);
  DomainSpec box = DomainSpec::box(Vec{-0.5, -0.5}, Vec{0.5, 0.5});
  GridDensity rho = GridDensity::uniform(box, {32, 32, 1});
  // odd kernel, symmetric K, query at the center of a symmetric grid
  Vec v = velocity_from_density(Vec{0.0, 0.0}, rho, sens, kernel);
  CHECK(norm(v) <= 1e-15);

  // single-cell spike of mass 1
  GridDensity spike(box, {32, 32, 1});
  std::array<int, 3> idx{20, 16, 0};
  spike[spike.flat_index(idx)] = 1.0 / spike.cell_volume();
  Vec yc = spike.cell_center(idx);
  Vec x{0.0, 0.0};
  v = velocity_from_density(x, spike, sens, kernel);
  CHECK(dist(v, kernel.grad(x - yc)) <= 1e-12);
}

TEST_CASE("density velocity converges to an MC integral oracle") {
  auto sens = SensitivitySpec::fixed_ball(0.4);
  auto kernel = KernelSpec::gaussian_grad(1.0, 0.3);
  DomainSpec box = DomainSpec::box(Vec{0.0, 0.0}, Vec{1.0, 1.0});
  Vec x{0.35, 0.45};
  // oracle: V(x) = E[grad phi(x - Y) 1_K(Y - x)], Y uniform on the box
  RngStream rng(53, stream::kMc, 14);
  const int n = 1000000;
  Vec mean = Vec::zero(2);
  double var_acc = 0.0;
  Vec w = sens.w_at(x);
  for (int k = 0; k < n; ++k) {
    Vec y{rng.uniform(), rng.uniform()};
    Vec term = Vec::zero(2);
    if (indicator(sens, w, y - x)) term = kernel.grad(x - y);
    mean += term;
    var_acc += norm2(term);
  }
  mean = mean / static_cast<double>(n);
  double se = std::sqrt((var_acc / n - norm2(mean)) / n);
  double prev_err = std::numeric_limits<double>::infinity();
  double err = prev_err;
  for (int cells : {16, 32, 64}) {
    GridDensity rho = GridDensity::uniform(box, {cells, cells, 1});
    err = dist(velocity_from_density(x, rho, sens, kernel), mean);
    CHECK(err <= prev_err + 2.0 * se);
    prev_err = err;
  }
  CHECK(err < 2.0 * se + 5e-3);
}

TEST_CASE("uniform bound |V| <= sup norm") {
  auto sens = SensitivitySpec::fixed_ball(0.5);
  auto kernel = KernelSpec::gaussian_grad(2.0, 0.25);
  RngStream rng(59, stream::kMc, 15);
  Cloud cloud;
  for (int i = 0; i < 500; ++i)
    cloud.push_back(Vec{rng.uniform(), rng.uniform()});
  for (int q = 0; q < 10000; ++q) {
    Vec x{rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2)};
    CHECK(norm(velocity_empirical(x, cloud, sens, kernel)) <=
          kernel.sup_norm() + 1e-12);
  }
}

TEST_CASE("weak-strong Lipschitz ratio stays bounded") {
  // perturb a sampled cloud by delta and compare the two empirical
  // velocities at the perturbed/unperturbed points; the deviation-to-
  // perturbation ratio should show no upward trend as delta shrinks
  auto sens = SensitivitySpec::fixed_ball(0.3);
  auto kernel = KernelSpec::gaussian_grad(1.0, 0.2);
  RngStream rng(61, stream::kMc, 16);
  const int N = 2000;
  Cloud y;
  for (int i = 0; i < N; ++i) y.push_back(Vec{rng.uniform(), rng.uniform()});
  std::vector<double> ratios;
  for (double delta : {0.04, 0.02, 0.01}) {
    Cloud yp = y;
    double max_pert = 0.0;
    for (auto& p : yp) {
      Vec d = delta * rng.uniform_in_unit_ball(2);
      p += d;
      max_pert = std::max(max_pert, norm(d));
    }
    double sup = 0.0;
    for (int i = 0; i < N; i += 10) {
      Vec a = velocity_empirical(y[i], y, sens, kernel);
      Vec b = velocity_empirical(yp[i], yp, sens, kernel);
      sup = std::max(sup, dist(a, b));
    }
    ratios.push_back(sup / max_pert);
  }
  // fitted C = max ratio; no blow-up as delta decreases (factor 4 slack
  // absorbs the sampling-noise floor at the smallest delta)
  double c_fit = *std::max_element(ratios.begin(), ratios.end());
  for (double r : ratios) CHECK(r <= c_fit);
  CHECK(ratios.back() <= 4.0 * ratios.front() + 1.0);
}

TEST_SUITE_END();
