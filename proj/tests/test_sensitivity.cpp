#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "mf/sensitivity.hpp"

using namespace mf;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Dense sampling of the 2D fixed-cone boundary: the arc at radius r for
// angles within theta of w, plus the two straight edges from the apex.
std::vector<Vec> cone_boundary_samples_2d(double r, double theta,
                                          const Vec& w, int n) {
  double base = std::atan2(w[1], w[0]);
  std::vector<Vec> pts;
  for (int k = 0; k <= n; ++k) {
    double a = base - theta + 2.0 * theta * k / n;
    pts.push_back(Vec{r * std::cos(a), r * std::sin(a)});
  }
  for (int k = 0; k <= n; ++k) {
    double t = r * static_cast<double>(k) / n;
    for (double sgn : {-1.0, 1.0}) {
      double a = base + sgn * theta;
      pts.push_back(Vec{t * std::cos(a), t * std::sin(a)});
    }
  }
  return pts;
}

}  // namespace

TEST_SUITE_BEGIN("sensitivity");

TEST_CASE("indicator variants") {
  auto ball = SensitivitySpec::fixed_ball(1.0);
  CHECK(indicator(ball, Vec{1.0, 0.0}, Vec{0.5, 0.0}) == 1);
  CHECK(indicator(ball, Vec{1.0, 0.0}, Vec{1.0, 0.0}) == 1);  // closed
  CHECK(indicator(ball, Vec{1.0, 0.0}, Vec{1.5, 0.0}) == 0);

  auto cone = SensitivitySpec::fixed_cone(
      2, 1.0, kPi / 3.0, OrientationField::constant(Vec{1.0, 0.0}));
  CHECK(indicator(cone, Vec{1.0, 0.0}, Vec{0.0, 0.5}) == 0);
  CHECK(indicator(cone, Vec{1.0, 0.0}, Vec{0.5, 0.1}) == 1);
  CHECK_THROWS_AS(indicator(cone, Vec{0.0, 0.0}, Vec{0.5, 0.1}),
                  std::invalid_argument);

  // varying cone: theta = pi whenever |w| <= 1, so K is the full ball
  auto vcone = SensitivitySpec::varying_cone(
      2, 1.0, kPi / 6.0, 1.0, OrientationField::constant(Vec{0.7, 0.0}));
  CHECK(indicator(vcone, Vec{0.7, 0.0}, Vec{-0.3, 0.1}) == 1);
}

TEST_CASE("theta enlarged indicator on the ball") {
  auto ball = SensitivitySpec::fixed_ball(1.0);
  Vec w{1.0, 0.0};
  CHECK(theta_enlarged_indicator(ball, w, Vec{1.0, 0.0}, 0.0) == 1);
  CHECK(theta_enlarged_indicator(ball, w, Vec{0.0, 0.0}, 0.5) == 0);
  CHECK(theta_enlarged_indicator(ball, w, Vec{0.0, 0.0}, 1.0) == 1);
}

TEST_CASE("cone boundary distance matches a dense sampling oracle") {
  Vec w{1.0, 0.0};
  double r = 1.0, theta = kPi / 4.0;
  auto cone = SensitivitySpec::fixed_cone(2, r, theta,
                                          OrientationField::constant(w));
  auto boundary = cone_boundary_samples_2d(r, theta, w, 4000);
  RngStream rng(23, stream::kMc, 7);
  for (int k = 0; k < 1000; ++k) {
    Vec p{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    double oracle = std::numeric_limits<double>::infinity();
    for (const auto& b : boundary) oracle = std::min(oracle, dist(p, b));
    double exact = boundary_distance(cone, w, p);
    CHECK(exact <= oracle + 1e-12);
    CHECK(exact >= oracle - 1e-3);  // oracle overestimates by the mesh gap
  }
}

TEST_CASE("varying cone generalized boundary includes the segment R(w)") {
  // |w| in (1/2, 1): theta = pi (full ball) but Theta carries the extra
  // axis segment [-r w/|w|, 2r(|w|-1) w/|w|]
  double r = 1.0;
  Vec w{0.75, 0.0};
  auto vcone = SensitivitySpec::varying_cone(
      2, r, kPi / 6.0, 1.0, OrientationField::constant(w));
  // point near the segment interior: y = 0 line between -r and 2r(|w|-1)
  Vec p{-0.5, 0.05};
  double dtheta = theta_distance(vcone, w, p);
  CHECK(dtheta == doctest::Approx(0.05).epsilon(1e-9));
  // boundary of the ball still part of Theta
  CHECK(theta_distance(vcone, w, Vec{1.0, 0.0}) == doctest::Approx(0.0));
  // segment endpoint b(w) = 2r(|w|-1) w/|w| = (-0.5, 0)
  Vec just_past{-0.4, 0.0};
  CHECK(theta_distance(vcone, w, just_past) ==
        doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("mollified indicator range and limits") {
  auto ball = SensitivitySpec::fixed_ball(1.0);
  Vec w{1.0, 0.0};
  MollificationParams mp;
  mp.eps = 0.01;
  mp.eta = 0.01;
  CHECK(mollified_indicator(ball, mp, w, Vec{0.0, 0.0}) == 1.0);
  CHECK(mollified_indicator(ball, mp, w, Vec{2.0, 0.0}) == 0.0);

  RngStream rng(29, stream::kMc, 8);
  for (int k = 0; k < 200; ++k) {
    Vec p{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    double v = mollified_indicator_spatial(ball, 0.1, 9, w, p);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    // eps -> 0 converges to the sharp indicator away from the boundary
    if (boundary_distance(ball, w, p) > 0.2) {
      double sharp = indicator(ball, w, p);
      double fine = mollified_indicator_spatial(ball, 0.05, 9, w, p);
      CHECK(std::abs(fine - sharp) <= std::abs(v - sharp) + 1e-12);
      CHECK(std::abs(fine - sharp) <= 1e-12);
    }
  }
}

TEST_CASE("mollified indicator L1 error is below the shell measure") {
  // int |1^eps - 1| dx <= |boundary shell of width 2 eps|, ball r = 1, 2D
  auto ball = SensitivitySpec::fixed_ball(1.0);
  Vec w{1.0, 0.0};
  double eps = 0.1;
  double shell = kPi * ((1.0 + 2 * eps) * (1.0 + 2 * eps) -
                        (1.0 - 2 * eps) * (1.0 - 2 * eps));
  // MC over the box [-1.5, 1.5]^2 (integrand vanishes outside)
  RngStream rng(31, stream::kMc, 9);
  const int n = 200000;
  double area = 9.0, sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < n; ++k) {
    Vec p{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    double v = std::abs(mollified_indicator_spatial(ball, eps, 9, w, p) -
                        indicator(ball, w, p));
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / n;
  double est = area * mean;
  double se = area * std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(est <= shell + 3.0 * se);
}

TEST_CASE("symmetric difference measure") {
  RngStream rng(37, stream::kMc, 10);
  auto ball = SensitivitySpec::fixed_ball(1.0);
  auto z = symmetric_difference_measure(ball, Vec{1.0, 0.0}, Vec{0.0, 1.0},
                                        2000, rng);
  CHECK(z.first == 0.0);  // K independent of w

  double theta = kPi / 4.0, dang = 0.1;
  auto cone = SensitivitySpec::fixed_cone(
      2, 1.0, theta, OrientationField::constant(Vec{1.0, 0.0}));
  Vec w1{1.0, 0.0};
  Vec w2{std::cos(dang), std::sin(dang)};
  auto est = symmetric_difference_measure(cone, w1, w2, 400000, rng);
  // rotating a wedge of half-angle theta by dang: symmetric difference is
  // two sectors of angle dang -> area = dang * r^2
  double analytic = dang * 1.0;
  CHECK(std::abs(est.first - analytic) <= 3.0 * est.second + 1e-12);
  CHECK_THROWS_AS(
      symmetric_difference_measure(cone, w1, w2, 10, rng),
      std::invalid_argument);
}

TEST_CASE("rope inequality") {
  auto ball = SensitivitySpec::fixed_ball(1.0);
  Vec w{1.0, 0.0};
  CHECK(rope_inequality_check(ball, w, Vec{0.0, 0.0}, Vec{0.3, 0.0},
                              Vec{0.0, 0.0}, Vec{0.3, 0.0}));
  CHECK(rope_inequality_check(ball, w, Vec{0.0, 0.0}, Vec{0.99, 0.0},
                              Vec{0.0, 0.0}, Vec{1.01, 0.0}));

  auto cone = SensitivitySpec::fixed_cone(2, 1.0, kPi / 3.0,
                                          OrientationField::constant(w));
  RngStream rng(41, stream::kMc, 11);
  for (int k = 0; k < 20000; ++k) {
    auto rnd = [&] {
      return Vec{rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)};
    };
    Vec x1 = rnd(), y1 = rnd(), x2 = rnd(), y2 = rnd();
    CHECK(rope_inequality_check(ball, w, x1, y1, x2, y2));
    CHECK(rope_inequality_check(cone, w, x1, y1, x2, y2));
  }
}

TEST_CASE("(H1) global compactness") {
  Vec w{0.8, 0.1};
  std::vector<SensitivitySpec> variants = {
      SensitivitySpec::fixed_ball(1.0),
      SensitivitySpec::varying_ball(0.3, 1.0),
      SensitivitySpec::fixed_cone(2, 1.0, kPi / 3.0,
                                  OrientationField::constant(w)),
      SensitivitySpec::varying_cone(2, 1.0, kPi / 6.0, 1.0,
                                    OrientationField::constant(w)),
  };
  RngStream rng(43, stream::kMc, 12);
  for (const auto& spec : variants) {
    CHECK(spec.radius() == 1.0);
    for (int k = 0; k < 25000; ++k) {
      Vec dirp = rng.uniform_direction(2);
      double rr = 1.0 + rng.uniform() * 2.0 + 1e-12;
      CHECK(indicator(spec, w, rr * dirp) == 0);
    }
  }
}

TEST_CASE("varying profiles") {
  auto vb = SensitivitySpec::varying_ball(0.3, 1.0);
  CHECK(vb.radius_at(0.0) == doctest::Approx(1.0));
  CHECK(vb.radius_at(1e9) == doctest::Approx(0.3).epsilon(1e-9));
  auto vc = SensitivitySpec::varying_cone(
      2, 1.0, kPi / 6.0, 1.0, OrientationField::constant(Vec{1.0, 0.0}));
  CHECK(vc.angle_at(0.5) == doctest::Approx(kPi));
  CHECK(vc.angle_at(1.0) == doctest::Approx(kPi));
  CHECK(vc.angle_at(1e4) == doctest::Approx(kPi / 6.0).epsilon(1e-3));
  // decreasing beyond 1
  double prev = vc.angle_at(1.0);
  for (double z = 1.1; z < 5.0; z += 0.1) {
    double a = vc.angle_at(z);
    CHECK(a <= prev + 1e-12);
    prev = a;
  }
}

TEST_SUITE_END();
