#include "mf/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mf {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Meridian-plane coordinates relative to the cone axis w: t along the
// axis, s >= 0 perpendicular. Distances to the rotationally symmetric
// cone boundary are exact in these coordinates.
struct Meridian {
  double t;
  double s;
};

Meridian meridian(const Vec& offset, const Vec& w) {
  double wn = norm(w);
  double t = dot(offset, w) / wn;
  double s2 = norm2(offset) - t * t;
  return {t, std::sqrt(std::max(0.0, s2))};
}

double dist_point_segment2(double px, double py, double ax, double ay,
                           double bx, double by) {
  double vx = bx - ax, vy = by - ay;
  double wx = px - ax, wy = py - ay;
  double vv = vx * vx + vy * vy;
  double u = vv > 0.0 ? std::clamp((wx * vx + wy * vy) / vv, 0.0, 1.0) : 0.0;
  double dx = wx - u * vx, dy = wy - u * vy;
  return std::sqrt(dx * dx + dy * dy);
}

// Distance from (t,s) to the cone boundary {arc rho=r, phi in [0,theta]}
// union {lateral segment phi=theta, rho in [0,r]}, theta < pi.
double dist_cone_boundary(double t, double s, double r, double theta) {
  double phi = std::atan2(s, t);  // in [0, pi] since s >= 0
  double rho = std::hypot(t, s);
  // arc
  double phic = std::clamp(phi, 0.0, theta);
  double ax = r * std::cos(phic), ay = r * std::sin(phic);
  double d_arc = std::hypot(t - ax, s - ay);
  // lateral segment from apex to the arc endpoint
  double d_lat = dist_point_segment2(t, s, 0.0, 0.0, r * std::cos(theta),
                                     r * std::sin(theta));
  (void)rho;
  return std::min(d_arc, d_lat);
}

// 1D normalized bump on (-1,1).
double bump_raw(double u) {
  double q = 1.0 - u * u;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

struct QuadRule {
  std::vector<double> nodes;    // in (-1,1)
  std::vector<double> weights;  // sum to 1
};

QuadRule bump_rule(int n) {
  QuadRule q;
  q.nodes.resize(n);
  q.weights.resize(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = -1.0 + (2.0 * i + 1.0) / n;
    q.nodes[i] = u;
    q.weights[i] = bump_raw(u);
    sum += q.weights[i];
  }
  for (auto& w : q.weights) w /= sum;  // convex combination
  return q;
}

}  // namespace

Vec OrientationField::at(const Vec& x) const {
  switch (kind) {
    case Kind::Constant:
      return value;
    case Kind::Rotational: {
      Vec w(x.d);
      w[0] = -scale * x[1];
      w[1] = scale * x[0];
      return w;
    }
    case Kind::Radial:
      return scale * x;
  }
  return value;
}

double OrientationField::lip() const {
  switch (kind) {
    case Kind::Constant:
      return 0.0;
    case Kind::Rotational:
    case Kind::Radial:
      return std::abs(scale);
  }
  return 0.0;
}

OrientationField OrientationField::rotational(int d, double s) {
  if (d < 2) throw std::invalid_argument("rotational field needs d >= 2");
  OrientationField f;
  f.kind = Kind::Rotational;
  f.scale = s;
  return f;
}

SensitivitySpec SensitivitySpec::fixed_ball(double r, OrientationField w) {
  if (!(r > 0.0)) throw std::invalid_argument("sensitivity radius must be > 0");
  SensitivitySpec s;
  s.kind_ = Kind::FixedBall;
  s.r_ = r;
  s.w_ = w;
  return s;
}

SensitivitySpec SensitivitySpec::varying_ball(double r_min, double r_max,
                                              OrientationField w) {
  if (!(0.0 < r_min && r_min <= r_max))
    throw std::invalid_argument("need 0 < r_min <= r_max");
  SensitivitySpec s;
  s.kind_ = Kind::VaryingBall;
  s.r_ = r_max;
  s.r_min_ = r_min;
  s.w_ = w;
  return s;
}

SensitivitySpec SensitivitySpec::fixed_cone(int dim, double r, double theta,
                                            OrientationField w) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("cone sensitivity needs d in {2,3}");
  if (!(r > 0.0) || !(theta > 0.0 && theta < kPi))
    throw std::invalid_argument("cone needs r > 0 and theta in (0,pi)");
  SensitivitySpec s;
  s.kind_ = Kind::FixedCone;
  s.dim_ = dim;
  s.r_ = r;
  s.theta_ = theta;
  s.w_ = w;
  return s;
}

SensitivitySpec SensitivitySpec::varying_cone(int dim, double r,
                                              double theta_star, double tau,
                                              OrientationField w) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("cone sensitivity needs d in {2,3}");
  if (!(r > 0.0) || !(theta_star > 0.0 && theta_star < kPi) || !(tau > 0.0))
    throw std::invalid_argument("varying cone parameters out of range");
  SensitivitySpec s;
  s.kind_ = Kind::VaryingCone;
  s.dim_ = dim;
  s.r_ = r;
  s.theta_star_ = theta_star;
  s.tau_ = tau;
  s.w_ = w;
  return s;
}

double SensitivitySpec::angle_at(double z) const {
  if (kind_ == Kind::FixedCone) return theta_;
  if (z <= 1.0) return kPi;
  // C-infinity glue at z = 1, decreasing to theta_star as z -> inf
  return theta_star_ + (kPi - theta_star_) * (1.0 - std::exp(-tau_ / (z - 1.0)));
}

double SensitivitySpec::radius_at(double z) const {
  if (kind_ != Kind::VaryingBall) return r_;
  return r_min_ + (r_ - r_min_) * std::exp(-z);
}

int indicator(const SensitivitySpec& spec, const Vec& w_value,
              const Vec& offset) {
  switch (spec.kind()) {
    case SensitivitySpec::Kind::FixedBall:
      return norm(offset) <= spec.radius() ? 1 : 0;
    case SensitivitySpec::Kind::VaryingBall:
      return norm(offset) <= spec.radius_at(norm(w_value)) ? 1 : 0;
    case SensitivitySpec::Kind::FixedCone:
    case SensitivitySpec::Kind::VaryingCone: {
      double wn = norm(w_value);
      if (wn == 0.0)
        throw std::invalid_argument("cone direction undefined for w = 0");
      double rho = norm(offset);
      if (rho > spec.radius()) return 0;
      if (rho == 0.0) return 1;  // apex belongs to the closed cone
      double theta = spec.kind() == SensitivitySpec::Kind::FixedCone
                         ? spec.cone_angle()
                         : spec.angle_at(wn);
      if (theta >= kPi) return 1;  // full ball
      double ca = std::clamp(dot(offset, w_value) / (rho * wn), -1.0, 1.0);
      return std::acos(ca) <= theta ? 1 : 0;
    }
  }
  return 0;
}

double boundary_distance(const SensitivitySpec& spec, const Vec& w_value,
                         const Vec& offset) {
  switch (spec.kind()) {
    case SensitivitySpec::Kind::FixedBall:
      return std::abs(norm(offset) - spec.radius());
    case SensitivitySpec::Kind::VaryingBall:
      return std::abs(norm(offset) - spec.radius_at(norm(w_value)));
    case SensitivitySpec::Kind::FixedCone:
    case SensitivitySpec::Kind::VaryingCone: {
      double wn = norm(w_value);
      if (wn == 0.0)
        throw std::invalid_argument("cone direction undefined for w = 0");
      double theta = spec.kind() == SensitivitySpec::Kind::FixedCone
                         ? spec.cone_angle()
                         : spec.angle_at(wn);
      if (theta >= kPi)  // boundary is the sphere
        return std::abs(norm(offset) - spec.radius());
      Meridian m = meridian(offset, w_value);
      return dist_cone_boundary(m.t, m.s, spec.radius(), theta);
    }
  }
  return 0.0;
}

double theta_distance(const SensitivitySpec& spec, const Vec& w_value,
                      const Vec& offset) {
  double d = boundary_distance(spec, w_value, offset);
  if (spec.kind() == SensitivitySpec::Kind::VaryingCone) {
    double wn = norm(w_value);
    if (wn > 0.5 && wn < 1.0) {
      // extra segment R(w) = [a,b] on the axis, a = -r, b = 2r(|w|-1) <= 0
      Meridian m = meridian(offset, w_value);
      double a = -spec.radius();
      double b = 2.0 * spec.radius() * (wn - 1.0);
      double dt = std::max({0.0, a - m.t, m.t - b});
      d = std::min(d, std::hypot(dt, m.s));
    }
  }
  return d;
}

int theta_enlarged_indicator(const SensitivitySpec& spec, const Vec& w_value,
                             const Vec& offset, double u) {
  if (!(u >= 0.0)) throw std::invalid_argument("enlargement radius must be >= 0");
  return theta_distance(spec, w_value, offset) <= u ? 1 : 0;
}

double mollified_indicator_spatial(const SensitivitySpec& spec, double eps,
                                   int nodes, const Vec& w_value,
                                   const Vec& offset) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  QuadRule q = bump_rule(nodes);
  const int d = offset.d;
  // tensor loop over nodes^d shifts
  int total = 1;
  for (int i = 0; i < d; ++i) total *= nodes;
  double acc = 0.0;
  for (int k = 0; k < total; ++k) {
    int idx = k;
    double wt = 1.0;
    Vec y = offset;
    for (int i = 0; i < d; ++i) {
      int j = idx % nodes;
      idx /= nodes;
      wt *= q.weights[j];
      y[i] -= eps * q.nodes[j];
    }
    acc += wt * indicator(spec, w_value, y);
  }
  // The exact convolution lies in [0,1]; the per-axis weight products can
  // overshoot by a few ulps, so clamp.
  return std::min(1.0, std::max(0.0, acc));
}

double mollified_indicator(const SensitivitySpec& spec,
                           const MollificationParams& mp, const Vec& w_value,
                           const Vec& offset) {
  if (!(mp.eps > 0.0 && mp.eta > 0.0))
    throw std::invalid_argument("eps, eta must be > 0");
  QuadRule q = bump_rule(mp.nodes);
  const int dw = w_value.d;
  int total = 1;
  for (int i = 0; i < dw; ++i) total *= mp.nodes;
  double acc = 0.0;
  for (int k = 0; k < total; ++k) {
    int idx = k;
    double wt = 1.0;
    Vec wp = w_value;
    for (int i = 0; i < dw; ++i) {
      int j = idx % mp.nodes;
      idx /= mp.nodes;
      wt *= q.weights[j];
      wp[i] -= mp.eta * q.nodes[j];
    }
    acc += wt * mollified_indicator_spatial(spec, mp.eps, mp.nodes, wp, offset);
  }
  return std::min(1.0, std::max(0.0, acc));
}

std::pair<double, double> symmetric_difference_measure(
    const SensitivitySpec& spec, const Vec& w1, const Vec& w2, int mc_samples,
    RngStream& rng) {
  if (mc_samples < 1000)
    throw std::invalid_argument("symmetric_difference_measure: need >= 1e3 samples");
  const int d = spec.dim();
  double r = spec.radius();
  double vol_unit = (d == 1) ? 2.0 : (d == 2) ? kPi : 4.0 * kPi / 3.0;
  double vol = vol_unit * std::pow(r, d);
  long hits = 0;
  for (int k = 0; k < mc_samples; ++k) {
    Vec z = r * rng.uniform_in_unit_ball(d);
    if (indicator(spec, w1, z) != indicator(spec, w2, z)) ++hits;
  }
  double p = static_cast<double>(hits) / mc_samples;
  double est = p * vol;
  double se = vol * std::sqrt(p * (1.0 - p) / mc_samples);
  return {est, se};
}

bool rope_inequality_check(const SensitivitySpec& spec, const Vec& w_value,
                           const Vec& x1, const Vec& y1, const Vec& x2,
                           const Vec& y2) {
  Vec z1 = y1 - x1;
  Vec z2 = y2 - x2;
  int lhs = std::abs(indicator(spec, w_value, z1) - indicator(spec, w_value, z2));
  double bd = boundary_distance(spec, w_value, z1);
  int rhs = (bd <= 2.0 * dist(x1, x2) ? 1 : 0) + (bd <= 2.0 * dist(y1, y2) ? 1 : 0);
  return lhs <= rhs;
}

}  // namespace mf
