#include "mf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mf {

namespace {

void check_finite(const Vec& x) {
  if (!is_finite(x)) throw std::invalid_argument("non-finite coordinates");
}

Vec project_halfspace(const Vec& x, const Halfspace& h) {
  double v = dot(h.normal, x) - h.offset;
  if (v <= 0.0) return x;
  return x - v * h.normal;
}

}  // namespace

DomainSpec DomainSpec::ball(Vec center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be > 0");
  check_finite(center);
  DomainSpec d;
  d.kind_ = Kind::Ball;
  d.dim_ = center.d;
  d.center_ = center;
  d.radius_ = radius;
  d.diameter_ = 2.0 * radius;
  d.interior_ = center;
  return d;
}

DomainSpec DomainSpec::box(Vec lo, Vec hi) {
  if (lo.d != hi.d) throw std::invalid_argument("box corner dim mismatch");
  check_finite(lo);
  check_finite(hi);
  for (int i = 0; i < lo.d; ++i)
    if (!(lo[i] < hi[i]))
      throw std::invalid_argument("box requires lo < hi componentwise");
  DomainSpec d;
  d.kind_ = Kind::Box;
  d.dim_ = lo.d;
  d.lo_ = lo;
  d.hi_ = hi;
  d.diameter_ = dist(lo, hi);
  d.interior_ = 0.5 * (lo + hi);
  return d;
}

DomainSpec DomainSpec::halfspaces(std::vector<Halfspace> hs) {
  if (hs.empty()) throw std::invalid_argument("empty halfspace list");
  int dim = hs.front().normal.d;
  for (auto& h : hs) {
    check_finite(h.normal);
    if (h.normal.d != dim) throw std::invalid_argument("halfspace dim mismatch");
    double n = norm(h.normal);
    if (std::abs(n - 1.0) > 1e-9)
      throw std::invalid_argument("halfspace normals must be unit vectors");
  }
  DomainSpec d;
  d.kind_ = Kind::Halfspaces;
  d.dim_ = dim;
  d.planes_ = std::move(hs);

  // Feasible point via Dykstra from the origin, then pull strictly inside
  // by averaging with a few projected perturbations.
  Vec x0 = Vec::zero(dim);
  {
    // cyclic projections to reach the intersection
    Vec x = x0;
    for (int it = 0; it < 20000; ++it) {
      Vec prev = x;
      for (const auto& h : d.planes_) x = project_halfspace(x, h);
      if (dist(prev, x) < 1e-13) break;
    }
    x0 = x;
  }
  // Sampled ray test: bounded iff every sampled direction is blocked.
  // Also yields a diameter estimate and an interior point.
  RngStream rng(0x9e3779b9u, 0xD0A1A1Du);
  double max_reach = 0.0;
  Vec centroid = Vec::zero(dim);
  const int n_dirs = 256;
  for (int k = 0; k < n_dirs; ++k) {
    Vec u = rng.uniform_direction(dim);
    double t_max = std::numeric_limits<double>::infinity();
    for (const auto& h : d.planes_) {
      double du = dot(h.normal, u);
      if (du > 1e-12) {
        double slack = h.offset - dot(h.normal, x0);
        t_max = std::min(t_max, std::max(0.0, slack) / du);
      }
    }
    if (!std::isfinite(t_max))
      throw std::invalid_argument("halfspace intersection is unbounded");
    max_reach = std::max(max_reach, t_max);
    centroid += x0 + (0.5 * t_max) * u;
  }
  centroid *= 1.0 / n_dirs;
  d.diameter_ = 2.0 * max_reach;  // upper-ish estimate, used for tolerances
  d.interior_ = centroid;
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& h : d.planes_)
    min_slack = std::min(min_slack, h.offset - dot(h.normal, centroid));
  if (!(min_slack > 1e-12 * d.diameter_))
    throw std::invalid_argument("halfspace intersection has empty interior");
  return d;
}

bool DomainSpec::contains(const Vec& x, double tol) const {
  switch (kind_) {
    case Kind::Ball:
      return dist(x, center_) <= radius_ + tol;
    case Kind::Box:
      for (int i = 0; i < dim_; ++i)
        if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
      return true;
    case Kind::Halfspaces:
      for (const auto& h : planes_)
        if (dot(h.normal, x) > h.offset + tol) return false;
      return true;
  }
  return false;
}

double DomainSpec::distance_outside(const Vec& x) const {
  return dist(x, project(x, *this));
}

Vec project(const Vec& x, const DomainSpec& dom) {
  check_finite(x);
  switch (dom.kind()) {
    case DomainSpec::Kind::Ball: {
      Vec r = x - dom.center();
      double n = norm(r);
      if (n <= dom.radius()) return x;
      return dom.center() + (dom.radius() / n) * r;
    }
    case DomainSpec::Kind::Box: {
      Vec y = x;
      for (int i = 0; i < dom.dim(); ++i)
        y[i] = std::clamp(y[i], dom.lo()[i], dom.hi()[i]);
      return y;
    }
    case DomainSpec::Kind::Halfspaces: {
      // Dykstra's algorithm: exact projection onto an intersection of
      // convex sets, unlike plain cyclic projections.
      const auto& hs = dom.planes();
      Vec y = x;
      std::vector<Vec> corr(hs.size(), Vec::zero(dom.dim()));
      for (int it = 0; it < 10000; ++it) {
        double change = 0.0;
        for (size_t k = 0; k < hs.size(); ++k) {
          Vec z = y + corr[k];
          Vec ynew = project_halfspace(z, hs[k]);
          corr[k] = z - ynew;
          change = std::max(change, dist(y, ynew));
          y = ynew;
        }
        if (change < 1e-12) break;
      }
      return y;
    }
  }
  return x;
}

Vec outward_normal(const Vec& x, const DomainSpec& dom) {
  check_finite(x);
  const double tol = dom.boundary_tol();
  switch (dom.kind()) {
    case DomainSpec::Kind::Ball: {
      Vec r = x - dom.center();
      double n = norm(r);
      if (std::abs(n - dom.radius()) > tol)
        throw std::domain_error("point is not on the ball boundary");
      return r / n;
    }
    case DomainSpec::Kind::Box: {
      Vec n = Vec::zero(dom.dim());
      bool active = false;
      for (int i = 0; i < dom.dim(); ++i) {
        if (std::abs(x[i] - dom.lo()[i]) <= tol) {
          n[i] -= 1.0;
          active = true;
        } else if (std::abs(x[i] - dom.hi()[i]) <= tol) {
          n[i] += 1.0;
          active = true;
        }
        if (x[i] < dom.lo()[i] - tol || x[i] > dom.hi()[i] + tol)
          throw std::domain_error("point is not on the box boundary");
      }
      if (!active) throw std::domain_error("point is not on the box boundary");
      return normalized(n);
    }
    case DomainSpec::Kind::Halfspaces: {
      if (!dom.contains(x, tol))
        throw std::domain_error("point is outside the domain");
      Vec n = Vec::zero(dom.dim());
      bool active = false;
      for (const auto& h : dom.planes()) {
        if (std::abs(dot(h.normal, x) - h.offset) <= tol) {
          n += h.normal;
          active = true;
        }
      }
      if (!active || norm(n) < 1e-15)
        throw std::domain_error("point is not on the boundary");
      return normalized(n);
    }
  }
  throw std::logic_error("unreachable");
}

ReflectedStepResult reflected_step(const Vec& x, const Vec& drift,
                                   const Vec& noise, double dt, double sigma,
                                   const DomainSpec& dom) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be >= 0");
  if (!dom.contains(x, 1e-12 * dom.diameter()))
    throw std::invalid_argument("reflected_step: x outside the closed domain");
  Vec pre = x + dt * drift + std::sqrt(2.0 * sigma * dt) * noise;
  ReflectedStepResult r;
  if (dom.contains(pre)) {
    r.x_new = pre;
    r.reflection = Vec::zero(x.d);
  } else {
    r.x_new = project(pre, dom);
    r.reflection = pre - r.x_new;
  }
  return r;
}

std::vector<Vec> sample_boundary_points(const DomainSpec& dom, int n,
                                        RngStream& rng) {
  if (n < 1) throw std::invalid_argument("need n >= 1 boundary points");
  std::vector<Vec> out;
  out.reserve(n);
  const int d = dom.dim();
  for (int k = 0; k < n; ++k) {
    switch (dom.kind()) {
      case DomainSpec::Kind::Ball: {
        out.push_back(dom.center() + dom.radius() * rng.uniform_direction(d));
        break;
      }
      case DomainSpec::Kind::Box: {
        // face weighted by area
        std::vector<double> areas(2 * d);
        double total = 0.0;
        for (int i = 0; i < d; ++i) {
          double a = 1.0;
          for (int j = 0; j < d; ++j)
            if (j != i) a *= dom.hi()[j] - dom.lo()[j];
          areas[2 * i] = areas[2 * i + 1] = a;
          total += 2 * a;
        }
        double u = rng.uniform() * total;
        int face = 0;
        while (face + 1 < 2 * d && u > areas[face]) {
          u -= areas[face];
          ++face;
        }
        int axis = face / 2;
        Vec p(d);
        for (int j = 0; j < d; ++j)
          p[j] = rng.uniform(dom.lo()[j], dom.hi()[j]);
        p[axis] = (face % 2 == 0) ? dom.lo()[axis] : dom.hi()[axis];
        out.push_back(p);
        break;
      }
      case DomainSpec::Kind::Halfspaces: {
        // ray from the interior point to the first blocking plane
        Vec x0 = dom.interior_point();
        Vec u = rng.uniform_direction(d);
        double t_max = std::numeric_limits<double>::infinity();
        for (const auto& h : dom.planes()) {
          double du = dot(h.normal, u);
          if (du > 1e-12)
            t_max = std::min(t_max, (h.offset - dot(h.normal, x0)) / du);
        }
        out.push_back(x0 + t_max * u);
        break;
      }
    }
  }
  return out;
}

Vec sample_uniform(const DomainSpec& dom, RngStream& rng) {
  switch (dom.kind()) {
    case DomainSpec::Kind::Ball:
      return dom.center() +
             dom.radius() * rng.uniform_in_unit_ball(dom.dim());
    case DomainSpec::Kind::Box: {
      Vec p(dom.dim());
      for (int i = 0; i < dom.dim(); ++i)
        p[i] = rng.uniform(dom.lo()[i], dom.hi()[i]);
      return p;
    }
    case DomainSpec::Kind::Halfspaces: {
      // rejection from a bounding box around the interior point
      double r = dom.diameter();
      const Vec& c = dom.interior_point();
      for (int it = 0; it < 1000000; ++it) {
        Vec p(dom.dim());
        for (int i = 0; i < dom.dim(); ++i)
          p[i] = c[i] + rng.uniform(-r, r);
        if (dom.contains(p)) return p;
      }
      throw std::runtime_error("rejection sampling failed");
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace mf
