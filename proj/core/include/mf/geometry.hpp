#pragma once

#include <vector>

#include "mf/rng.hpp"
#include "mf/vec.hpp"

namespace mf {

struct Halfspace {
  Vec normal;     // unit outward normal
  double offset;  // the halfspace is { x : <normal,x> <= offset }
};

/// Bounded convex domain: Ball, axis-aligned Box, or an intersection of
/// halfspaces. Construction validates boundedness and nonempty interior.
class DomainSpec {
 public:
  enum class Kind { Ball, Box, Halfspaces };

  static DomainSpec ball(Vec center, double radius);
  static DomainSpec box(Vec lo, Vec hi);
  static DomainSpec halfspaces(std::vector<Halfspace> hs);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double diameter() const { return diameter_; }
  // Boundary membership tolerance: 1e-9 in diameter-normalized units.
  double boundary_tol() const { return 1e-9 * diameter_; }

  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const std::vector<Halfspace>& planes() const { return planes_; }
  // A strictly interior point (used by samplers and the ray test).
  const Vec& interior_point() const { return interior_; }

  bool contains(const Vec& x, double tol = 0.0) const;
  // Signed only in the sense of "distance to the closure"; 0 inside.
  double distance_outside(const Vec& x) const;

  // Default state is an empty spec (dim 0); factories produce valid ones.
  DomainSpec() = default;

 private:
  Kind kind_ = Kind::Ball;
  int dim_ = 0;
  double diameter_ = 0.0;
  Vec center_;
  double radius_ = 0.0;
  Vec lo_, hi_;
  std::vector<Halfspace> planes_;
  Vec interior_;
};

/// Ledger of the discrete reflection increments accumulated by one
/// particle; the running total is the discrete analogue of |K^i|_t.
struct ReflectionLedger {
  double total = 0.0;
  Vec last_step;  // zero whenever the pre-projection point was admissible

  void record(const Vec& reflection) {
    last_step = reflection;
    total += norm(reflection);
  }
};

struct ReflectedStepResult {
  Vec x_new;
  Vec reflection;  // pre-projection point minus x_new
};

// Euclidean projection onto the closed domain. Closed-form for Ball/Box;
// Dykstra alternating projections (tol 1e-12, cap 1e4 iters) for
// halfspace intersections.
Vec project(const Vec& x, const DomainSpec& dom);

// Outward normal at a boundary point (within boundary_tol). At corners
// the normalized sum of active face normals is returned.
Vec outward_normal(const Vec& x, const DomainSpec& dom);

// One projected Euler-Maruyama step of the reflected SDE:
//   x_new = project(x + drift*dt + sqrt(2*sigma*dt)*noise).
ReflectedStepResult reflected_step(const Vec& x, const Vec& drift,
                                   const Vec& noise, double dt, double sigma,
                                   const DomainSpec& dom);

std::vector<Vec> sample_boundary_points(const DomainSpec& dom, int n,
                                        RngStream& rng);

// Uniform sample in the closed domain (rejection against the bounding box
// for halfspace intersections).
Vec sample_uniform(const DomainSpec& dom, RngStream& rng);

}  // namespace mf
