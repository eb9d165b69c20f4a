#pragma once

#include <functional>
#include <utility>

#include "mf/rng.hpp"
#include "mf/vec.hpp"

namespace mf {

/// Orientation field w(x): a Lipschitz vector field selecting the
/// sensitivity set K(w(x)). Built-ins cover the configs the experiments
/// use; `lip` is a reported (upper-bound) Lipschitz constant.
struct OrientationField {
  enum class Kind { Constant, Rotational, Radial };
  Kind kind = Kind::Constant;
  Vec value;           // Constant: the value itself
  double scale = 1.0;  // Rotational/Radial: w(x) = scale * R x resp. scale * x

  Vec at(const Vec& x) const;
  double lip() const;

  static OrientationField constant(Vec v) {
    return OrientationField{Kind::Constant, v, 1.0};
  }
  static OrientationField rotational(int d, double s);
  static OrientationField radial(double s) {
    return OrientationField{Kind::Radial, Vec(), s};
  }
};

/// Set-valued sensitivity map w -> K(w): fixed/varying balls and the
/// fixed/varying-angle vision cones of the model. K(w) is always closed
/// and contained in the centered ball of radius `radius()` (H1).
class SensitivitySpec {
 public:
  enum class Kind { FixedBall, VaryingBall, FixedCone, VaryingCone };

  static SensitivitySpec fixed_ball(double r, OrientationField w = {});
  // K(w) = closed ball of radius rbar(|w|), rbar(z) = rmin + (rmax-rmin)e^{-z}
  static SensitivitySpec varying_ball(double r_min, double r_max,
                                      OrientationField w = {});
  static SensitivitySpec fixed_cone(int dim, double r, double theta,
                                    OrientationField w);
  // Varying-angle cone: theta(z) = pi on [0,1], smoothly decreasing to
  // theta_star; tau controls the transition rate.
  static SensitivitySpec varying_cone(int dim, double r, double theta_star,
                                      double tau, OrientationField w);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  // (H1): K(w) is contained in the closed ball of this radius for all w.
  double radius() const { return r_; }
  double cone_angle() const { return theta_; }
  double theta_star() const { return theta_star_; }
  const OrientationField& w_field() const { return w_; }
  Vec w_at(const Vec& x) const { return w_.at(x); }

  // Angle profile of the varying cone (pi for z <= 1).
  double angle_at(double w_norm) const;
  // Radius profile of the varying ball.
  double radius_at(double w_norm) const;

  bool is_cone() const {
    return kind_ == Kind::FixedCone || kind_ == Kind::VaryingCone;
  }

 private:
  Kind kind_ = Kind::FixedBall;
  int dim_ = 2;
  double r_ = 1.0;
  double r_min_ = 0.0;
  double theta_ = 0.0;
  double theta_star_ = 0.0;
  double tau_ = 1.0;
  OrientationField w_;
};

struct MollificationParams {
  double eps = 0.1;   // spatial mollifier width
  double eta = 0.1;   // orientation mollifier width
  int nodes = 9;      // quadrature nodes per axis
};

// Sharp indicator: 1 iff offset is in K(w_value); boundary points count
// as inside (K is closed). Cone variants reject a zero w_value.
int indicator(const SensitivitySpec& spec, const Vec& w_value,
              const Vec& offset);

// Exact Euclidean distance from `offset` to the generalized boundary
// Theta(w_value) (the topological boundary, plus the segment R(w) for the
// varying cone when |w| in (1/2,1)).
double theta_distance(const SensitivitySpec& spec, const Vec& w_value,
                      const Vec& offset);

// Distance from `offset` to the topological boundary of K(w_value) itself
// (drives the eps-boundary indicator of the rope inequality).
double boundary_distance(const SensitivitySpec& spec, const Vec& w_value,
                         const Vec& offset);

// 1 iff dist(offset, Theta(w_value)) <= u, i.e. offset in Theta^{u,+}.
int theta_enlarged_indicator(const SensitivitySpec& spec, const Vec& w_value,
                             const Vec& offset, double u);

// Spatially mollified indicator 1^{eps}_{K(w)}(offset): convolution of the
// sharp indicator with a compactly supported bump of width eps, evaluated
// by tensor-product quadrature.
double mollified_indicator_spatial(const SensitivitySpec& spec, double eps,
                                   int nodes, const Vec& w_value,
                                   const Vec& offset);

// Fully mollified indicator 1^{eps,eta}: additional convolution over
// w-perturbations of width eta.
double mollified_indicator(const SensitivitySpec& spec,
                           const MollificationParams& mp, const Vec& w_value,
                           const Vec& offset);

// Monte Carlo estimate (and standard error) of |K(w1) delta K(w2)|,
// sampling uniformly on the common bounding ball.
std::pair<double, double> symmetric_difference_measure(
    const SensitivitySpec& spec, const Vec& w1, const Vec& w2, int mc_samples,
    RngStream& rng);

// Rope inequality (fixed K = K(w_value)):
//   |1_K(y1-x1) - 1_K(y2-x2)|
//     <= 1_{d^{2|x1-x2|}K}(y1-x1) + 1_{d^{2|y1-y2|}K}(y1-x1).
bool rope_inequality_check(const SensitivitySpec& spec, const Vec& w_value,
                           const Vec& x1, const Vec& y1, const Vec& x2,
                           const Vec& y2);

}  // namespace mf
