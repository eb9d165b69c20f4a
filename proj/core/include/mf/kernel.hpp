#pragma once

#include "mf/vec.hpp"

namespace mf {

/// Interaction field grad(phi): bounded and Lipschitz on R^d, with true
/// upper bounds on the sup norm and the Lipschitz constant reported at
/// construction (and cross-checked by dense sampling).
class KernelSpec {
 public:
  enum class Kind { GaussianGrad, MorseGrad, Zero };

  // phi(x) = amplitude * exp(-|x|^2 / (2 width^2)); attractive for
  // amplitude > 0 (gradient points from x toward the interaction partner).
  static KernelSpec gaussian_grad(double amplitude, double width);

  // Smoothed Morse: phi(x) = C_r e^{-s/l_r} - C_a e^{-s/l_a} with
  // s = sqrt(|x|^2 + delta^2); delta keeps grad(phi) Lipschitz at 0.
  static KernelSpec morse_grad(double c_a, double l_a, double c_r, double l_r,
                               double delta);

  static KernelSpec zero();

  Kind kind() const { return kind_; }
  Vec grad(const Vec& x) const;

  double sup_norm() const { return sup_norm_; }
  double lipschitz() const { return lipschitz_; }

  double amplitude() const { return a_; }
  double width() const { return s_; }
  double c_a() const { return ca_; }
  double l_a() const { return la_; }
  double c_r() const { return cr_; }
  double l_r() const { return lr_; }
  double delta() const { return delta_; }

  KernelSpec() = default;  // the zero kernel

 private:
  void validate_bounds(int dim) const;  // 1e5 random probes

  Kind kind_ = Kind::Zero;
  double a_ = 0.0, s_ = 1.0;
  double ca_ = 0.0, la_ = 1.0, cr_ = 0.0, lr_ = 1.0, delta_ = 0.1;
  double sup_norm_ = 0.0;
  double lipschitz_ = 0.0;
};

}  // namespace mf
