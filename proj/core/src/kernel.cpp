#include "mf/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "mf/rng.hpp"

namespace mf {

KernelSpec KernelSpec::gaussian_grad(double amplitude, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("kernel width must be > 0");
  KernelSpec k;
  k.kind_ = Kind::GaussianGrad;
  k.a_ = amplitude;
  k.s_ = width;
  // |grad phi| = |A| rho/s^2 e^{-rho^2/2s^2}, maximal at rho = s
  k.sup_norm_ = std::abs(amplitude) / (width * std::sqrt(std::exp(1.0)));
  // Jacobian eigenvalues are c(rho) and c(rho)(1 - rho^2/s^2), |c| <= A/s^2
  k.lipschitz_ = std::abs(amplitude) / (width * width);
  k.validate_bounds(3);
  return k;
}

KernelSpec KernelSpec::morse_grad(double c_a, double l_a, double c_r,
                                  double l_r, double delta) {
  if (!(l_a > 0.0 && l_r > 0.0 && delta > 0.0))
    throw std::invalid_argument("morse kernel needs positive length scales");
  KernelSpec k;
  k.kind_ = Kind::MorseGrad;
  k.ca_ = c_a;
  k.la_ = l_a;
  k.cr_ = c_r;
  k.lr_ = l_r;
  k.delta_ = delta;
  k.sup_norm_ = std::abs(c_r) / l_r + std::abs(c_a) / l_a;
  k.lipschitz_ =
      std::abs(c_r) * (1.0 / (l_r * l_r) + 2.0 / (l_r * delta)) +
      std::abs(c_a) * (1.0 / (l_a * l_a) + 2.0 / (l_a * delta));
  k.validate_bounds(3);
  return k;
}

KernelSpec KernelSpec::zero() { return KernelSpec{}; }

Vec KernelSpec::grad(const Vec& x) const {
  switch (kind_) {
    case Kind::Zero:
      return Vec::zero(x.d);
    case Kind::GaussianGrad: {
      double c = -a_ / (s_ * s_) * std::exp(-norm2(x) / (2.0 * s_ * s_));
      return c * x;
    }
    case Kind::MorseGrad: {
      double s = std::sqrt(norm2(x) + delta_ * delta_);
      double dphids =
          -cr_ / lr_ * std::exp(-s / lr_) + ca_ / la_ * std::exp(-s / la_);
      return (dphids / s) * x;
    }
  }
  return Vec::zero(x.d);
}

void KernelSpec::validate_bounds(int dim) const {
  RngStream rng(0xB0A2B0A2u, 0x77u);
  double reach = 6.0 * std::max({s_, la_, lr_, 1.0});
  for (int k = 0; k < 100000; ++k) {
    Vec x = reach * rng.uniform_in_unit_ball(dim);
    Vec y = reach * rng.uniform_in_unit_ball(dim);
    if (norm(grad(x)) > sup_norm_ * (1.0 + 1e-12))
      throw std::logic_error("kernel sup-norm bound violated");
    double dxy = dist(x, y);
    if (dxy > 0.0 && norm(grad(x) - grad(y)) > lipschitz_ * dxy * (1.0 + 1e-9))
      throw std::logic_error("kernel Lipschitz bound violated");
  }
}

}  // namespace mf
