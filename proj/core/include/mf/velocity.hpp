#pragma once

#include <vector>

#include "mf/grid_density.hpp"
#include "mf/kernel.hpp"
#include "mf/sensitivity.hpp"
#include "mf/vec.hpp"

namespace mf {

// Nonlocal velocity field V[mu](x) = int grad(phi)(x-y) 1_{K(w(x))}(y-x) mu(dy)
// for empirical measures (particle positions) and grid densities.
//
// Summation order is ascending particle / cell index everywhere; the
// binned path skips only terms whose indicator is exactly zero, so it
// reproduces the naive sum bit for bit.

// (1/N) sum_j grad(phi)(x - X_j) 1_{K(w(x))}(X_j - x), ascending j.
Vec velocity_empirical(const Vec& x, const Cloud& cloud,
                       const SensitivitySpec& sens, const KernelSpec& kernel);

/// Spatial hash over a particle snapshot; built once, shared read-only.
class BinIndex {
 public:
  BinIndex(const Cloud& cloud, double bin_width);

  double bin_width() const { return w_; }
  // Indices of all particles in the 3^d neighborhood of x's bin,
  // ascending. Superset of every particle within bin_width of x.
  void candidates(const Vec& x, std::vector<size_t>& out) const;

 private:
  double w_;
  int dim_;
  Vec lo_;
  std::array<int, 3> n_{1, 1, 1};
  std::vector<std::vector<size_t>> bins_;
};

// Exactly velocity_empirical, accelerated by binning. Requires
// bin_width >= sensitivity radius so the candidate set is a superset of
// K's support.
Vec velocity_empirical_binned(const Vec& x, const Cloud& cloud,
                              const SensitivitySpec& sens,
                              const KernelSpec& kernel, const BinIndex& bins);

Vec velocity_empirical_binned(const Vec& x, const Cloud& cloud,
                              const SensitivitySpec& sens,
                              const KernelSpec& kernel, double bin_width);

// Midpoint-rule quadrature over grid cells:
// sum_c grad(phi)(x - y_c) 1_{K(w(x))}(y_c - x) rho_c vol_c, ascending
// flat cell index (cells with zero indicator contribute nothing).
Vec velocity_from_density(const Vec& x, const GridDensity& rho,
                          const SensitivitySpec& sens,
                          const KernelSpec& kernel);

}  // namespace mf
