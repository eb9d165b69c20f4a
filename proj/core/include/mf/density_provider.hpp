#pragma once

#include <utility>
#include <vector>

#include "mf/grid_density.hpp"

namespace mf {

/// Time-indexed density snapshots with linear-in-time interpolation
/// between them. Queries outside the covered interval are an error.
class DensityProvider {
 public:
  DensityProvider() = default;
  explicit DensityProvider(std::vector<GridDensity> snapshots);

  // Interpolated density at time t (snapshots must bracket t).
  GridDensity at(double t) const;
  bool covers(double t) const;
  double t_min() const;
  double t_max() const;
  const std::vector<GridDensity>& snapshots() const { return snaps_; }

 private:
  std::vector<GridDensity> snaps_;
};

}  // namespace mf
