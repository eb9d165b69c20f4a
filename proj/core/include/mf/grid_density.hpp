#pragma once

#include <array>
#include <vector>

#include "mf/geometry.hpp"
#include "mf/vec.hpp"

namespace mf {

/// Cell-averaged nonnegative density on a uniform rectilinear mesh over a
/// Box domain. Flat storage, axis 0 fastest.
class GridDensity {
 public:
  GridDensity() = default;
  GridDensity(const DomainSpec& box, std::array<int, 3> cells_per_axis,
              double time = 0.0);

  int dim() const { return dim_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  int cells(int axis) const { return n_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  size_t size() const { return values_.size(); }

  double& operator[](size_t i) { return values_[i]; }
  double operator[](size_t i) const { return values_[i]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double cell_volume() const { return cell_vol_; }
  double mass() const;
  double sup() const;

  size_t flat_index(std::array<int, 3> idx) const {
    size_t f = static_cast<size_t>(idx[dim_ - 1]);
    for (int a = dim_ - 2; a >= 0; --a)
      f = f * static_cast<size_t>(n_[a]) + static_cast<size_t>(idx[a]);
    return f;
  }
  std::array<int, 3> multi_index(size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      idx[a] = static_cast<int>(flat % static_cast<size_t>(n_[a]));
      flat /= static_cast<size_t>(n_[a]);
    }
    return idx;
  }
  Vec cell_center(std::array<int, 3> idx) const {
    Vec c(dim_);
    for (int a = 0; a < dim_; ++a) c[a] = lo_[a] + (idx[a] + 0.5) * h_[a];
    return c;
  }
  Vec cell_center(size_t flat) const { return cell_center(multi_index(flat)); }

  // Cell containing x (clamped to the grid).
  std::array<int, 3> locate(const Vec& x) const;

  // L1 distance between equal-shape grids.
  static double l1_distance(const GridDensity& a, const GridDensity& b);

  // Restriction to a coarser, exactly nested grid (cell averaging).
  GridDensity restrict_to(std::array<int, 3> coarse_cells) const;

  // Uniform density with unit mass.
  static GridDensity uniform(const DomainSpec& box,
                             std::array<int, 3> cells_per_axis);

 private:
  int dim_ = 0;
  double time_ = 0.0;
  Vec lo_, hi_;
  std::array<int, 3> n_{1, 1, 1};
  std::array<double, 3> h_{0, 0, 0};
  double cell_vol_ = 0.0;
  std::vector<double> values_;
};

}  // namespace mf
