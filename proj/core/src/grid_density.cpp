#include "mf/grid_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mf {

GridDensity::GridDensity(const DomainSpec& box, std::array<int, 3> cells,
                         double time)
    : dim_(box.dim()), time_(time), lo_(box.lo()), hi_(box.hi()), n_(cells) {
  if (box.kind() != DomainSpec::Kind::Box)
    throw std::invalid_argument("GridDensity requires a Box domain");
  size_t total = 1;
  cell_vol_ = 1.0;
  for (int a = 0; a < dim_; ++a) {
    if (n_[a] < 1) throw std::invalid_argument("cells per axis must be >= 1");
    h_[a] = (hi_[a] - lo_[a]) / n_[a];
    cell_vol_ *= h_[a];
    total *= static_cast<size_t>(n_[a]);
  }
  values_.assign(total, 0.0);
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * cell_vol_;
}

double GridDensity::sup() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, v);
  return m;
}

std::array<int, 3> GridDensity::locate(const Vec& x) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    int i = static_cast<int>(std::floor((x[a] - lo_[a]) / h_[a]));
    idx[a] = std::clamp(i, 0, n_[a] - 1);
  }
  return idx;
}

double GridDensity::l1_distance(const GridDensity& a, const GridDensity& b) {
  if (a.size() != b.size()) throw std::invalid_argument("grid shape mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * a.cell_vol_;
}

GridDensity GridDensity::restrict_to(std::array<int, 3> coarse_cells) const {
  GridDensity out;
  out.dim_ = dim_;
  out.time_ = time_;
  out.lo_ = lo_;
  out.hi_ = hi_;
  out.n_ = coarse_cells;
  size_t total = 1;
  out.cell_vol_ = 1.0;
  std::array<int, 3> ratio{1, 1, 1};
  for (int a = 0; a < dim_; ++a) {
    if (n_[a] % coarse_cells[a] != 0)
      throw std::invalid_argument("restriction requires nested grids");
    ratio[a] = n_[a] / coarse_cells[a];
    out.h_[a] = (hi_[a] - lo_[a]) / coarse_cells[a];
    out.cell_vol_ *= out.h_[a];
    total *= static_cast<size_t>(coarse_cells[a]);
  }
  out.values_.assign(total, 0.0);
  for (size_t f = 0; f < values_.size(); ++f) {
    auto idx = multi_index(f);
    std::array<int, 3> cidx{0, 0, 0};
    for (int a = 0; a < dim_; ++a) cidx[a] = idx[a] / ratio[a];
    out.values_[out.flat_index(cidx)] += values_[f];
  }
  double nsub = 1.0;
  for (int a = 0; a < dim_; ++a) nsub *= ratio[a];
  for (auto& v : out.values_) v /= nsub;  // cell average
  return out;
}

GridDensity GridDensity::uniform(const DomainSpec& box,
                                 std::array<int, 3> cells) {
  GridDensity g(box, cells);
  double vol = 1.0;
  for (int a = 0; a < g.dim_; ++a) vol *= g.hi_[a] - g.lo_[a];
  std::fill(g.values_.begin(), g.values_.end(), 1.0 / vol);
  return g;
}

}  // namespace mf
