#include "mf/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mf {

Vec velocity_empirical(const Vec& x, const Cloud& cloud,
                       const SensitivitySpec& sens, const KernelSpec& kernel) {
  if (cloud.empty())
    throw std::invalid_argument("velocity_empirical: empty cloud");
  Vec w = sens.w_at(x);
  Vec acc = Vec::zero(x.d);
  for (size_t j = 0; j < cloud.size(); ++j) {
    if (indicator(sens, w, cloud[j] - x)) acc += kernel.grad(x - cloud[j]);
  }
  return acc * (1.0 / static_cast<double>(cloud.size()));
}

BinIndex::BinIndex(const Cloud& cloud, double bin_width)
    : w_(bin_width), dim_(cloud.empty() ? 0 : cloud.front().d) {
  if (cloud.empty()) throw std::invalid_argument("BinIndex: empty cloud");
  if (!(bin_width > 0.0))
    throw std::invalid_argument("BinIndex: bin width must be > 0");
  lo_ = cloud.front();
  Vec hi = cloud.front();
  for (const auto& p : cloud)
    for (int a = 0; a < dim_; ++a) {
      lo_[a] = std::min(lo_[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  size_t total = 1;
  for (int a = 0; a < dim_; ++a) {
    n_[a] = std::max(1, static_cast<int>(std::floor((hi[a] - lo_[a]) / w_)) + 1);
    total *= static_cast<size_t>(n_[a]);
  }
  bins_.resize(total);
  for (size_t j = 0; j < cloud.size(); ++j) {
    size_t f = 0;
    for (int a = dim_ - 1; a >= 0; --a) {
      int i = std::clamp(static_cast<int>((cloud[j][a] - lo_[a]) / w_), 0,
                         n_[a] - 1);
      f = f * static_cast<size_t>(n_[a]) + static_cast<size_t>(i);
    }
    bins_[f].push_back(j);  // j ascending within each bin by construction
  }
}

void BinIndex::candidates(const Vec& x, std::vector<size_t>& out) const {
  out.clear();
  std::array<int, 3> c{0, 0, 0};
  for (int a = 0; a < dim_; ++a)
    c[a] = std::clamp(static_cast<int>(std::floor((x[a] - lo_[a]) / w_)), -1,
                      n_[a]);
  std::array<int, 3> i{0, 0, 0};
  auto visit = [&](auto&& self, int axis) -> void {
    if (axis == dim_) {
      size_t f = 0;
      for (int a = dim_ - 1; a >= 0; --a)
        f = f * static_cast<size_t>(n_[a]) + static_cast<size_t>(i[a]);
      const auto& b = bins_[f];
      out.insert(out.end(), b.begin(), b.end());
      return;
    }
    for (int da = -1; da <= 1; ++da) {
      int v = c[axis] + da;
      if (v < 0 || v >= n_[axis]) continue;
      i[axis] = v;
      self(self, axis + 1);
    }
  };
  visit(visit, 0);
  std::sort(out.begin(), out.end());
}

Vec velocity_empirical_binned(const Vec& x, const Cloud& cloud,
                              const SensitivitySpec& sens,
                              const KernelSpec& kernel, const BinIndex& bins) {
  if (cloud.empty())
    throw std::invalid_argument("velocity_empirical_binned: empty cloud");
  if (bins.bin_width() < sens.radius())
    throw std::invalid_argument(
        "bin width must be >= sensitivity radius (candidate superset)");
  Vec w = sens.w_at(x);
  Vec acc = Vec::zero(x.d);
  thread_local std::vector<size_t> cand;
  bins.candidates(x, cand);
  for (size_t j : cand) {
    if (indicator(sens, w, cloud[j] - x)) acc += kernel.grad(x - cloud[j]);
  }
  return acc * (1.0 / static_cast<double>(cloud.size()));
}

Vec velocity_empirical_binned(const Vec& x, const Cloud& cloud,
                              const SensitivitySpec& sens,
                              const KernelSpec& kernel, double bin_width) {
  BinIndex bins(cloud, bin_width);
  return velocity_empirical_binned(x, cloud, sens, kernel, bins);
}

Vec velocity_from_density(const Vec& x, const GridDensity& rho,
                          const SensitivitySpec& sens,
                          const KernelSpec& kernel) {
  const int d = rho.dim();
  Vec w = sens.w_at(x);
  double r = sens.radius();
  // cell-index window covering the sensitivity ball; cells outside have
  // indicator exactly 0, so the window sum equals the full-grid sum
  std::array<int, 3> lo_i{0, 0, 0}, hi_i{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    double h = rho.spacing(a);
    lo_i[a] = std::max(
        0, static_cast<int>(std::floor((x[a] - r - rho.lo()[a]) / h)) - 1);
    hi_i[a] = std::min(
        rho.cells(a) - 1,
        static_cast<int>(std::ceil((x[a] + r - rho.lo()[a]) / h)) + 1);
  }
  Vec acc = Vec::zero(d);
  double vol = rho.cell_volume();
  std::array<int, 3> idx{0, 0, 0};
  // ascending flat order: axis 0 fastest
  for (int i2 = lo_i[2]; i2 <= (d > 2 ? hi_i[2] : 0); ++i2) {
    idx[2] = i2;
    for (int i1 = lo_i[1]; i1 <= (d > 1 ? hi_i[1] : 0); ++i1) {
      idx[1] = i1;
      for (int i0 = lo_i[0]; i0 <= hi_i[0]; ++i0) {
        idx[0] = i0;
        Vec yc = rho.cell_center(idx);
        if (!indicator(sens, w, yc - x)) continue;
        double m = rho[rho.flat_index(idx)] * vol;
        if (m != 0.0) acc += m * kernel.grad(x - yc);
      }
    }
  }
  return acc;
}

}  // namespace mf
