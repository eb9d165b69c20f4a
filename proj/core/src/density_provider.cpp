#include "mf/density_provider.hpp"

#include <cmath>
#include <stdexcept>

namespace mf {

DensityProvider::DensityProvider(std::vector<GridDensity> snapshots)
    : snaps_(std::move(snapshots)) {
  if (snaps_.empty())
    throw std::invalid_argument("DensityProvider: no snapshots");
  for (size_t i = 1; i < snaps_.size(); ++i) {
    if (!(snaps_[i].time() > snaps_[i - 1].time()))
      throw std::invalid_argument("DensityProvider: times must increase");
    if (snaps_[i].size() != snaps_[0].size())
      throw std::invalid_argument("DensityProvider: grid shape mismatch");
  }
}

bool DensityProvider::covers(double t) const {
  const double slack = 1e-9 * (t_max() - t_min() + 1.0);
  return t >= t_min() - slack && t <= t_max() + slack;
}

double DensityProvider::t_min() const { return snaps_.front().time(); }
double DensityProvider::t_max() const { return snaps_.back().time(); }

GridDensity DensityProvider::at(double t) const {
  if (!covers(t))
    throw std::runtime_error("DensityProvider: time not covered");
  if (t <= t_min()) return snaps_.front();
  if (t >= t_max()) return snaps_.back();
  size_t k = 1;
  while (snaps_[k].time() < t) ++k;
  const GridDensity& a = snaps_[k - 1];
  const GridDensity& b = snaps_[k];
  double u = (t - a.time()) / (b.time() - a.time());
  GridDensity out = a;
  out.set_time(t);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - u) * a[i] + u * b[i];
  return out;
}

}  // namespace mf
