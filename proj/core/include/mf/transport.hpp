#pragma once

#include <utility>
#include <vector>

#include "mf/grid_density.hpp"
#include "mf/rng.hpp"
#include "mf/vec.hpp"

namespace mf {

/// Dense n x n Euclidean cost matrix between two equal-size clouds.
class CostMatrix {
 public:
  CostMatrix(const Cloud& a, const Cloud& b);  // throws on size mismatch

  int n() const { return n_; }
  double operator()(int i, int j) const {
    return c_[static_cast<size_t>(i) * n_ + j];
  }

 private:
  int n_;
  std::vector<double> c_;
};

// Exact W_p between equal-weight empirical measures:
//   ( (1/n) min_pi sum_i |a_i - b_pi(i)|^p )^{1/p},
// by shortest-augmenting-path minimum-cost assignment. p >= 1.
double wasserstein_p(const Cloud& a, const Cloud& b, double p);

// Exact bottleneck distance min_pi max_i |a_i - b_pi(i)| via binary
// search over the sorted distinct costs with matching feasibility tests.
double wasserstein_inf(const Cloud& a, const Cloud& b);

// n i.i.d. draws from the grid density: cell proportional to mass,
// uniform within the cell. Throws on zero mass.
Cloud sample_density(const GridDensity& rho, int n, RngStream& rng);

// Monte Carlo estimate of W_p(cloud, rho): per replica, sample |cloud|
// points from rho and solve the exact assignment. Returns (mean,
// standard error over replicas).
std::pair<double, double> estimate_wp_cloud_vs_density(const Cloud& cloud,
                                                       const GridDensity& rho,
                                                       double p, int replicas,
                                                       RngStream& rng);

}  // namespace mf
