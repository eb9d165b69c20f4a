#include "mf/transport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace mf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimum-cost perfect assignment on a dense n x n cost function by
// shortest augmenting paths with dual potentials (Jonker-Volgenant
// class, O(n^3)). Returns the column matched to each row.
template <class Cost>
std::vector<int> min_cost_assignment(int n, const Cost& c) {
  // 1-based with a virtual 0 row/column, the classical potentials scheme
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

// Hopcroft-Karp maximum matching restricted to edges with cost <= thr.
// Returns true iff a perfect matching exists.
bool perfect_matching_under(const CostMatrix& c, double thr) {
  const int n = c.n();
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (c(i, j) <= thr) adj[i].push_back(j);
  const int kNil = -1;
  std::vector<int> match_l(n, kNil), match_r(n, kNil), dist(n, 0);
  auto bfs = [&]() {
    std::queue<int> q;
    bool found = false;
    for (int i = 0; i < n; ++i) {
      if (match_l[i] == kNil) {
        dist[i] = 0;
        q.push(i);
      } else {
        dist[i] = -1;
      }
    }
    while (!q.empty()) {
      int i = q.front();
      q.pop();
      for (int j : adj[i]) {
        int i2 = match_r[j];
        if (i2 == kNil) {
          found = true;
        } else if (dist[i2] == -1) {
          dist[i2] = dist[i] + 1;
          q.push(i2);
        }
      }
    }
    return found;
  };
  std::function<bool(int)> dfs = [&](int i) {
    for (int j : adj[i]) {
      int i2 = match_r[j];
      if (i2 == kNil || (dist[i2] == dist[i] + 1 && dfs(i2))) {
        match_l[i] = j;
        match_r[j] = i;
        return true;
      }
    }
    dist[i] = -1;
    return false;
  };
  int matched = 0;
  while (bfs()) {
    for (int i = 0; i < n; ++i)
      if (match_l[i] == kNil && dfs(i)) ++matched;
  }
  return matched == n;
}
}  // namespace

CostMatrix::CostMatrix(const Cloud& a, const Cloud& b)
    : n_(static_cast<int>(a.size())) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("CostMatrix: clouds must have equal size >= 1");
  c_.resize(static_cast<size_t>(n_) * n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      c_[static_cast<size_t>(i) * n_ + j] = dist(a[i], b[j]);
}

double wasserstein_p(const Cloud& a, const Cloud& b, double p) {
  if (p < 1.0) throw std::invalid_argument("wasserstein_p: p must be >= 1");
  CostMatrix c(a, b);
  const int n = c.n();
  // assignment on the p-th powers; distances themselves for p = 1
  std::vector<int> match =
      p == 1.0 ? min_cost_assignment(n, c)
               : min_cost_assignment(n, [&](int i, int j) {
                   return std::pow(c(i, j), p);
                 });
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += std::pow(c(i, match[i]), p);
  return std::pow(total / n, 1.0 / p);
}

double wasserstein_inf(const Cloud& a, const Cloud& b) {
  CostMatrix c(a, b);
  const int n = c.n();
  std::vector<double> costs;
  costs.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) costs.push_back(c(i, j));
  std::sort(costs.begin(), costs.end());
  costs.erase(std::unique(costs.begin(), costs.end()), costs.end());
  size_t lo = 0, hi = costs.size() - 1;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    if (perfect_matching_under(c, costs[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return costs[lo];
}

Cloud sample_density(const GridDensity& rho, int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_density: n must be >= 1");
  double total = rho.mass();
  if (!(total > 0.0))
    throw std::invalid_argument("sample_density: density mass must be > 0");
  std::vector<double> cum(rho.size());
  double acc = 0.0;
  for (size_t i = 0; i < rho.size(); ++i) {
    acc += rho[i];
    cum[i] = acc;
  }
  const int d = rho.dim();
  Cloud out;
  out.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    double u = rng.uniform() * acc;
    size_t cell = static_cast<size_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
    if (cell >= rho.size()) cell = rho.size() - 1;
    std::array<int, 3> idx = rho.multi_index(cell);
    Vec x(d);
    for (int a = 0; a < d; ++a) {
      double lo = rho.lo()[a] + idx[a] * rho.spacing(a);
      x[a] = lo + rng.uniform() * rho.spacing(a);
    }
    out.push_back(x);
  }
  return out;
}

std::pair<double, double> estimate_wp_cloud_vs_density(const Cloud& cloud,
                                                       const GridDensity& rho,
                                                       double p, int replicas,
                                                       RngStream& rng) {
  if (replicas < 1)
    throw std::invalid_argument("estimate_wp_cloud_vs_density: replicas >= 1");
  RngStream base = rng.derive(stream::kSampling);
  std::vector<double> vals(static_cast<size_t>(replicas));
  for (int r = 0; r < replicas; ++r) {
    RngStream sr = base.derive(static_cast<uint64_t>(r) + 1);
    Cloud sample = sample_density(rho, static_cast<int>(cloud.size()), sr);
    vals[r] = wasserstein_p(cloud, sample, p);
  }
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= replicas;
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  double se = replicas > 1
                  ? std::sqrt(var / (replicas - 1)) / std::sqrt(double(replicas))
                  : 0.0;
  return {mean, se};
}

}  // namespace mf
