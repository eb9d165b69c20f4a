#include "mf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mf/velocity.hpp"

namespace mf {

namespace {

// Two-sided 97.5% Student-t quantiles by degrees of freedom (dof >= 30
// treated as normal).
double t_quantile_975(int dof) {
  static const double q[] = {0.0,    12.706, 4.303, 3.182, 2.776, 2.571,
                             2.447,  2.365,  2.306, 2.262, 2.228, 2.201,
                             2.179,  2.160,  2.145, 2.131, 2.120, 2.110,
                             2.101,  2.093,  2.086, 2.080, 2.074, 2.069,
                             2.064,  2.060,  2.056, 2.052, 2.048, 2.045};
  if (dof < 1) throw std::invalid_argument("t_quantile_975: dof >= 1");
  if (dof < 30) return q[dof];
  return 1.96;
}

// Cumulative mass over cells for atomic sampling on cell centers.
std::vector<double> cell_cumulative(const GridDensity& rho) {
  std::vector<double> cum(rho.size());
  double acc = 0.0;
  for (size_t i = 0; i < rho.size(); ++i) {
    acc += rho[i];
    cum[i] = acc;
  }
  if (!(acc > 0.0))
    throw std::invalid_argument("lln: density mass must be > 0");
  return cum;
}

size_t draw_cell(const std::vector<double>& cum, RngStream& rng) {
  double u = rng.uniform() * cum.back();
  size_t c = static_cast<size_t>(
      std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
  return std::min(c, cum.size() - 1);
}

// Row statistic (mean of X^{2m})^{1/(2m)} with a delta-method standard
// error, from per-replica sup values.
void moment_root_stat(const std::vector<double>& sups, int m, double* mean,
                      double* se) {
  const double n = static_cast<double>(sups.size());
  const double pw = 2.0 * m;
  double s = 0.0;
  for (double x : sups) s += std::pow(x, pw);
  double avg = s / n;
  double var = 0.0;
  for (double x : sups) {
    double d = std::pow(x, pw) - avg;
    var += d * d;
  }
  double se_avg = sups.size() > 1 ? std::sqrt(var / (n - 1.0)) / std::sqrt(n)
                                  : 0.0;
  *mean = std::pow(avg, 1.0 / pw);
  *se = avg > 0.0 ? se_avg * (1.0 / pw) * std::pow(avg, 1.0 / pw - 1.0) : 0.0;
}

void fit_table(RateTable* table) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : table->rows)
    pts.emplace_back(static_cast<double>(r.N), r.mean);
  bool positive = true;
  for (const auto& p : pts)
    if (!(p.second > 0.0)) positive = false;
  if (pts.size() >= 4 && positive) table->fit = fit_loglog_slope(pts);
}

void check_lln_pre(const LlnConfig& cfg) {
  if (cfg.m < 1) throw std::invalid_argument("lln: m must be >= 1");
  if (cfg.M < 1) throw std::invalid_argument("lln: M must be >= 1");
  if (cfg.Ns.empty()) throw std::invalid_argument("lln: empty N list");
  const int nmin = 4 * cfg.m * cfg.m;  // N >= (2m)^2
  for (size_t i = 0; i < cfg.Ns.size(); ++i) {
    if (cfg.Ns[i] < nmin)
      throw std::invalid_argument("lln: N below (2m)^2");
    if (i > 0 && cfg.Ns[i] <= cfg.Ns[i - 1])
      throw std::invalid_argument("lln: N list must be strictly increasing");
  }
  if (cfg.rho.size() == 0)
    throw std::invalid_argument("lln: density not set");
}

}  // namespace

void RateTable::validate() const {
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].M < 30)
      throw std::invalid_argument("RateTable: M must be >= 30 per row");
    if (i > 0 && rows[i].N <= rows[i - 1].N)
      throw std::invalid_argument("RateTable: N must be strictly increasing");
  }
}

double lln_constant(int m) {
  if (m < 1) throw std::invalid_argument("lln_constant: m must be >= 1");
  double fact = 1.0;
  for (int k = 2; k <= 2 * m; ++k) fact *= k;
  return std::pow(fact, 1.0 / (2.0 * m)) * std::sqrt(8.0 * m) +
         8.0 * std::exp(2.0 * m);
}

double theoretical_bound(const TheoreticalRate& tr, double N) {
  if (tr.m < 1) throw std::invalid_argument("theoretical_bound: m >= 1");
  if (tr.p < 1.0)
    throw std::invalid_argument("theoretical_bound: p must be >= 1");
  if (!(tr.q > tr.p))
    throw std::invalid_argument("theoretical_bound: q must exceed p");
  if (N < 4.0 * tr.m * tr.m)
    throw std::invalid_argument("theoretical_bound: N below (2m)^2");
  const double d = static_cast<double>(tr.d);
  const double moment_term = std::pow(N, -(tr.q - tr.p) / (tr.q * tr.p));
  double branch;
  if (2.0 * tr.p > d) {
    if (tr.q == 2.0 * tr.p)
      throw std::invalid_argument("theoretical_bound: branch requires q != 2p");
    branch = std::pow(N, -1.0 / (2.0 * tr.p)) + moment_term;
  } else if (2.0 * tr.p == d) {
    branch = std::pow(N, -1.0 / (2.0 * tr.p)) * std::log(1.0 + N) + moment_term;
  } else {
    if (tr.q == d / (d - tr.p))
      throw std::invalid_argument(
          "theoretical_bound: branch requires q != d/(d-p)");
    branch = std::pow(N, -1.0 / d) + moment_term;
  }
  const double universal =
      std::pow(N, -0.5 + 1.0 / (2.0 * tr.m));
  return lln_constant(tr.m) * universal + branch;
}

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& rows) {
  const size_t n = rows.size();
  if (n < 4) throw std::invalid_argument("fit_loglog_slope: need >= 4 rows");
  std::vector<double> x(n), y(n);
  for (size_t i = 0; i < n; ++i) {
    if (!(rows[i].second > 0.0))
      throw std::invalid_argument("fit_loglog_slope: means must be > 0");
    x[i] = std::log(rows[i].first);
    y[i] = std::log(rows[i].second);
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("fit_loglog_slope: degenerate N values");
  double slope = sxy / sxx;
  double intercept = my - slope * mx;
  double rss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double r = y[i] - intercept - slope * x[i];
    rss += r * r;
  }
  double se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  return SlopeFit{slope, t_quantile_975(static_cast<int>(n) - 2) * se};
}

RateTable run_lln_velocity(const LlnConfig& cfg, uint64_t seed) {
  check_lln_pre(cfg);
  const GridDensity& rho = cfg.rho;
  std::vector<double> cum = cell_cumulative(rho);
  // exact reference velocity at every cell center, computed once
  std::vector<Vec> vref(rho.size());
  for (size_t c = 0; c < rho.size(); ++c)
    vref[c] = velocity_from_density(rho.cell_center(c), rho, cfg.sensitivity,
                                    cfg.kernel);
  RateTable table;
  table.theory_exponent = -0.5 + 1.0 / (2.0 * cfg.m);
  for (int N : cfg.Ns) {
    std::vector<double> sups(static_cast<size_t>(cfg.M));
    for (int r = 0; r < cfg.M; ++r) {
      RngStream rng(seed, stream::kReplica,
                    (static_cast<uint64_t>(N) << 32) | static_cast<uint64_t>(r));
      std::vector<size_t> cells(static_cast<size_t>(N));
      Cloud pts(static_cast<size_t>(N));
      for (int i = 0; i < N; ++i) {
        cells[i] = draw_cell(cum, rng);
        pts[i] = rho.cell_center(cells[i]);
      }
      double sup = 0.0;
      for (int i = 0; i < N; ++i) {
        Vec vemp =
            velocity_empirical(pts[i], pts, cfg.sensitivity, cfg.kernel);
        sup = std::max(sup, norm(vemp - vref[cells[i]]));
      }
      sups[r] = sup;
    }
    RateRow row;
    row.N = N;
    row.M = cfg.M;
    moment_root_stat(sups, cfg.m, &row.mean, &row.std_error);
    // Per-row bound:
    // ||grad phi||_inf ((2m)!)^{1/(2m)} sqrt(8m) N^{-1/2+1/(2m)}.
    double fact = 1.0;
    for (int k = 2; k <= 2 * cfg.m; ++k) fact *= k;
    row.theory = cfg.kernel.sup_norm() *
                 std::pow(fact, 1.0 / (2.0 * cfg.m)) *
                 std::sqrt(8.0 * cfg.m) *
                 std::pow(static_cast<double>(N), -0.5 + 1.0 / (2.0 * cfg.m));
    table.rows.push_back(row);
  }
  fit_table(&table);
  return table;
}

RateTable run_lln_theta(const LlnConfig& cfg, uint64_t seed) {
  check_lln_pre(cfg);
  if (cfg.u_points < 2)
    throw std::invalid_argument("run_lln_theta: u_points must be >= 2");
  const GridDensity& rho = cfg.rho;
  const int d = rho.dim();
  std::vector<double> cum = cell_cumulative(rho);
  const double mass = cum.back();
  double u_max = cfg.u_max;
  if (u_max <= 0.0) u_max = dist(rho.lo(), rho.hi());
  const int nu = cfg.u_points;
  const double du = u_max / (nu - 1);

  // Distances to the generalized boundary depend only on the lattice
  // offset when the orientation field is constant (and always for the
  // fixed ball): precompute them on the offset lattice.
  const bool offset_only =
      cfg.sensitivity.kind() == SensitivitySpec::Kind::FixedBall ||
      cfg.sensitivity.w_field().kind == OrientationField::Kind::Constant;
  if (!offset_only)
    throw std::invalid_argument(
        "run_lln_theta: requires a constant orientation field");
  Vec w = cfg.sensitivity.w_at(rho.cell_center(size_t{0}));
  std::array<int, 3> n{rho.cells(0), d > 1 ? rho.cells(1) : 1,
                       d > 2 ? rho.cells(2) : 1};
  std::array<int, 3> span{2 * n[0] - 1, 2 * n[1] - 1, 2 * n[2] - 1};
  size_t tsize = 1;
  for (int a = 0; a < d; ++a) tsize *= static_cast<size_t>(span[a]);
  // bucket index (distance quantized to the u grid: bucket b means
  // u_k >= distance iff k >= b)
  std::vector<int> bucket(tsize);
  {
    std::array<int, 3> o{0, 0, 0};
    for (o[2] = -(n[2] - 1); o[2] <= (d > 2 ? n[2] - 1 : 0); ++o[2])
      for (o[1] = -(n[1] - 1); o[1] <= (d > 1 ? n[1] - 1 : 0); ++o[1])
        for (o[0] = -(n[0] - 1); o[0] <= n[0] - 1; ++o[0]) {
          Vec off(d);
          for (int a = 0; a < d; ++a) off[a] = o[a] * rho.spacing(a);
          double dist_theta = theta_distance(cfg.sensitivity, w, off);
          size_t f = 0;
          for (int a = d - 1; a >= 0; --a)
            f = f * static_cast<size_t>(span[a]) +
                static_cast<size_t>(o[a] + n[a] - 1);
          int b = static_cast<int>(std::ceil(dist_theta / du - 1e-12));
          bucket[f] = std::min(b, nu);  // nu = "beyond the grid"
        }
  }
  auto offset_flat = [&](const std::array<int, 3>& ci,
                         const std::array<int, 3>& cj) {
    size_t f = 0;
    for (int a = d - 1; a >= 0; --a)
      f = f * static_cast<size_t>(span[a]) +
          static_cast<size_t>(cj[a] - ci[a] + n[a] - 1);
    return f;
  };

  // Exact reference CDF per cell: F[c][k] = rho-mass of
  // { y : dist(y - y_c, Theta) <= u_k } over the atomic cell-center law.
  std::vector<std::vector<double>> F(rho.size(),
                                     std::vector<double>(nu, 0.0));
  for (size_t ci = 0; ci < rho.size(); ++ci) {
    std::array<int, 3> mi = rho.multi_index(ci);
    std::vector<double> hist(nu + 1, 0.0);
    for (size_t cj = 0; cj < rho.size(); ++cj) {
      if (rho[cj] == 0.0) continue;
      hist[bucket[offset_flat(mi, rho.multi_index(cj))]] += rho[cj];
    }
    double acc = 0.0;
    for (int k = 0; k < nu; ++k) {
      acc += hist[k];
      F[ci][k] = acc / mass;
    }
  }

  RateTable table;
  table.theory_exponent = -0.5 + 1.0 / (2.0 * cfg.m);
  for (int N : cfg.Ns) {
    std::vector<double> sups(static_cast<size_t>(cfg.M));
    for (int r = 0; r < cfg.M; ++r) {
      RngStream rng(seed, stream::kReplica,
                    (static_cast<uint64_t>(N) << 32) | static_cast<uint64_t>(r));
      std::vector<size_t> cells(static_cast<size_t>(N));
      std::vector<std::array<int, 3>> midx(static_cast<size_t>(N));
      for (int i = 0; i < N; ++i) {
        cells[i] = draw_cell(cum, rng);
        midx[i] = rho.multi_index(cells[i]);
      }
      double sup = 0.0;
      std::vector<int> hist(nu + 1, 0);
      for (int i = 0; i < N; ++i) {
        std::fill(hist.begin(), hist.end(), 0);
        for (int j = 0; j < N; ++j)
          ++hist[bucket[offset_flat(midx[i], midx[j])]];
        int acc = 0;
        const std::vector<double>& Fi = F[cells[i]];
        for (int k = 0; k < nu; ++k) {
          acc += hist[k];
          double diff = std::abs(static_cast<double>(acc) / N - Fi[k]);
          sup = std::max(sup, diff);
        }
      }
      sups[r] = sup;
    }
    RateRow row;
    row.N = N;
    row.M = cfg.M;
    moment_root_stat(sups, cfg.m, &row.mean, &row.std_error);
    row.theory = 8.0 * std::exp(2.0 * cfg.m) *
                 std::pow(static_cast<double>(N), -0.5 + 1.0 / (2.0 * cfg.m));
    table.rows.push_back(row);
  }
  fit_table(&table);
  return table;
}

StabilityReport run_stability(const StabilityConfig& cfg,
                              const DensityProvider& provider) {
  SimConfig sim = cfg.sim;
  sim.validate();
  const int d = sim.domain.dim();
  Vec dir = cfg.offset_direction.d == d ? cfg.offset_direction : Vec::zero(d);
  if (norm(dir) < 1e-12) {
    dir = Vec::zero(d);
    dir[0] = 1.0;
  }
  dir = normalized(dir);

  StabilityReport report;
  const uint64_t steps = static_cast<uint64_t>(std::llround(sim.T / sim.dt));
  for (double delta : cfg.deltas) {
    RngStream rng(sim.seed, stream::kReplica, 0);
    ParticleCloud y1 = init_cloud(sim, rng);
    ParticleCloud y2 = y1;
    for (auto& p : y2.positions) p = project(p + delta * dir, sim.domain);
    StabilityCurve curve;
    curve.delta = delta;
    auto record = [&](const ParticleCloud& a, const ParticleCloud& b) {
      double D = 0.0;
      for (int i = 0; i < a.size(); ++i)
        D = std::max(D, dist(a.positions[i], b.positions[i]));
      curve.times.push_back(a.time);
      curve.ratio.push_back(D);
    };
    record(y1, y2);
    for (uint64_t k = 0; k < steps; ++k) {
      y1 = step_mckean(y1, provider, sim);
      y2 = step_mckean(y2, provider, sim);
      record(y1, y2);
    }
    double d0 = curve.ratio.front();
    if (d0 > 0.0) {
      for (double& x : curve.ratio) x /= d0;
      // exponential growth rate by OLS on log(ratio) vs t (ratio > 0)
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int cnt = 0;
      for (size_t k = 0; k < curve.times.size(); ++k) {
        if (!(curve.ratio[k] > 0.0)) continue;
        double t = curve.times[k], ly = std::log(curve.ratio[k]);
        sx += t;
        sy += ly;
        sxx += t * t;
        sxy += t * ly;
        ++cnt;
      }
      double denom = cnt * sxx - sx * sx;
      curve.lambda = denom > 0.0 ? (cnt * sxy - sx * sy) / denom : 0.0;
    }
    report.curves.push_back(std::move(curve));
  }
  // relative spread across positive-delta curves, max over time
  double spread = 0.0;
  size_t nt = 0;
  for (const auto& c : report.curves)
    if (c.delta > 0.0) nt = c.times.size();
  for (size_t k = 0; k < nt; ++k) {
    double lo = 0.0, hi = 0.0, sum = 0.0;
    int cnt = 0;
    for (const auto& c : report.curves) {
      if (c.delta <= 0.0) continue;
      double v = c.ratio[k];
      if (cnt == 0) lo = hi = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
      ++cnt;
    }
    if (cnt > 1 && sum > 0.0)
      spread = std::max(spread, (hi - lo) / (sum / cnt));
  }
  report.max_rel_spread = spread;
  return report;
}

RateTable run_chaos(const ChaosConfig& cfg) {
  if (cfg.Ns.empty()) throw std::invalid_argument("run_chaos: empty N list");
  if (cfg.M < 1) throw std::invalid_argument("run_chaos: M must be >= 1");
  cfg.pde.validate();
  SimConfig base = cfg.base;
  if (base.snapshot_times.empty())
    throw std::invalid_argument("run_chaos: snapshot schedule required");
  PdeResult pde = solve(cfg.pde);
  for (double t : base.snapshot_times)
    if (!pde.provider.covers(t))
      throw std::invalid_argument(
          "run_chaos: snapshot schedule not covered by the PDE solution");

  RateTable table;
  table.theory_exponent = -0.5 + 1.0 / (2.0 * cfg.theory.m);
  for (int N : cfg.Ns) {
    SimConfig sim = base;
    sim.N = N;
    std::vector<double> sups(static_cast<size_t>(cfg.M));
    for (int r = 0; r < cfg.M; ++r) {
      sim.seed = hash_u64(base.seed, stream::kReplica,
                          static_cast<uint64_t>(N), static_cast<uint64_t>(r));
      sim.validate();
      RngStream rng(sim.seed, 0, 0);
      ParticleCloud cloud = init_cloud(sim, rng);
      const uint64_t steps =
          static_cast<uint64_t>(std::llround(sim.T / sim.dt));
      double sup = 0.0;
      size_t snap = 0;
      std::vector<uint64_t> snap_steps;
      for (double t : sim.snapshot_times)
        snap_steps.push_back(static_cast<uint64_t>(std::llround(t / sim.dt)));
      std::sort(snap_steps.begin(), snap_steps.end());
      auto measure = [&](const ParticleCloud& c) {
        GridDensity rho = pde.provider.at(c.time);
        RngStream wp_rng(sim.seed, stream::kMc, c.step_index);
        auto est = estimate_wp_cloud_vs_density(c.positions, rho, cfg.p,
                                                cfg.sample_replicas, wp_rng);
        sup = std::max(sup, est.first);
      };
      for (uint64_t k = 0;; ++k) {
        while (snap < snap_steps.size() && snap_steps[snap] == k) {
          measure(cloud);
          ++snap;
        }
        if (k == steps) break;
        cloud = step_interacting(cloud, sim);
      }
      sups[r] = sup;
    }
    RateRow row;
    row.N = N;
    row.M = cfg.M;
    double mean = 0.0;
    for (double s : sups) mean += s;
    mean /= cfg.M;
    double var = 0.0;
    for (double s : sups) var += (s - mean) * (s - mean);
    row.mean = mean;
    row.std_error = cfg.M > 1 ? std::sqrt(var / (cfg.M - 1.0)) /
                                    std::sqrt(static_cast<double>(cfg.M))
                              : 0.0;
    row.theory = theoretical_bound(cfg.theory, static_cast<double>(N));
    table.rows.push_back(row);
  }
  fit_table(&table);
  return table;
}

}  // namespace mf
