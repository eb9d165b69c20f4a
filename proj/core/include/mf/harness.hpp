#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mf/particles.hpp"
#include "mf/pde.hpp"
#include "mf/transport.hpp"

namespace mf {

struct SlopeFit {
  double slope = 0.0;
  double half_width = 0.0;  // 95% confidence half-width
};

struct RateRow {
  int N = 0;
  int M = 0;          // replicas
  double mean = 0.0;  // statistic
  double std_error = 0.0;
  double theory = 0.0;  // per-row theoretical bound (0 when not applicable)
};

struct RateTable {
  std::vector<RateRow> rows;  // N strictly increasing, M >= 30
  SlopeFit fit;
  double theory_exponent = 0.0;

  void validate() const;
};

/// Exponent bookkeeping for the mean-field convergence rate: moment order
/// m, transport order p, moment-control order q, dimension d. The bound
/// combines a universal N^{-1/2+1/(2m)} term with a (d, p, q) branch.
struct TheoreticalRate {
  double p = 1.0;
  double q = 2.0;
  int d = 2;
  int m = 1;
};

// c_m = ((2m)!)^{1/(2m)} sqrt(8m) + 8 e^{2m}.
double lln_constant(int m);

// N-dependence of the convergence bound (constants from the explicit
// c_m only): c_m N^{-1/2+1/(2m)} + branch(d, p, q; N). Throws on
// N < (2m)^2, q <= p, p < 1, or a violated branch constraint.
double theoretical_bound(const TheoreticalRate& tr, double N);

// OLS fit of log(mean) on log(N); 95% half-width from the standard
// slope error (Student t). Requires >= 4 rows and positive means.
SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& rows);

/// Law-of-large-numbers sweep configuration. The reference law is the
/// atomic measure on the cells of `rho` (mass-weighted cell centers), so
/// the reference integrals are exact and the statistic is bias-free.
struct LlnConfig {
  std::vector<int> Ns;
  int M = 30;
  int m = 1;
  GridDensity rho;
  SensitivitySpec sensitivity;
  KernelSpec kernel;
  int u_points = 64;   // run_lln_theta: radius-grid size
  double u_max = 0.0;  // 0 -> diameter of rho's box
};

// Statistic: (E[ sup_i |V[rho^N](Y_i) - V[rho](Y_i)|^{2m} ])^{1/(2m)}
// per N, with the exact per-cell reference velocity.
RateTable run_lln_velocity(const LlnConfig& cfg, uint64_t seed);

// Statistic: (E[ sup_i sup_u |(rho^N - rho)(Theta^{u,+} + Y_i)|^{2m} ])^{1/(2m)}
// with sup_u on a uniform radius grid.
RateTable run_lln_theta(const LlnConfig& cfg, uint64_t seed);

struct StabilityConfig {
  SimConfig sim;
  std::vector<double> deltas;  // initial sup offsets
  Vec offset_direction;        // unit vector; default first axis
};

struct StabilityCurve {
  double delta = 0.0;
  std::vector<double> times;
  std::vector<double> ratio;  // D(t)/D(0); zeros when delta = 0
  double lambda = 0.0;        // fitted exponential rate
};

struct StabilityReport {
  std::vector<StabilityCurve> curves;
  // max over times of (max - min)/mean of D(t)/D(0) across deltas > 0
  double max_rel_spread = 0.0;
};

// Two synchronously coupled mean-field (McKean) systems offset by delta
// at t = 0, driven by the same density provider and noise.
StabilityReport run_stability(const StabilityConfig& cfg,
                              const DensityProvider& provider);

struct ChaosConfig {
  std::vector<int> Ns;
  int M = 30;
  double p = 1.0;
  PdeConfig pde;
  SimConfig base;           // N overridden per row, seed varied per replica
  int sample_replicas = 1;  // density-sampling replicas per W_p estimate
  TheoreticalRate theory;
};

// Solve the PDE once; per (N, replica) run the interacting system and
// take sup over snapshots of the estimated W_p(mu^N_t, rho_t).
RateTable run_chaos(const ChaosConfig& cfg);

}  // namespace mf
