#pragma once

#include <functional>
#include <vector>

#include "mf/density_provider.hpp"
#include "mf/geometry.hpp"
#include "mf/grid_density.hpp"
#include "mf/kernel.hpp"
#include "mf/sensitivity.hpp"

namespace mf {

struct PdeConfig {
  std::array<int, 3> cells{1, 1, 1};
  double dt = 1e-3;
  double T = 1.0;
  double sigma = 0.0;
  DomainSpec domain;  // Box only
  SensitivitySpec sensitivity;
  KernelSpec kernel;
  GridDensity initial;  // nonnegative, positive mass, on `cells` over `domain`
  std::vector<double> snapshot_times;

  // Throws on non-Box domain, bad schedule, or CFL violation:
  //   dt <= 0.4 * min( h / (2*||grad phi||_inf * mass),  h^2 / (4*d*sigma) ).
  void validate() const;
};

struct PdeResult {
  DensityProvider provider;
  double max_sup = 0.0;  // max over recorded snapshots of ||rho_t||_inf
};

// One explicit conservative finite-volume step: first-order upwind
// advection with face velocity = average of the cell-center nonlocal
// velocities on both sides projected on the face normal, centered
// diffusion, zero flux through boundary faces.
GridDensity step_fv(const GridDensity& rho, const PdeConfig& cfg);

// March from cfg.initial to T, recording snapshots at the schedule
// (always including t = 0 and t = T).
PdeResult solve(const PdeConfig& cfg);

// f(t) <= f0 / (1 - C f0 t); throws std::domain_error at or past the
// blow-up time 1/(C f0), reporting it in the message.
double linf_envelope(double rho0_sup, double C, double t);

// f(t) <= f0 e^t + C e^t * int_0^t g(s) e^{-s} ds, trapezoidal in the
// sampled g (uniform samples on [0, t]).
double gronwall_envelope_ii(double f0, double C,
                            const std::vector<double>& g_samples, double t);

}  // namespace mf
