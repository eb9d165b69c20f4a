#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mf/density_provider.hpp"
#include "mf/geometry.hpp"
#include "mf/kernel.hpp"
#include "mf/rng.hpp"
#include "mf/sensitivity.hpp"
#include "mf/vec.hpp"

namespace mf {

struct InitialLaw {
  enum class Kind { UniformOnDomain, TruncatedGaussian, UserCloud };
  Kind kind = Kind::UniformOnDomain;
  Vec mean;          // TruncatedGaussian
  double stddev = 1.0;
  Cloud user_cloud;  // UserCloud

  static InitialLaw uniform() { return {}; }
  static InitialLaw truncated_gaussian(Vec mean, double stddev) {
    InitialLaw l;
    l.kind = Kind::TruncatedGaussian;
    l.mean = mean;
    l.stddev = stddev;
    return l;
  }
  static InitialLaw user(Cloud c) {
    InitialLaw l;
    l.kind = Kind::UserCloud;
    l.user_cloud = std::move(c);
    return l;
  }
};

struct SimConfig {
  int N = 1;
  double dt = 1e-3;
  double T = 1.0;
  double sigma = 0.0;
  uint64_t seed = 0;
  DomainSpec domain;
  SensitivitySpec sensitivity;
  KernelSpec kernel;
  InitialLaw initial;
  std::vector<double> snapshot_times;

  void validate() const;  // dt > 0, T >= dt, snapshots on the dt grid
};

/// N particle positions in the closed domain plus per-particle reflection
/// ledgers and the per-particle noise stream ids (carried with the
/// particle so that permuting particles permutes trajectories exactly).
struct ParticleCloud {
  Cloud positions;
  std::vector<ReflectionLedger> ledgers;
  std::vector<uint64_t> stream_ids;
  double time = 0.0;
  uint64_t step_index = 0;

  int size() const { return static_cast<int>(positions.size()); }
};

// N i.i.d. draws from the configured initial law, ledgers zeroed,
// stream ids 0..N-1.
ParticleCloud init_cloud(const SimConfig& cfg, RngStream& rng);

// One explicit Euler step of the interacting system: all drifts are
// evaluated from the pre-step cloud (Jacobi update), then each particle
// takes a reflected step with its own counter-derived Gaussian increment.
ParticleCloud step_interacting(const ParticleCloud& cloud,
                               const SimConfig& cfg);

// One step of the McKean surrogate: drift from the PDE density at the
// current time; particles never interact with each other.
ParticleCloud step_mckean(const ParticleCloud& cloud,
                          const DensityProvider& provider,
                          const SimConfig& cfg);

// Gaussian increment used by particle `stream_id` at step `step_index`.
// Exposed so both systems of a coupled run draw identical noise.
Vec particle_noise(const SimConfig& cfg, uint64_t stream_id,
                   uint64_t step_index, int d);

/// Interacting + McKean pair advanced with identical Brownian increments
/// and identical initial positions (the coupling of the chaos estimate).
struct CoupledRun {
  ParticleCloud interacting;
  ParticleCloud mckean;

  double sup_difference() const;
};

CoupledRun make_coupled(const SimConfig& cfg, RngStream& rng);

// One dt step of both systems with the same per-particle increments.
CoupledRun advance_coupled(const CoupledRun& run, const SimConfig& cfg,
                           const DensityProvider& provider);

}  // namespace mf
