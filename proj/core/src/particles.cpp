#include "mf/particles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mf/velocity.hpp"

namespace mf {

namespace {
constexpr uint64_t kRejectionCap = 1000000;
// Counter stride per step: normal_vec(d) consumes 2 uniforms per
// coordinate, so 8 counters per step leave headroom for d <= 3.
constexpr uint64_t kCounterStride = 8;
}  // namespace

void SimConfig::validate() const {
  if (N < 1) throw std::invalid_argument("SimConfig: N must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
  if (!(T >= dt)) throw std::invalid_argument("SimConfig: T must be >= dt");
  if (sigma < 0.0) throw std::invalid_argument("SimConfig: sigma must be >= 0");
  for (double t : snapshot_times) {
    if (t < 0.0 || t > T * (1.0 + 1e-12))
      throw std::invalid_argument("SimConfig: snapshot time outside [0, T]");
    double k = t / dt;
    if (std::abs(k - std::round(k)) > 1e-6)
      throw std::invalid_argument(
          "SimConfig: snapshot times must be multiples of dt");
  }
  if (initial.kind == InitialLaw::Kind::UserCloud) {
    if (static_cast<int>(initial.user_cloud.size()) != N)
      throw std::invalid_argument("SimConfig: user cloud size != N");
    for (const auto& p : initial.user_cloud)
      if (!domain.contains(p, domain.boundary_tol()))
        throw std::invalid_argument("SimConfig: user cloud point outside domain");
  }
}

ParticleCloud init_cloud(const SimConfig& cfg, RngStream& rng) {
  cfg.validate();
  ParticleCloud cloud;
  cloud.positions.reserve(static_cast<size_t>(cfg.N));
  const int d = cfg.domain.dim();
  RngStream init = rng.derive(stream::kInitial);
  switch (cfg.initial.kind) {
    case InitialLaw::Kind::UniformOnDomain:
      for (int i = 0; i < cfg.N; ++i)
        cloud.positions.push_back(sample_uniform(cfg.domain, init));
      break;
    case InitialLaw::Kind::TruncatedGaussian:
      for (int i = 0; i < cfg.N; ++i) {
        uint64_t tries = 0;
        while (true) {
          if (++tries > kRejectionCap)
            throw std::invalid_argument(
                "init_cloud: truncated-gaussian rejection cap exceeded");
          Vec x = cfg.initial.mean + cfg.initial.stddev * init.normal_vec(d);
          if (cfg.domain.contains(x)) {
            cloud.positions.push_back(x);
            break;
          }
        }
      }
      break;
    case InitialLaw::Kind::UserCloud:
      cloud.positions = cfg.initial.user_cloud;
      break;
  }
  cloud.ledgers.assign(static_cast<size_t>(cfg.N), ReflectionLedger{});
  for (auto& l : cloud.ledgers) l.last_step = Vec::zero(d);
  cloud.stream_ids.resize(static_cast<size_t>(cfg.N));
  for (int i = 0; i < cfg.N; ++i) cloud.stream_ids[i] = static_cast<uint64_t>(i);
  return cloud;
}

Vec particle_noise(const SimConfig& cfg, uint64_t stream_id,
                   uint64_t step_index, int d) {
  RngStream s(cfg.seed, stream::kParticleNoise, stream_id);
  s.set_counter(step_index * kCounterStride);
  return s.normal_vec(d);
}

ParticleCloud step_interacting(const ParticleCloud& cloud,
                               const SimConfig& cfg) {
  const int n = cloud.size();
  const int d = cfg.domain.dim();
  ParticleCloud out = cloud;
  // Bin width: sensitivity radius, floored so tiny radii don't explode
  // the bin count over the domain.
  double bw = std::max(cfg.sensitivity.radius(), cfg.domain.diameter() / 64.0);
  BinIndex bins(cloud.positions, bw);
  std::vector<Vec> drifts(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    drifts[i] = velocity_empirical_binned(cloud.positions[i], cloud.positions,
                                          cfg.sensitivity, cfg.kernel, bins);
  for (int i = 0; i < n; ++i) {
    Vec noise = cfg.sigma > 0.0
                    ? particle_noise(cfg, cloud.stream_ids[i],
                                     cloud.step_index, d)
                    : Vec::zero(d);
    ReflectedStepResult r = reflected_step(cloud.positions[i], drifts[i], noise,
                                           cfg.dt, cfg.sigma, cfg.domain);
    out.positions[i] = r.x_new;
    out.ledgers[i].record(r.reflection);
  }
  out.time = cloud.time + cfg.dt;
  out.step_index = cloud.step_index + 1;
  return out;
}

ParticleCloud step_mckean(const ParticleCloud& cloud,
                          const DensityProvider& provider,
                          const SimConfig& cfg) {
  if (!provider.covers(cloud.time))
    throw std::runtime_error("step_mckean: density provider does not cover t");
  const int n = cloud.size();
  const int d = cfg.domain.dim();
  GridDensity rho = provider.at(cloud.time);
  ParticleCloud out = cloud;
  for (int i = 0; i < n; ++i) {
    Vec drift = velocity_from_density(cloud.positions[i], rho, cfg.sensitivity,
                                      cfg.kernel);
    Vec noise = cfg.sigma > 0.0
                    ? particle_noise(cfg, cloud.stream_ids[i],
                                     cloud.step_index, d)
                    : Vec::zero(d);
    ReflectedStepResult r = reflected_step(cloud.positions[i], drift, noise,
                                           cfg.dt, cfg.sigma, cfg.domain);
    out.positions[i] = r.x_new;
    out.ledgers[i].record(r.reflection);
  }
  out.time = cloud.time + cfg.dt;
  out.step_index = cloud.step_index + 1;
  return out;
}

double CoupledRun::sup_difference() const {
  double m = 0.0;
  for (int i = 0; i < interacting.size(); ++i)
    m = std::max(m, dist(interacting.positions[i], mckean.positions[i]));
  return m;
}

CoupledRun make_coupled(const SimConfig& cfg, RngStream& rng) {
  CoupledRun run;
  run.interacting = init_cloud(cfg, rng);
  run.mckean = run.interacting;  // Y_0 = X_0, same stream ids -> same noise
  return run;
}

CoupledRun advance_coupled(const CoupledRun& run, const SimConfig& cfg,
                           const DensityProvider& provider) {
  if (std::abs(run.interacting.time - run.mckean.time) >
      1e-12 * (1.0 + std::abs(run.interacting.time)))
    throw std::runtime_error("advance_coupled: clouds not time-aligned");
  CoupledRun out;
  out.interacting = step_interacting(run.interacting, cfg);
  out.mckean = step_mckean(run.mckean, provider, cfg);
  return out;
}

}  // namespace mf
