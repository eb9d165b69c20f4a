#pragma once

#include <cstdint>
#include <cmath>

#include "mf/vec.hpp"

namespace mf {

// Counter-based RNG: every output is a pure hash of
// (seed, stream0, stream1, counter). Streams can be opened anywhere
// (per particle, per replica, per experiment) without coordination, and
// the same (seed, stream, counter) always yields the same value -- this
// is what makes the synchronous coupling and the run-to-run determinism
// guarantees exact regardless of thread schedule.

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_u64(uint64_t seed, uint64_t s0, uint64_t s1, uint64_t ctr) {
  uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ s0);
  h = splitmix64(h ^ s1);
  h = splitmix64(h ^ ctr);
  return h;
}

// Stream identifiers, kept disjoint so derived streams never collide.
namespace stream {
inline constexpr uint64_t kParticleNoise = 0x01;
inline constexpr uint64_t kInitial = 0x02;
inline constexpr uint64_t kReplica = 0x03;
inline constexpr uint64_t kSampling = 0x04;
inline constexpr uint64_t kMc = 0x05;
}  // namespace stream

class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t s0, uint64_t s1 = 0)
      : seed_(seed), s0_(s0), s1_(s1) {}

  // Open a sub-stream; the child's outputs are independent of the parent's.
  RngStream derive(uint64_t tag) const {
    return RngStream(seed_, splitmix64(s0_ ^ splitmix64(tag)), s1_ + 1);
  }

  void set_counter(uint64_t c) { ctr_ = c; }
  uint64_t counter() const { return ctr_; }

  uint64_t next_u64() { return hash_u64(seed_, s0_, s1_, ctr_++); }

  // Uniform on the open interval (0,1); never 0, safe for log().
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  uint64_t uniform_index(uint64_t n) { return next_u64() % n; }

  // Box-Muller; two uniforms per draw, no spare caching so the counter
  // advance per call is fixed.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  Vec normal_vec(int d) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

  Vec uniform_in_unit_ball(int d) {
    while (true) {
      Vec v(d);
      for (int i = 0; i < d; ++i) v[i] = uniform(-1.0, 1.0);
      if (norm2(v) <= 1.0) return v;
    }
  }

  Vec uniform_direction(int d) {
    while (true) {
      Vec v = normal_vec(d);
      double n = norm(v);
      if (n > 1e-12) return v / n;
    }
  }

 private:
  uint64_t seed_;
  uint64_t s0_;
  uint64_t s1_;
  uint64_t ctr_ = 0;
};

}  // namespace mf
