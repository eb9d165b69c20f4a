#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "mf/harness.hpp"
#include "mf/particles.hpp"
#include "mf/pde.hpp"

#include "json.hpp"

namespace mf::io {

// All parse errors throw ConfigError (mapped to exit code 2 by the CLI).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json load_json(const std::string& path);

DomainSpec parse_domain(const nlohmann::json& j);
OrientationField parse_orientation(const nlohmann::json& j, int dim);
SensitivitySpec parse_sensitivity(const nlohmann::json& j, int dim);
KernelSpec parse_kernel(const nlohmann::json& j);
SimConfig parse_sim(const nlohmann::json& j);
PdeConfig parse_pde(const nlohmann::json& j);
LlnConfig parse_lln(const nlohmann::json& j);
StabilityConfig parse_stability(const nlohmann::json& j);
ChaosConfig parse_chaos(const nlohmann::json& j);

nlohmann::json domain_to_json(const DomainSpec& d);
nlohmann::json sensitivity_to_json(const SensitivitySpec& s);
nlohmann::json kernel_to_json(const KernelSpec& k);

// Particle snapshot rows: t, particle_id, x_1..x_d, reflection_total.
void append_snapshot_csv(std::ostream& os, const ParticleCloud& cloud,
                         bool header);

// Density snapshot as CSV (cell index, center coordinates, value).
void write_density_csv(const std::string& path, const GridDensity& rho);
// Flat little-endian doubles plus a JSON sidecar header
// (dims, h, t, mass) at path + ".json".
void write_density_binary(const std::string& path, const GridDensity& rho);

void write_rate_table_csv(const std::string& path, const RateTable& table);
void write_slope_json(const std::string& path, const RateTable& table);
void write_manifest(const std::string& path, const nlohmann::json& config,
                    uint64_t seed, double wall_seconds);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mf::io
