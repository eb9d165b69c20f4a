#include "mf/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mf::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

json require(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing config key: ") + key);
  return j.at(key);
}

Vec parse_vec(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > 3)
    fail("vector fields must be arrays of 1..3 numbers");
  Vec v(static_cast<int>(j.size()));
  for (int i = 0; i < v.d; ++i) v[i] = j.at(i).get<double>();
  return v;
}

std::array<int, 3> parse_cells(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > 3)
    fail("cells must be an array of 1..3 positive integers");
  std::array<int, 3> c{1, 1, 1};
  for (size_t i = 0; i < j.size(); ++i) c[i] = j.at(i).get<int>();
  return c;
}

GridDensity parse_initial_density(const json& j, const DomainSpec& box,
                                  std::array<int, 3> cells) {
  std::string kind = require(j, "kind").get<std::string>();
  if (kind == "uniform") return GridDensity::uniform(box, cells);
  GridDensity rho(box, cells);
  if (kind == "gaussian") {
    Vec center = parse_vec(require(j, "center"));
    double sd = require(j, "stddev").get<double>();
    if (!(sd > 0.0)) fail("initial gaussian stddev must be > 0");
    for (size_t c = 0; c < rho.size(); ++c) {
      double r2 = norm2(rho.cell_center(c) - center);
      rho[c] = std::exp(-r2 / (2.0 * sd * sd));
    }
  } else if (kind == "cells") {
    auto vals = require(j, "values").get<std::vector<double>>();
    if (vals.size() != rho.size()) fail("initial cell values: wrong count");
    for (size_t c = 0; c < rho.size(); ++c) rho[c] = vals[c];
  } else {
    fail("unknown initial density kind: " + kind);
  }
  double m = rho.mass();
  if (!(m > 0.0)) fail("initial density must have positive mass");
  for (size_t c = 0; c < rho.size(); ++c) rho[c] /= m;  // unit mass
  return rho;
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.d; ++i) a.push_back(v[i]);
  return a;
}

}  // namespace

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(std::string("config parse error: ") + e.what());
  }
  return j;
}

DomainSpec parse_domain(const json& j) {
  std::string kind = require(j, "kind").get<std::string>();
  try {
    if (kind == "ball")
      return DomainSpec::ball(parse_vec(require(j, "center")),
                              require(j, "radius").get<double>());
    if (kind == "box")
      return DomainSpec::box(parse_vec(require(j, "lo")),
                             parse_vec(require(j, "hi")));
    if (kind == "halfspaces") {
      std::vector<Halfspace> hs;
      for (const auto& p : require(j, "planes"))
        hs.push_back(Halfspace{parse_vec(require(p, "normal")),
                               require(p, "offset").get<double>()});
      return DomainSpec::halfspaces(hs);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("invalid domain: ") + e.what());
  }
  fail("unknown domain kind: " + kind);
}

OrientationField parse_orientation(const json& j, int dim) {
  std::string kind = require(j, "kind").get<std::string>();
  if (kind == "constant") return OrientationField::constant(parse_vec(require(j, "value")));
  if (kind == "rotational")
    return OrientationField::rotational(dim, require(j, "scale").get<double>());
  if (kind == "radial")
    return OrientationField::radial(require(j, "scale").get<double>());
  fail("unknown orientation kind: " + kind);
}

SensitivitySpec parse_sensitivity(const json& j, int dim) {
  std::string kind = require(j, "kind").get<std::string>();
  OrientationField w;
  if (j.contains("w")) w = parse_orientation(j.at("w"), dim);
  try {
    if (kind == "ball")
      return SensitivitySpec::fixed_ball(require(j, "r").get<double>(), w);
    if (kind == "varying_ball")
      return SensitivitySpec::varying_ball(require(j, "r_min").get<double>(),
                                           require(j, "r_max").get<double>(), w);
    if (kind == "cone")
      return SensitivitySpec::fixed_cone(dim, require(j, "r").get<double>(),
                                         require(j, "theta").get<double>(), w);
    if (kind == "varying_cone")
      return SensitivitySpec::varying_cone(
          dim, require(j, "r").get<double>(),
          require(j, "theta_star").get<double>(),
          require(j, "tau").get<double>(), w);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("invalid sensitivity: ") + e.what());
  }
  fail("unknown sensitivity kind: " + kind);
}

KernelSpec parse_kernel(const json& j) {
  std::string kind = require(j, "kind").get<std::string>();
  try {
    if (kind == "gaussian_grad")
      return KernelSpec::gaussian_grad(require(j, "amplitude").get<double>(),
                                       require(j, "width").get<double>());
    if (kind == "morse_grad")
      return KernelSpec::morse_grad(
          require(j, "c_a").get<double>(), require(j, "l_a").get<double>(),
          require(j, "c_r").get<double>(), require(j, "l_r").get<double>(),
          require(j, "delta").get<double>());
    if (kind == "zero") return KernelSpec::zero();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("invalid kernel: ") + e.what());
  }
  fail("unknown kernel kind: " + kind);
}

SimConfig parse_sim(const json& j) {
  SimConfig cfg;
  cfg.domain = parse_domain(require(j, "domain"));
  const int d = cfg.domain.dim();
  cfg.N = require(j, "N").get<int>();
  cfg.dt = require(j, "dt").get<double>();
  cfg.T = require(j, "T").get<double>();
  cfg.sigma = require(j, "sigma").get<double>();
  cfg.seed = j.value("seed", uint64_t{0});
  cfg.sensitivity = parse_sensitivity(require(j, "sensitivity"), d);
  cfg.kernel = parse_kernel(require(j, "kernel"));
  if (j.contains("snapshots"))
    cfg.snapshot_times = j.at("snapshots").get<std::vector<double>>();
  json init = j.value("initial", json{{"kind", "uniform"}});
  std::string ik = require(init, "kind").get<std::string>();
  if (ik == "uniform") {
    cfg.initial = InitialLaw::uniform();
  } else if (ik == "truncated_gaussian") {
    cfg.initial = InitialLaw::truncated_gaussian(
        parse_vec(require(init, "mean")), require(init, "stddev").get<double>());
  } else if (ik == "user") {
    Cloud pts;
    for (const auto& p : require(init, "points")) pts.push_back(parse_vec(p));
    cfg.initial = InitialLaw::user(std::move(pts));
  } else {
    fail("unknown initial law kind: " + ik);
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return cfg;
}

PdeConfig parse_pde(const json& j) {
  PdeConfig cfg;
  cfg.domain = parse_domain(require(j, "domain"));
  const int d = cfg.domain.dim();
  cfg.cells = parse_cells(require(j, "cells"));
  cfg.dt = require(j, "dt").get<double>();
  cfg.T = require(j, "T").get<double>();
  cfg.sigma = require(j, "sigma").get<double>();
  cfg.sensitivity = parse_sensitivity(require(j, "sensitivity"), d);
  cfg.kernel = parse_kernel(require(j, "kernel"));
  if (j.contains("snapshots"))
    cfg.snapshot_times = j.at("snapshots").get<std::vector<double>>();
  try {
    cfg.initial = parse_initial_density(require(j, "initial"), cfg.domain,
                                        cfg.cells);
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return cfg;
}

LlnConfig parse_lln(const json& j) {
  LlnConfig cfg;
  DomainSpec box = parse_domain(require(j, "domain"));
  const int d = box.dim();
  cfg.Ns = require(j, "Ns").get<std::vector<int>>();
  cfg.M = require(j, "M").get<int>();
  cfg.m = require(j, "m").get<int>();
  cfg.sensitivity = parse_sensitivity(require(j, "sensitivity"), d);
  cfg.kernel = parse_kernel(require(j, "kernel"));
  cfg.u_points = j.value("u_points", 64);
  cfg.u_max = j.value("u_max", 0.0);
  try {
    cfg.rho = parse_initial_density(
        j.value("rho", json{{"kind", "uniform"}}), box,
        parse_cells(require(j, "cells")));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return cfg;
}

StabilityConfig parse_stability(const json& j) {
  StabilityConfig cfg;
  cfg.sim = parse_sim(require(j, "sim"));
  cfg.deltas = require(j, "deltas").get<std::vector<double>>();
  if (j.contains("offset_direction"))
    cfg.offset_direction = parse_vec(j.at("offset_direction"));
  return cfg;
}

ChaosConfig parse_chaos(const json& j) {
  ChaosConfig cfg;
  cfg.Ns = require(j, "Ns").get<std::vector<int>>();
  cfg.M = require(j, "M").get<int>();
  cfg.p = require(j, "p").get<double>();
  cfg.pde = parse_pde(require(j, "pde"));
  cfg.base = parse_sim(require(j, "sim"));
  cfg.sample_replicas = j.value("sample_replicas", 1);
  json t = require(j, "theory");
  cfg.theory.p = require(t, "p").get<double>();
  cfg.theory.q = require(t, "q").get<double>();
  cfg.theory.d = require(t, "d").get<int>();
  cfg.theory.m = require(t, "m").get<int>();
  return cfg;
}

json domain_to_json(const DomainSpec& d) {
  json j;
  switch (d.kind()) {
    case DomainSpec::Kind::Ball:
      j["kind"] = "ball";
      j["center"] = vec_to_json(d.center());
      j["radius"] = d.radius();
      break;
    case DomainSpec::Kind::Box:
      j["kind"] = "box";
      j["lo"] = vec_to_json(d.lo());
      j["hi"] = vec_to_json(d.hi());
      break;
    case DomainSpec::Kind::Halfspaces: {
      j["kind"] = "halfspaces";
      json planes = json::array();
      for (const auto& h : d.planes())
        planes.push_back(
            {{"normal", vec_to_json(h.normal)}, {"offset", h.offset}});
      j["planes"] = planes;
      break;
    }
  }
  return j;
}

json sensitivity_to_json(const SensitivitySpec& s) {
  json j;
  switch (s.kind()) {
    case SensitivitySpec::Kind::FixedBall:
      j["kind"] = "ball";
      j["r"] = s.radius();
      break;
    case SensitivitySpec::Kind::VaryingBall:
      j["kind"] = "varying_ball";
      j["r_max"] = s.radius();
      break;
    case SensitivitySpec::Kind::FixedCone:
      j["kind"] = "cone";
      j["r"] = s.radius();
      j["theta"] = s.cone_angle();
      break;
    case SensitivitySpec::Kind::VaryingCone:
      j["kind"] = "varying_cone";
      j["r"] = s.radius();
      j["theta_star"] = s.theta_star();
      break;
  }
  return j;
}

json kernel_to_json(const KernelSpec& k) {
  json j;
  switch (k.kind()) {
    case KernelSpec::Kind::GaussianGrad:
      j["kind"] = "gaussian_grad";
      j["amplitude"] = k.amplitude();
      j["width"] = k.width();
      break;
    case KernelSpec::Kind::MorseGrad:
      j["kind"] = "morse_grad";
      j["c_a"] = k.c_a();
      j["l_a"] = k.l_a();
      j["c_r"] = k.c_r();
      j["l_r"] = k.l_r();
      j["delta"] = k.delta();
      break;
    case KernelSpec::Kind::Zero:
      j["kind"] = "zero";
      break;
  }
  j["sup_norm"] = k.sup_norm();
  j["lipschitz"] = k.lipschitz();
  return j;
}

void append_snapshot_csv(std::ostream& os, const ParticleCloud& cloud,
                         bool header) {
  const int d = cloud.positions.empty() ? 0 : cloud.positions.front().d;
  if (header) {
    os << "t,particle_id";
    for (int a = 0; a < d; ++a) os << ",x_" << (a + 1);
    os << ",reflection_total\n";
  }
  os.precision(17);
  for (int i = 0; i < cloud.size(); ++i) {
    os << cloud.time << ',' << i;
    for (int a = 0; a < d; ++a) os << ',' << cloud.positions[i][a];
    os << ',' << cloud.ledgers[i].total << '\n';
  }
}

void write_density_csv(const std::string& path, const GridDensity& rho) {
  std::ofstream os(path);
  if (!os) fail("cannot open output file: " + path);
  os.precision(17);
  const int d = rho.dim();
  os << "cell";
  for (int a = 0; a < d; ++a) os << ",c_" << (a + 1);
  os << ",value\n";
  for (size_t c = 0; c < rho.size(); ++c) {
    Vec x = rho.cell_center(c);
    os << c;
    for (int a = 0; a < d; ++a) os << ',' << x[a];
    os << ',' << rho[c] << '\n';
  }
}

void write_density_binary(const std::string& path, const GridDensity& rho) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail("cannot open output file: " + path);
  os.write(reinterpret_cast<const char*>(rho.values().data()),
           static_cast<std::streamsize>(rho.size() * sizeof(double)));
  json h;
  h["dims"] = json::array();
  h["h"] = json::array();
  for (int a = 0; a < rho.dim(); ++a) {
    h["dims"].push_back(rho.cells(a));
    h["h"].push_back(rho.spacing(a));
  }
  h["t"] = rho.time();
  h["mass"] = rho.mass();
  h["lo"] = vec_to_json(rho.lo());
  std::ofstream hs(path + ".json");
  if (!hs) fail("cannot open output file: " + path + ".json");
  hs << h.dump(2) << '\n';
}

void write_rate_table_csv(const std::string& path, const RateTable& table) {
  std::ofstream os(path);
  if (!os) fail("cannot open output file: " + path);
  os.precision(17);
  os << "N,M,mean,stderr,theory_bound\n";
  for (const auto& r : table.rows)
    os << r.N << ',' << r.M << ',' << r.mean << ',' << r.std_error << ','
       << r.theory << '\n';
}

void write_slope_json(const std::string& path, const RateTable& table) {
  json j;
  j["slope"] = table.fit.slope;
  j["ci"] = table.fit.half_width;
  j["theory_exponent"] = table.theory_exponent;
  std::ofstream os(path);
  if (!os) fail("cannot open output file: " + path);
  os << j.dump(2) << '\n';
}

void write_manifest(const std::string& path, const json& config, uint64_t seed,
                    double wall_seconds) {
  json j;
  j["config"] = config;
  j["seed"] = seed;
  j["version"] = kVersion;
  j["wall_seconds"] = wall_seconds;
  std::ofstream os(path);
  if (!os) fail("cannot open output file: " + path);
  os << j.dump(2) << '\n';
}

}  // namespace mf::io
