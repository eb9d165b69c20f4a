// mfsim: command-line front end for the mean-field particle/PDE
// experiment suite. Exit codes: 0 success, 2 configuration error,
// 3 acceptance-check failure (with --check).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "mf/harness.hpp"
#include "mf/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  uint64_t seed = 0;
  bool seed_set = false;
  bool check = false;
};

void add_common(CLI::App* sub, Common* c) {
  sub->add_option("--config", c->config, "configuration file (JSON)")
      ->required();
  sub->add_option("--out", c->out, "output directory");
  sub->add_option("--seed", c->seed, "seed override")
      ->each([c](const std::string&) { c->seed_set = true; });
  sub->add_flag("--check", c->check, "run acceptance checks (exit 3 on fail)");
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ =
      std::chrono::steady_clock::now();
};

int fail_check(const std::string& what) {
  std::cerr << "check failed: " << what << '\n';
  return 3;
}

std::string out_path(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  return (fs::path(c.out) / name).string();
}

int cmd_simulate(const Common& c) {
  Timer timer;
  json j = mf::io::load_json(c.config);
  mf::SimConfig cfg = mf::io::parse_sim(j);
  if (c.seed_set) cfg.seed = c.seed;
  mf::RngStream rng(cfg.seed, 0, 0);
  mf::ParticleCloud cloud = mf::init_cloud(cfg, rng);
  std::vector<uint64_t> snaps;
  for (double t : cfg.snapshot_times)
    snaps.push_back(static_cast<uint64_t>(std::llround(t / cfg.dt)));
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
  const uint64_t steps = static_cast<uint64_t>(std::llround(cfg.T / cfg.dt));
  std::ofstream os(out_path(c, "snapshots.csv"));
  bool header = true;
  size_t si = 0;
  bool confined = true;
  for (uint64_t k = 0;; ++k) {
    if (si < snaps.size() && snaps[si] == k) {
      mf::io::append_snapshot_csv(os, cloud, header);
      header = false;
      ++si;
    }
    if (k == steps) break;
    cloud = mf::step_interacting(cloud, cfg);
    for (const auto& p : cloud.positions)
      confined = confined && cfg.domain.contains(p, cfg.domain.boundary_tol());
  }
  mf::io::write_manifest(out_path(c, "manifest.json"), j, cfg.seed,
                         timer.seconds());
  if (c.check && !confined)
    return fail_check("particle left the closed domain");
  return 0;
}

int cmd_pde(const Common& c) {
  Timer timer;
  json j = mf::io::load_json(c.config);
  mf::PdeConfig cfg = mf::io::parse_pde(j.contains("pde") ? j.at("pde") : j);
  mf::PdeResult res = mf::solve(cfg);
  const auto& snaps = res.provider.snapshots();
  double mass0 = snaps.front().mass();
  bool ok = true;
  for (size_t i = 0; i < snaps.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "density_%03zu.csv", i);
    mf::io::write_density_csv(out_path(c, name), snaps[i]);
    ok = ok && std::abs(snaps[i].mass() - mass0) <= 1e-12 * mass0;
    for (size_t cix = 0; cix < snaps[i].size(); ++cix)
      ok = ok && snaps[i][cix] >= 0.0;
  }
  mf::io::write_density_binary(out_path(c, "density_final.bin"), snaps.back());
  json manifest_cfg = j;
  manifest_cfg["max_sup"] = res.max_sup;
  mf::io::write_manifest(out_path(c, "manifest.json"), manifest_cfg, 0,
                         timer.seconds());
  if (c.check && !ok)
    return fail_check("mass conservation or nonnegativity violated");
  return 0;
}

int write_table_outputs(const Common& c, const json& j, uint64_t seed,
                        const mf::RateTable& table, double wall) {
  mf::io::write_rate_table_csv(out_path(c, "rate_table.csv"), table);
  mf::io::write_slope_json(out_path(c, "slope.json"), table);
  mf::io::write_manifest(out_path(c, "manifest.json"), j, seed, wall);
  return 0;
}

int cmd_lln(const Common& c, bool theta) {
  Timer timer;
  json j = mf::io::load_json(c.config);
  mf::LlnConfig cfg = mf::io::parse_lln(j);
  uint64_t seed = c.seed_set ? c.seed : j.value("seed", uint64_t{0});
  mf::RateTable table = theta ? mf::run_lln_theta(cfg, seed)
                              : mf::run_lln_velocity(cfg, seed);
  write_table_outputs(c, j, seed, table, timer.seconds());
  if (c.check) {
    for (const auto& r : table.rows)
      if (r.mean > r.theory)
        return fail_check("row statistic exceeds theoretical bound");
    if (table.rows.size() >= 4 &&
        (table.fit.slope < -0.50 || table.fit.slope > -0.10))
      return fail_check("fitted slope outside [-0.50, -0.10]");
  }
  return 0;
}

int cmd_stability(const Common& c) {
  Timer timer;
  json j = mf::io::load_json(c.config);
  mf::StabilityConfig cfg = mf::io::parse_stability(j);
  if (c.seed_set) cfg.sim.seed = c.seed;
  mf::PdeConfig pde = mf::io::parse_pde(mf::io::load_json(c.config).at("pde"));
  mf::PdeResult res = mf::solve(pde);
  mf::StabilityReport report = mf::run_stability(cfg, res.provider);
  std::ofstream os(out_path(c, "stability.csv"));
  os.precision(17);
  os << "delta,t,ratio\n";
  for (const auto& curve : report.curves)
    for (size_t k = 0; k < curve.times.size(); ++k)
      os << curve.delta << ',' << curve.times[k] << ',' << curve.ratio[k]
         << '\n';
  json summary = j;
  summary["max_rel_spread"] = report.max_rel_spread;
  mf::io::write_manifest(out_path(c, "manifest.json"), summary, cfg.sim.seed,
                         timer.seconds());
  if (c.check && report.max_rel_spread > 0.20)
    return fail_check("stability curves spread exceeds 20%");
  return 0;
}

int cmd_chaos(const Common& c) {
  Timer timer;
  json j = mf::io::load_json(c.config);
  mf::ChaosConfig cfg = mf::io::parse_chaos(j);
  if (c.seed_set) cfg.base.seed = c.seed;
  mf::RateTable table = mf::run_chaos(cfg);
  write_table_outputs(c, j, cfg.base.seed, table, timer.seconds());
  if (c.check) {
    for (size_t i = 1; i < table.rows.size(); ++i)
      if (!(table.rows[i].mean < table.rows[i - 1].mean))
        return fail_check("statistic not strictly decreasing in N");
    if (table.rows.size() >= 4) {
      if (table.fit.slope > -0.15)
        return fail_check("fitted slope above -0.15");
      if (table.fit.slope + table.fit.half_width >= 0.0)
        return fail_check("95% confidence interval does not exclude 0");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field particle / PDE experiment runner"};
  app.require_subcommand(1);

  Common c_sim, c_pde, c_chaos, c_llnv, c_llnt, c_stab;
  CLI::App* s_sim = app.add_subcommand("simulate", "interacting particle run");
  CLI::App* s_pde = app.add_subcommand("pde", "mean-field density solve");
  CLI::App* s_chaos = app.add_subcommand("chaos", "convergence rate table");
  CLI::App* s_llnv =
      app.add_subcommand("lln-velocity", "velocity-field LLN sweep");
  CLI::App* s_llnt =
      app.add_subcommand("lln-theta", "boundary-enlargement LLN sweep");
  CLI::App* s_stab = app.add_subcommand("stability", "coupled stability run");
  add_common(s_sim, &c_sim);
  add_common(s_pde, &c_pde);
  add_common(s_chaos, &c_chaos);
  add_common(s_llnv, &c_llnv);
  add_common(s_llnt, &c_llnt);
  add_common(s_stab, &c_stab);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (s_sim->parsed()) return cmd_simulate(c_sim);
    if (s_pde->parsed()) return cmd_pde(c_pde);
    if (s_chaos->parsed()) return cmd_chaos(c_chaos);
    if (s_llnv->parsed()) return cmd_lln(c_llnv, false);
    if (s_llnt->parsed()) return cmd_lln(c_llnt, true);
    if (s_stab->parsed()) return cmd_stability(c_stab);
  } catch (const mf::io::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
