// brake: minimize, brake, gamma and selftest subcommands.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "brake/config.hpp"
#include "brake/constraints.hpp"
#include "brake/io.hpp"
#include "brake/meanfield.hpp"
#include "brake/measures.hpp"
#include "brake/optimizer.hpp"
#include "brake/selftest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace brake;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitTrivial = 4;

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json energy_json(const EnergyBreakdown& e) {
  return {{"kinetic", e.kinetic}, {"potential", e.potential}, {"interaction", e.interaction}, {"total", e.total}};
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("BRAKE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

  template <class Writer>
  void csv(const std::string& name, Writer w) {
    std::ostringstream s;
    w(s);
    text(name, s.str());
  }

  void text(const std::string& name, const std::string& body) {
    write_file((dir_ / name).string(), body);
    files_.push_back(name);
  }

  void manifest(const std::string& command, const ProblemConfig& cfg) {
    RunManifest m{command, config_digest(cfg), cfg.opt.seed, kToolVersion, files_};
    m.outputs.push_back("manifest.json");
    write_file((dir_ / "manifest.json").string(), manifest_json(m));
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::vector<InitMode> parse_starts(const std::string& list) {
  std::vector<InitMode> modes;
  std::stringstream s(list);
  std::string item;
  while (std::getline(s, item, ','))
    if (!item.empty()) modes.push_back(init_mode_from_name(item));
  if (modes.empty()) throw std::invalid_argument("--starts is empty");
  return modes;
}

json solve_summary(const SolveResult& r) {
  return {{"start", r.start},
          {"status", r.status},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"energy", r.energy.total},
          {"saturation_dev", r.diagnostics.saturation_dev}};
}

int cmd_minimize(const std::string& config, const std::string& out, const std::string& starts, int threads) {
  const auto cfg = load_config(config);
  const auto modes = parse_starts(starts);
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = minimize_multistart(cfg, modes, resolve_threads(threads));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& best = res.best;

  OutputDir dir(out);
  dir.csv("trajectories.csv", [&](std::ostream& s) { write_trajectories_csv(s, best.traj); });
  dir.csv("history.csv", [&](std::ostream& s) { write_history_csv(s, best.history); });
  json runs = json::array();
  for (const auto& r : res.runs) runs.push_back(solve_summary(r));
  json diag = {{"support_radius", best.diagnostics.support_radius},
               {"saturation_dev", best.diagnostics.saturation_dev},
               {"ode_residual", number_or_null(best.diagnostics.ode_residual)},
               {"stationarity_dev", best.diagnostics.stationarity_dev},
               {"energies", energy_json(best.energy)},
               {"status", best.status},
               {"start", best.start},
               {"iterations", best.iterations},
               {"runs", runs}};
  dir.text("diagnostics.json", diag.dump(2) + "\n");
  dir.text("trajectories.svg", trajectories_svg(best.traj));
  dir.manifest("minimize", cfg);

  std::printf("minimize: best start %s, %s after %ld iterations (%.1f s)\n", best.start.c_str(),
              best.status.c_str(), best.iterations, secs);
  std::printf("  energy %.10g  saturation_dev %.3e  support_radius %.4f\n", best.energy.total,
              best.diagnostics.saturation_dev, best.diagnostics.support_radius);
  return best.converged ? kExitOk : kExitNotConverged;
}

json orbit_json(const BrakeOrbitSolution& sol, const PotentialSpec& pot) {
  const auto& o = sol.orbit;
  const auto& g = o.grid;
  const auto chk = check_orbit(o);
  json roots = json::array();
  for (const auto& r : sol.roots) roots.push_back({{"turning_point", r.turning_point}, {"v0", r.v0}, {"action", r.action}});
  const double a_q = o.a[g.index_of_quarter()];
  const double a_mq = o.a[g.index_of_minus_quarter()];
  return {{"trivial", sol.trivial},
          {"ode_residual", o.ode_residual},
          {"shooting_residual", sol.shooting_residual},
          {"boundary_residual", chk.boundary_residual},
          {"quarter_symmetry_residual", chk.quarter_symmetry_residual},
          {"reflection_residual", chk.reflection_residual},
          {"force_zero", number_or_null(sol.force_zero)},
          {"a_quarter", a_q},
          {"a_minus_quarter", a_mq},
          {"wbar_a_quarter", averaged_potential_limit(pot, a_q).value},
          {"wbar_a_minus_quarter", averaged_potential_limit(pot, a_mq).value},
          {"selected_root", sol.selected},
          {"roots", roots}};
}

int cmd_brake(const std::string& config, const std::string& out) {
  const auto cfg = load_config(config);
  const auto sol = solve_brake_orbit(cfg.potential, cfg.grid);
  OutputDir dir(out);
  dir.csv("orbit.csv", [&](std::ostream& s) { write_orbit_csv(s, sol.orbit); });
  dir.text("orbit.svg", orbit_svg(sol.orbit));
  const auto diag = orbit_json(sol, cfg.potential);
  dir.text("diagnostics.json", diag.dump(2) + "\n");
  dir.manifest("brake", cfg);
  if (sol.trivial) {
    std::printf("brake: only the trivial orbit a = -1/2 was found\n");
    return kExitTrivial;
  }
  std::printf("brake: a(T/4) = %.10g, W bar(a(T/4)) = %.4g, shooting residual %.2e\n",
              diag["a_quarter"].get<double>(), diag["wbar_a_quarter"].get<double>(), sol.shooting_residual);
  return kExitOk;
}

std::vector<int> parse_agents(const std::string& list) {
  std::vector<int> out;
  std::stringstream s(list);
  std::string item;
  while (std::getline(s, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const int n = std::stoi(item, &used);
    if (used != item.size() || n < 1) throw std::invalid_argument("bad agent count '" + item + "'");
    out.push_back(n);
  }
  if (out.empty()) throw std::invalid_argument("--agents is empty");
  return out;
}

int cmd_gamma(const std::string& config, const std::string& agents, const std::string& out, bool compare_cold) {
  const auto base = load_config(config);
  const auto counts = parse_agents(agents);
  const auto sol = solve_brake_orbit(base.potential, base.grid);
  std::printf("gamma: orbit %s, a(T/4) = %.6g\n", sol.trivial ? "trivial" : "nontrivial",
              sol.orbit.a[base.grid.index_of_quarter()]);

  std::vector<SolveResult> solves;
  std::vector<long> cold_iterations;
  bool all_converged = true;
  for (int n : counts) {
    auto cfg = base;
    cfg.n_agents = n;
    const auto cold_start = project_feasible(block_from_orbit(sol.orbit, n), cfg);
    const auto start = solves.empty() ? cold_start : upsample_agents(solves.back().traj, cfg);
    auto r = minimize(cfg, start);
    r.start = solves.empty() ? "orbit_block" : "upsampled";
    all_converged = all_converged && r.converged;
    if (compare_cold) cold_iterations.push_back(minimize(cfg, cold_start).iterations);
    std::printf("  N=%d %s after %ld iterations, energy %.8g\n", n, r.status.c_str(), r.iterations, r.energy.total);
    solves.push_back(std::move(r));
  }
  const auto rep = gamma_convergence_report(sol.orbit, base.potential, base.kernel, solves);

  OutputDir dir(out);
  dir.csv("gamma.csv", [&](std::ostream& s) { write_gamma_csv(s, rep); });
  dir.csv("orbit.csv", [&](std::ostream& s) { write_orbit_csv(s, sol.orbit); });
  dir.text("gamma.svg", gamma_svg(rep));
  json entries = json::array();
  for (std::size_t j = 0; j < rep.entries.size(); ++j) {
    const auto& e = rep.entries[j];
    json row = {{"n_agents", e.n_agents},
                {"max_d2", e.max_d2},
                {"energy", e.energy},
                {"energy_gap", e.energy_gap},
                {"equicontinuity_ratio", e.equicontinuity_ratio},
                {"solve", solve_summary(solves[j])}};
    if (compare_cold) row["cold_iterations"] = cold_iterations[j];
    entries.push_back(row);
  }
  json diag = {{"meanfield_energy", energy_json(rep.meanfield)},
               {"orbit_trivial", sol.trivial},
               {"entries", entries}};
  dir.text("diagnostics.json", diag.dump(2) + "\n");
  dir.manifest("gamma", base);

  for (const auto& e : rep.entries)
    std::printf("  N=%d max d2 %.4e  energy gap %.6g  equicontinuity %.4f\n", e.n_agents, e.max_d2,
                e.energy_gap, e.equicontinuity_ratio);
  return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_selftest(bool inject_fault) {
  SelftestOptions opt;
  opt.inject_fault = inject_fault;
  const auto t0 = std::chrono::steady_clock::now();
  const auto cases = run_selftest(opt);
  bool ok = true;
  for (const auto& c : cases) {
    std::printf("%-26s %s  %6.2fs  %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.seconds, c.detail.c_str());
    ok = ok && c.passed;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("selftest %s in %.1f s\n", ok ? "passed" : "FAILED", secs);
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained N-agent periodic control energy: minimizers, brake orbit, mean-field diagnostics"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config, out, starts = "wells,stationary,random", agents = "8,16,32,64";
  int threads = 0;
  bool inject_fault = false;
  bool compare_cold = false;

  auto* mini = app.add_subcommand("minimize", "multi-start projected gradient descent");
  mini->add_option("--config", config, "JSON config")->required();
  mini->add_option("--out", out, "output directory")->required();
  mini->add_option("--starts", starts, "comma list of wells, stationary, random");
  mini->add_option("--threads", threads, "worker cap (default BRAKE_THREADS or 1)");

  auto* brake = app.add_subcommand("brake", "mean-field brake orbit");
  brake->add_option("--config", config, "JSON config")->required();
  brake->add_option("--out", out, "output directory")->required();

  auto* gamma = app.add_subcommand("gamma", "discrete-to-continuum diagnostics");
  gamma->add_option("--config", config, "JSON config")->required();
  gamma->add_option("--out", out, "output directory")->required();
  gamma->add_option("--agents", agents, "comma list of agent counts");
  gamma->add_option("--threads", threads, "worker cap (default BRAKE_THREADS or 1)");
  gamma->add_flag("--compare-cold", compare_cold, "also solve each N from the orbit block");

  auto* self = app.add_subcommand("selftest", "fast property suites");
  self->add_flag("--inject-fault", inject_fault, "flip the interaction sign in the gradient");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mini) return cmd_minimize(config, out, starts, threads);
    if (*brake) return cmd_brake(config, out);
    if (*gamma) return cmd_gamma(config, agents, out, compare_cold);
    if (*self) return cmd_selftest(inject_fault);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitFailure;
}
