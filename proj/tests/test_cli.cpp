#include <doctest.h>

#include <stdexcept>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>

#include "brake/checks.hpp"
#include "brake/config.hpp"
#include "brake/io.hpp"

using namespace brake;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"({"n_agents": 3, "period": 4, "time_steps": 16, "kernel": {"alpha": 5},
  "potential": {"name": "paper_smooth_double_well"}, "symmetric_class": true,
  "opt": {"max_iters": 5000, "grad_tol": 1e-6, "seed": 9}})";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BRAKE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("brake_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(kBase);
  CHECK(cfg.n_agents == 3);
  CHECK(cfg.grid.period() == 4.0);
  CHECK(cfg.grid.steps() == 16);
  CHECK(cfg.kernel.alpha() == 5.0);
  CHECK(cfg.potential.name() == "paper_smooth_double_well");
  CHECK(cfg.opt.seed == 9);
  CHECK(cfg.opt.max_iters == 5000);
  CHECK(cfg.feas_tol == 1e-9);

  using nlohmann::json;
  auto edited = [](const std::function<void(json&)>& f) {
    auto j = json::parse(kBase);
    f(j);
    return j.dump();
  };
  CHECK_THROWS_AS(parse_config(edited([](json& j) { j["extra"] = 1; })), ConfigError);
  CHECK_THROWS_AS(parse_config(edited([](json& j) { j["opt"]["momentum"] = 0.9; })), ConfigError);
  CHECK_THROWS_AS(parse_config(edited([](json& j) { j["kernel"]["beta"] = 1; })), ConfigError);
  CHECK_THROWS_AS(parse_config(edited([](json& j) { j.erase("period"); })), ConfigError);
  CHECK_THROWS_AS(parse_config(edited([](json& j) { j["n_agents"] = 2.5; })), ConfigError);
  CHECK_THROWS_AS(parse_config(edited([](json& j) { j["n_agents"] = "3"; })), ConfigError);
  CHECK_THROWS_AS(parse_config(edited([](json& j) { j["time_steps"] = 18; })), ConfigError);
  CHECK_THROWS_AS(parse_config(edited([](json& j) { j["potential"]["name"] = "cubic"; })), ConfigError);
  CHECK_THROWS_AS(parse_config(edited([](json& j) { j["kernel"]["alpha"] = -1; })), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_NOTHROW(parse_config(edited([](json& j) { j.erase("opt"); })));
}

TEST_CASE("config digest") {
  const auto cfg = parse_config(kBase);
  const auto d = config_digest(cfg);
  CHECK(d.size() == 16);
  CHECK(config_digest(parse_config(canonical_config(cfg))) == d);
  // key order and whitespace do not matter
  CHECK(config_digest(parse_config(
            R"({"opt":{"seed":9,"grad_tol":1e-6,"max_iters":5000},"time_steps":16,"period":4.0,"n_agents":3,
            "symmetric_class":true,"potential":{"name":"paper_smooth_double_well"},"kernel":{"alpha":5}})")) == d);
  auto c2 = cfg;
  c2.opt.seed = 10;
  CHECK(config_digest(c2) != d);
  RunManifest m{"minimize", d, 9, kToolVersion, {"a.csv"}};
  const auto j = nlohmann::json::parse(manifest_json(m));
  CHECK(j["config_digest"] == d);
  CHECK(j["outputs"].size() == 1);
}

TEST_CASE("csv round trips are bit exact") {
  std::mt19937_64 rng(3);
  const auto x = random_feasible_grid(TimeGrid(50.0, 32), 4, rng);
  std::stringstream s;
  write_trajectories_csv(s, x);
  CHECK(s.str().rfind("t,x1,x2,x3,x4\n", 0) == 0);
  const auto y = read_trajectories_csv(s);
  CHECK(std::equal(x.values().begin(), x.values().end(), y.values().begin()));
  CHECK(y.grid() == x.grid());

  std::stringstream bad("t,x1\n0,1\n");
  CHECK_THROWS_AS(read_trajectories_csv(bad), std::runtime_error);
  std::stringstream ragged("t,x1,x2\n-1,1\n");
  CHECK_THROWS_AS(read_trajectories_csv(ragged), std::runtime_error);
  std::stringstream garbage("t,x1\n-1,abc\n");
  CHECK_THROWS_AS(read_trajectories_csv(garbage), std::runtime_error);
  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("svg output") {
  std::mt19937_64 rng(4);
  const auto x = random_feasible_grid(TimeGrid(6.0, 16), 6, rng);
  const auto c = check_svg(trajectories_svg(x));
  CHECK(c.well_formed);
  CHECK(c.paths == 8);
  CHECK_FALSE(check_svg("<svg><path></svg>").well_formed);
  GammaReport rep;
  for (int n : {8, 16}) {
    GammaEntry e;
    e.n_agents = n;
    e.max_d2 = 1.0 / n;
    rep.entries.push_back(e);
  }
  CHECK(check_svg(gamma_svg(rep)).well_formed);
}

TEST_CASE("cli exit codes and outputs") {
  const auto dir = scratch("cli");
  write_file((dir / "cfg.json").string(), kBase);
  write_file((dir / "bad.json").string(), R"({"n_agents": 3, "surprise": true})");
  auto zero = nlohmann::json::parse(kBase);
  zero["potential"]["name"] = "zero";
  write_file((dir / "zero.json").string(), zero.dump());
  const std::string cfg = (dir / "cfg.json").string();

  CHECK(run_cli("minimize --config " + (dir / "bad.json").string() + " --out " + (dir / "x").string()) == 2);
  CHECK(run_cli("minimize --config " + (dir / "missing.json").string() + " --out " + (dir / "x").string()) == 2);
  CHECK(run_cli("brake --config " + (dir / "zero.json").string() + " --out " + (dir / "zero").string()) == 4);
  CHECK(fs::exists(dir / "zero" / "orbit.csv"));

  REQUIRE(run_cli("minimize --config " + cfg + " --out " + (dir / "m1").string()) == 0);
  for (const char* f : {"trajectories.csv", "history.csv", "diagnostics.json", "trajectories.svg", "manifest.json"})
    CHECK(fs::exists(dir / "m1" / f));
  std::stringstream traj(read_file((dir / "m1" / "trajectories.csv").string()));
  CHECK(read_trajectories_csv(traj).n_agents() == 3);
  const auto diag = nlohmann::json::parse(read_file((dir / "m1" / "diagnostics.json").string()));
  for (const char* key : {"support_radius", "saturation_dev", "ode_residual", "energies"}) CHECK(diag.contains(key));
  const auto svg = check_svg(read_file((dir / "m1" / "trajectories.svg").string()));
  CHECK(svg.paths == 3 + 2);

  // one iteration is not enough to converge
  auto tight = nlohmann::json::parse(kBase);
  tight["opt"]["max_iters"] = 1;
  write_file((dir / "tight.json").string(), tight.dump());
  CHECK(run_cli("minimize --config " + (dir / "tight.json").string() + " --starts random --out " +
                (dir / "m2").string()) == 3);
  CHECK(fs::exists(dir / "m2" / "trajectories.csv"));

  REQUIRE(run_cli("minimize --config " + cfg + " --out " + (dir / "m3").string() + " --threads 2") == 0);
  CHECK(read_file((dir / "m1" / "trajectories.csv").string()) == read_file((dir / "m3" / "trajectories.csv").string()));
  CHECK(run_cli("minimize --config " + cfg + " --starts sideways --out " + (dir / "m4").string()) != 0);
  fs::remove_all(dir);
}
