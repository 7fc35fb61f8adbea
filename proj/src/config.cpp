#include "brake/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace brake {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError("unknown field '" + where + key + "'");
}

template <class T>
T get_required(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing field '" + where + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + where + key + "' has the wrong type");
  }
}

template <class T>
T get_optional(const json& obj, const std::string& key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  return get_required<T>(obj, key, where);
}

// json's integer getters silently truncate reals
long get_integer(const json& obj, const std::string& key, const std::string& where, bool required,
                 long fallback) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError("missing field '" + where + key + "'");
    return fallback;
  }
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError("field '" + where + key + "' must be an integer");
  return v.get<long>();
}

}  // namespace

ProblemConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc,
                 {"n_agents", "period", "time_steps", "kernel", "potential", "symmetric_class", "opt",
                  "feas_tol"},
                 "");

  ProblemConfig cfg;
  try {
    cfg.n_agents = static_cast<int>(get_integer(doc, "n_agents", "", true, 0));
    const double period = get_required<double>(doc, "period", "");
    const int steps = static_cast<int>(get_integer(doc, "time_steps", "", true, 0));
    cfg.grid = TimeGrid(period, steps);

    if (!doc.contains("kernel")) throw ConfigError("missing field 'kernel'");
    const auto& k = doc.at("kernel");
    reject_unknown(k, {"alpha"}, "kernel.");
    cfg.kernel = KernelSpec(get_required<double>(k, "alpha", "kernel."));

    if (!doc.contains("potential")) throw ConfigError("missing field 'potential'");
    const auto& p = doc.at("potential");
    reject_unknown(p, {"name", "params"}, "potential.");
    cfg.potential = PotentialSpec::from_name(get_required<std::string>(p, "name", "potential."),
                                             get_optional<std::vector<double>>(p, "params", "potential.", {}));

    cfg.symmetric_class = get_optional<bool>(doc, "symmetric_class", "", cfg.symmetric_class);
    cfg.feas_tol = get_optional<double>(doc, "feas_tol", "", cfg.feas_tol);

    if (doc.contains("opt")) {
      const auto& o = doc.at("opt");
      reject_unknown(o, {"max_iters", "grad_tol", "seed", "step0", "armijo_sigma", "max_halvings"}, "opt.");
      cfg.opt.max_iters = get_integer(o, "max_iters", "opt.", false, cfg.opt.max_iters);
      cfg.opt.grad_tol = get_optional<double>(o, "grad_tol", "opt.", cfg.opt.grad_tol);
      const long seed = get_integer(o, "seed", "opt.", false, 0);
      if (seed < 0) throw ConfigError("opt.seed must be non-negative");
      cfg.opt.seed = static_cast<std::uint64_t>(seed);
      cfg.opt.step0 = get_optional<double>(o, "step0", "opt.", cfg.opt.step0);
      cfg.opt.armijo_sigma = get_optional<double>(o, "armijo_sigma", "opt.", cfg.opt.armijo_sigma);
      cfg.opt.max_halvings = static_cast<int>(get_integer(o, "max_halvings", "opt.", false, cfg.opt.max_halvings));
    }
    check_config(cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const ProblemConfig& cfg) {
  json doc = {
      {"n_agents", cfg.n_agents},
      {"period", cfg.grid.period()},
      {"time_steps", cfg.grid.steps()},
      {"kernel", {{"alpha", cfg.kernel.alpha()}}},
      {"potential", {{"name", cfg.potential.name()}, {"params", cfg.potential.params()}}},
      {"symmetric_class", cfg.symmetric_class},
      {"feas_tol", cfg.feas_tol},
      {"opt",
       {{"max_iters", cfg.opt.max_iters},
        {"grad_tol", cfg.opt.grad_tol},
        {"seed", cfg.opt.seed},
        {"step0", cfg.opt.step0},
        {"armijo_sigma", cfg.opt.armijo_sigma},
        {"max_halvings", cfg.opt.max_halvings}}},
  };
  return doc.dump();
}

std::string config_digest(const ProblemConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string manifest_json(const RunManifest& m) {
  json doc = {{"command", m.command},
              {"config_digest", m.config_digest},
              {"seed", m.seed},
              {"tool_version", m.tool_version},
              {"outputs", m.outputs}};
  return doc.dump(2) + "\n";
}

}  // namespace brake
