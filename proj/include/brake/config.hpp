#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "brake/model.hpp"

namespace brake {

/// Raised for malformed or invalid config documents.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Parses the JSON config. Required: n_agents, period, time_steps,
/// kernel.alpha, potential.name. Optional: potential.params, symmetric_class,
/// feas_tol, opt.{max_iters, grad_tol, seed, step0, armijo_sigma, max_halvings}.
/// Unknown keys are rejected.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);

/// Every field, defaults included, as compact JSON with sorted keys.
std::string canonical_config(const ProblemConfig& cfg);

/// FNV-1a 64 of the canonical bytes, 16 lowercase hex digits.
std::string config_digest(const ProblemConfig& cfg);

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<std::string> outputs;
};

std::string manifest_json(const RunManifest& m);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace brake
