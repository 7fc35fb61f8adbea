#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "brake/measures.hpp"
#include "brake/model.hpp"
#include "brake/optimizer.hpp"

namespace brake {

/// Shortest-safe decimal for a double: 17 significant digits.
std::string format_real(double x);

/// Header "t,x1,...,xN", one row per node.
void write_trajectories_csv(std::ostream& out, const TrajectoryGrid& traj);
/// Rebuilds the grid from the t column (T = -2 t_0, M = row count) and
/// checks every t against the grid. Throws std::runtime_error on malformed input.
TrajectoryGrid read_trajectories_csv(std::istream& in);

/// iteration,energy,grad_norm,saturation_dev
void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& history);
std::vector<HistoryRow> read_history_csv(std::istream& in);

/// t,a,v
void write_orbit_csv(std::ostream& out, const BrakeOrbit& orbit);
BrakeOrbit read_orbit_csv(std::istream& in);

/// N,t,d2,energy_gap with one row per solve and probe.
void write_gamma_csv(std::ostream& out, const GammaReport& report);

/// 1200x600 plots with 5% margins. Axes are the first two path elements.
/// One path per agent, time horizontal.
std::string trajectories_svg(const TrajectoryGrid& traj);
/// Band between a(t) and a(t) + 1 plus the a(t) curve.
std::string orbit_svg(const BrakeOrbit& orbit);
/// log10 max d2 against log10 N.
std::string gamma_svg(const GammaReport& report);

struct SvgCheck {
  bool well_formed = false;
  int paths = 0;
  std::string error;
};

SvgCheck check_svg(const std::string& svg);

/// Writes text to path, throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace brake
