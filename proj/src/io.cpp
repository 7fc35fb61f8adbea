#include "brake/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace brake {
namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::runtime_error("bad number '" + s + "' in csv");
  return v;
}

long parse_integer(const std::string& s) {
  long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::runtime_error("bad integer '" + s + "' in csv");
  return v;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::string expect_header(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw std::runtime_error("csv is empty");
  return line;
}

TimeGrid grid_from_times(const std::vector<double>& t) {
  try {
    TimeGrid grid(-2.0 * t[0], static_cast<int>(t.size()));
    for (std::size_t k = 0; k < t.size(); ++k)
      if (t[k] != grid.time(static_cast<int>(k))) throw std::runtime_error("time column is not a uniform grid");
    return grid;
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("time column does not describe a grid: ") + e.what());
  }
}

// Maps data coordinates into the plot box inside the 5% margins.
class Canvas {
 public:
  static constexpr double kWidth = 1200.0;
  static constexpr double kHeight = 600.0;

  Canvas(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
    if (!(x1_ > x0_)) x1_ = x0_ + 1.0;
    if (!(y1_ > y0_)) {
      y0_ -= 0.5;
      y1_ += 0.5;
    }
  }

  double px(double x) const { return kMargX + (x - x0_) / (x1_ - x0_) * (kWidth - 2 * kMargX); }
  double py(double y) const { return kHeight - kMargY - (y - y0_) / (y1_ - y0_) * (kHeight - 2 * kMargY); }

  std::string header() const {
    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1200\" height=\"600\" viewBox=\"0 0 1200 600\">\n"
      << "<rect width=\"1200\" height=\"600\" fill=\"white\"/>\n";
    // axes along the bottom and left edges of the plot box
    s << "<path class=\"axis\" d=\"M" << kMargX << ' ' << kHeight - kMargY << " L" << kWidth - kMargX << ' '
      << kHeight - kMargY << "\" stroke=\"black\" fill=\"none\"/>\n";
    s << "<path class=\"axis\" d=\"M" << kMargX << ' ' << kHeight - kMargY << " L" << kMargX << ' ' << kMargY
      << "\" stroke=\"black\" fill=\"none\"/>\n";
    s << label(kMargX, kHeight - kMargY + 20, x0_) << label(kWidth - kMargX, kHeight - kMargY + 20, x1_)
      << label(kMargX - 40, kHeight - kMargY, y0_) << label(kMargX - 40, kMargY, y1_);
    return s.str();
  }

 private:
  static constexpr double kMargX = 0.05 * kWidth;
  static constexpr double kMargY = 0.05 * kHeight;

  static std::string label(double x, double y, double v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%.3g</text>\n", x, y, v);
    return buf;
  }

  double x0_, x1_, y0_, y1_;
};

std::string point(const Canvas& c, double x, double y) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f %.2f", c.px(x), c.py(y));
  return buf;
}

const char* palette(int i) {
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[i % 10];
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_trajectories_csv(std::ostream& out, const TrajectoryGrid& traj) {
  out << 't';
  for (int i = 0; i < traj.n_agents(); ++i) out << ",x" << i + 1;
  out << '\n';
  for (int k = 0; k < traj.steps(); ++k) {
    out << format_real(traj.grid().time(k));
    for (double x : traj.row(k)) out << ',' << format_real(x);
    out << '\n';
  }
}

TrajectoryGrid read_trajectories_csv(std::istream& in) {
  const auto head = split_commas(expect_header(in));
  if (head.size() < 2 || head[0] != "t") throw std::runtime_error("trajectories csv needs header t,x1,...");
  const int n = static_cast<int>(head.size()) - 1;
  for (int i = 0; i < n; ++i)
    if (head[i + 1] != "x" + std::to_string(i + 1)) throw std::runtime_error("unexpected column " + head[i + 1]);
  std::vector<double> times;
  std::vector<double> values;
  std::string line;
  while (next_line(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (static_cast<int>(cells.size()) != n + 1) throw std::runtime_error("ragged trajectories csv row");
    times.push_back(parse_real(cells[0]));
    for (int i = 0; i < n; ++i) values.push_back(parse_real(cells[i + 1]));
  }
  if (times.empty()) throw std::runtime_error("trajectories csv has no rows");
  const TimeGrid grid = grid_from_times(times);
  return TrajectoryGrid(grid, n, std::move(values));
}

void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& history) {
  out << "iteration,energy,grad_norm,saturation_dev\n";
  for (const auto& h : history)
    out << h.iteration << ',' << format_real(h.energy) << ',' << format_real(h.grad_norm) << ','
        << format_real(h.saturation_dev) << '\n';
}

std::vector<HistoryRow> read_history_csv(std::istream& in) {
  if (expect_header(in) != "iteration,energy,grad_norm,saturation_dev")
    throw std::runtime_error("unexpected history csv header");
  std::vector<HistoryRow> rows;
  std::string line;
  while (next_line(in, line)) {
    if (line.empty()) continue;
    const auto c = split_commas(line);
    if (c.size() != 4) throw std::runtime_error("ragged history csv row");
    rows.push_back({parse_integer(c[0]), parse_real(c[1]), parse_real(c[2]), parse_real(c[3])});
  }
  return rows;
}

void write_orbit_csv(std::ostream& out, const BrakeOrbit& orbit) {
  out << "t,a,v\n";
  for (int k = 0; k < orbit.grid.steps(); ++k)
    out << format_real(orbit.grid.time(k)) << ',' << format_real(orbit.a[k]) << ',' << format_real(orbit.v[k])
        << '\n';
}

BrakeOrbit read_orbit_csv(std::istream& in) {
  if (expect_header(in) != "t,a,v") throw std::runtime_error("unexpected orbit csv header");
  std::vector<double> t;
  BrakeOrbit orbit;
  std::string line;
  while (next_line(in, line)) {
    if (line.empty()) continue;
    const auto c = split_commas(line);
    if (c.size() != 3) throw std::runtime_error("ragged orbit csv row");
    t.push_back(parse_real(c[0]));
    orbit.a.push_back(parse_real(c[1]));
    orbit.v.push_back(parse_real(c[2]));
  }
  if (t.empty()) throw std::runtime_error("orbit csv has no rows");
  orbit.grid = grid_from_times(t);
  return orbit;
}

void write_gamma_csv(std::ostream& out, const GammaReport& report) {
  out << "N,t,d2,energy_gap\n";
  for (const auto& e : report.entries)
    for (std::size_t p = 0; p < e.d2.size(); ++p)
      out << e.n_agents << ',' << format_real(e.probe_times[p]) << ',' << format_real(e.d2[p]) << ','
          << format_real(e.energy_gap) << '\n';
}

std::string trajectories_svg(const TrajectoryGrid& traj) {
  const auto& g = traj.grid();
  const auto vals = traj.values();
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  Canvas c(g.time(0), g.time(g.steps() - 1), *lo, *hi);
  std::ostringstream s;
  s << c.header();
  for (int i = 0; i < traj.n_agents(); ++i) {
    s << "<path class=\"agent\" d=\"";
    for (int k = 0; k < g.steps(); ++k) s << (k ? " L" : "M") << point(c, g.time(k), traj(k, i));
    s << "\" stroke=\"" << palette(i) << "\" fill=\"none\" stroke-width=\"1.5\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string orbit_svg(const BrakeOrbit& orbit) {
  const auto& g = orbit.grid;
  const auto [lo, hi] = std::minmax_element(orbit.a.begin(), orbit.a.end());
  Canvas c(g.time(0), g.time(g.steps() - 1), *lo, *hi + 1.0);
  std::ostringstream s;
  s << c.header();
  s << "<path class=\"band\" d=\"";
  for (int k = 0; k < g.steps(); ++k) s << (k ? " L" : "M") << point(c, g.time(k), orbit.a[k]);
  for (int k = g.steps() - 1; k >= 0; --k) s << " L" << point(c, g.time(k), orbit.a[k] + 1.0);
  s << " Z\" fill=\"#1f77b4\" fill-opacity=\"0.3\" stroke=\"none\"/>\n";
  s << "<path class=\"orbit\" d=\"";
  for (int k = 0; k < g.steps(); ++k) s << (k ? " L" : "M") << point(c, g.time(k), orbit.a[k]);
  s << "\" stroke=\"#1f77b4\" fill=\"none\" stroke-width=\"1.5\"/>\n</svg>\n";
  return s.str();
}

std::string gamma_svg(const GammaReport& report) {
  std::vector<double> lx, ly;
  for (const auto& e : report.entries) {
    if (!(e.max_d2 > 0.0)) continue;
    lx.push_back(std::log10(static_cast<double>(e.n_agents)));
    ly.push_back(std::log10(e.max_d2));
  }
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (!lx.empty()) {
    x0 = *std::min_element(lx.begin(), lx.end());
    x1 = *std::max_element(lx.begin(), lx.end());
    y0 = *std::min_element(ly.begin(), ly.end());
    y1 = *std::max_element(ly.begin(), ly.end());
  }
  Canvas c(x0, x1, y0, y1);
  std::ostringstream s;
  s << c.header();
  s << "<path class=\"d2\" d=\"";
  for (std::size_t j = 0; j < lx.size(); ++j) s << (j ? " L" : "M") << point(c, lx[j], ly[j]);
  s << "\" stroke=\"#d62728\" fill=\"none\" stroke-width=\"2\"/>\n";
  for (std::size_t j = 0; j < lx.size(); ++j)
    s << "<circle cx=\"" << c.px(lx[j]) << "\" cy=\"" << c.py(ly[j]) << "\" r=\"4\" fill=\"#d62728\"/>\n";
  s << "</svg>\n";
  return s.str();
}

SvgCheck check_svg(const std::string& svg) {
  namespace pt = boost::property_tree;
  SvgCheck out;
  pt::ptree tree;
  try {
    std::istringstream in(svg);
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    out.error = e.what();
    return out;
  }
  const auto root = tree.get_child_optional("svg");
  if (!root) {
    out.error = "root element is not svg";
    return out;
  }
  out.well_formed = true;
  for (const auto& child : *root)
    if (child.first == "path") ++out.paths;
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace brake
