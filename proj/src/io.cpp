#include "robust/io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "robust/format.hpp"

namespace robust {

namespace {

std::string full(double v) { return format_double(v, 17); }
std::string exact(double v) { return format_double(v); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    return true;
  }
  return false;
}

double cell_number(const std::string& s, std::size_t row) {
  double v;
  if (!parse_double(s, v))
    throw std::runtime_error("surface CSV row " + std::to_string(row) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

void write_provenance(std::ostream& out, const Provenance& p) {
  out << "# robust-hjbi " << p.version << " config=" << p.config_hash << " seed=" << p.seed << '\n';
}

void write_surface_csv(std::ostream& out, const ValueSurface& s, const Provenance& p) {
  write_provenance(out, p);
  out << "t,y,u,u_y\n";
  const auto& g = s.grid();
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < g.n_y(); ++j)
      out << full(g.t(i)) << ',' << full(g.y(j)) << ',' << full(s.u(i, j)) << ','
          << full(s.u_y(i, j)) << '\n';
}

ValueSurface read_surface_csv(std::istream& in, const GridSpec& grid) {
  std::string line;
  if (!next_data_line(in, line) || line != "t,y,u,u_y")
    throw std::runtime_error("surface CSV: missing header 't,y,u,u_y'");
  const std::size_t n = static_cast<std::size_t>(grid.n_t()) * grid.n_y();
  std::vector<double> u;
  u.reserve(n);
  while (next_data_line(in, line)) {
    const std::size_t row = u.size();
    if (row >= n) throw std::runtime_error("surface CSV: more rows than the grid has nodes");
    const auto cells = split(line, ',');
    if (cells.size() != 4)
      throw std::runtime_error("surface CSV row " + std::to_string(row) + ": expected 4 columns");
    const int i = static_cast<int>(row / grid.n_y());
    const int j = static_cast<int>(row % grid.n_y());
    if (cell_number(cells[0], row) != grid.t(i) || cell_number(cells[1], row) != grid.y(j))
      throw std::runtime_error("surface CSV row " + std::to_string(row) +
                               ": node does not match the configured grid");
    u.push_back(cell_number(cells[2], row));
  }
  if (u.size() != n)
    throw std::runtime_error("surface CSV: expected " + std::to_string(n) + " rows, found " +
                             std::to_string(u.size()));
  return ValueSurface(grid, std::move(u));
}

void write_surface_meta(std::ostream& out, const ValueSurface& s, const std::string& surface_hash) {
  const auto& g = s.grid();
  const auto& d = s.diagnostics;
  nlohmann::json j = {
      {"surface_hash", surface_hash},
      {"version", ROBUST_VERSION},
      {"grid", {{"T", g.horizon()}, {"n_t", g.n_t()}, {"n_y", g.n_y()},
                {"y_radius", g.y_radius()}, {"theta", g.theta()}}},
      {"diagnostics", {{"time_steps", d.time_steps}, {"max_residual", d.max_residual},
                       {"max_abs_u_y", d.max_abs_u_y}, {"max_gradient_cfl", d.max_gradient_cfl}}}};
  out << j.dump(2) << '\n';
}

SurfaceMeta read_surface_meta(std::istream& in) {
  try {
    const auto j = nlohmann::json::parse(in);
    SurfaceMeta m;
    m.surface_hash = j.at("surface_hash").get<std::string>();
    const auto& d = j.at("diagnostics");
    m.diagnostics.time_steps = d.at("time_steps").get<int>();
    m.diagnostics.max_residual = d.at("max_residual").get<double>();
    m.diagnostics.max_abs_u_y = d.at("max_abs_u_y").get<double>();
    m.diagnostics.max_gradient_cfl = d.at("max_gradient_cfl").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("surface metadata: ") + e.what());
  }
}

void write_policy_csv(std::ostream& out, const PolicyField& pf, const UncertaintyRectangle& k,
                      const Provenance& p) {
  write_provenance(out, p);
  out << "t,y,mu_star_mean,sigma_star_mean,alpha,branch,pi_frac\n";
  const auto& g = pf.grid();
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < g.n_y(); ++j) {
      const auto& nu = pf.nu_star(i, j);
      double low_weight = 0.0;
      for (const auto& a : nu.atoms())
        if (std::abs(a.sigma - k.sigma_minus()) <= 1e-12) low_weight += a.weight;
      out << exact(g.t(i)) << ',' << exact(g.y(j)) << ',' << exact(nu.mean_mu()) << ','
          << exact(nu.mean_sigma()) << ',' << exact(low_weight) << ','
          << to_string(pf.branch(i, j)) << ',' << exact(pf.pi_frac(i, j)) << '\n';
    }
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows, const Provenance& p) {
  write_provenance(out, p);
  out << "policy,adversary,eu,se,verdict\n";
  for (const auto& r : rows)
    out << r.policy << ',' << r.adversary << ',' << exact(r.eu) << ',' << exact(r.se) << ','
        << r.verdict << '\n';
}

void write_histogram_csv(std::ostream& out, const std::vector<double>& sample, int bins,
                         const Provenance& p) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  write_provenance(out, p);
  out << "bin_lo,bin_hi,count\n";
  if (sample.empty()) return;
  const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
  const double lo = *lo_it;
  const double hi = *hi_it > lo ? *hi_it : lo + 1.0;
  const double width = (hi - lo) / bins;
  std::vector<std::int64_t> count(bins, 0);
  for (double x : sample) {
    int b = static_cast<int>((x - lo) / width);
    count[std::clamp(b, 0, bins - 1)]++;
  }
  for (int b = 0; b < bins; ++b)
    out << exact(lo + b * width) << ',' << exact(b == bins - 1 ? hi : lo + (b + 1) * width) << ','
        << count[b] << '\n';
}

}  // namespace robust
