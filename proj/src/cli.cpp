#include "robust/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "robust/config.hpp"
#include "robust/format.hpp"
#include "robust/io.hpp"
#include "robust/pde.hpp"
#include "robust/strategy.hpp"
#include "robust/worst_case.hpp"

namespace robust {

namespace fs = std::filesystem;

namespace {

class PrerequisiteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return format_double(v, 10); }

RunConfig effective_config(const CliOptions& opts) {
  if (opts.config_path.empty()) throw ConfigError("--config is required for '" + opts.command + "'");
  RunConfig c = load_config(opts.config_path);
  if (opts.seed) c.sim.seed = *opts.seed;
  if (opts.paths) c.sim.n_paths = *opts.paths;
  if (opts.grid) {
    try {
      c.grid = GridSpec(c.grid.horizon(), opts.grid->first, c.grid.y_radius(), opts.grid->second,
                        c.grid.theta());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--grid: ") + e.what());
    }
  }
  try {
    c.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("sim: ") + e.what());
  }
  return c;
}

fs::path output_dir(const CliOptions& opts, const RunConfig& c) {
  fs::path dir;
  if (opts.out_dir)
    dir = *opts.out_dir;
  else if (c.output)
    dir = *c.output;
  else if (const char* env = std::getenv(kOutputEnv); env && *env)
    dir = env;
  else
    dir = "out";
  fs::create_directories(dir);
  return dir;
}

Provenance provenance(const RunConfig& c) { return {config_hash(c), c.sim.seed, ROBUST_VERSION}; }

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

void print_validation(const ValidationReport& rep, std::ostream& out) {
  out << "assumption check (" << rep.points_checked << " points)\n";
  const std::pair<const char*, const char*> items[] = {
      {"A1", "bounded coefficients and derivatives"},
      {"A2", "constant tails outside [-N, N]"},
      {"A3", "b(y) + mu- >= 0"},
      {"r>=0", "non-negative short rate"}};
  for (const auto& [tag, what] : items) {
    int hits = 0;
    for (const auto& v : rep.violations) hits += v.assumption == tag;
    out << "  " << tag << "  " << what << ": " << (hits ? "FAIL" : "pass") << '\n';
    for (const auto& v : rep.violations)
      if (v.assumption == tag)
        out << "      " << v.coefficient << " at y=" << num(v.witness_y) << ": " << v.detail << '\n';
  }
}

ValueSurface load_surface(const RunConfig& c, const fs::path& dir, const CliOptions& opts) {
  const auto csv = dir / "surface.csv";
  const auto meta = dir / "surface.meta.json";
  const std::string hint = "run `robust-hjbi solve --config " + opts.config_path + "` first";
  if (!fs::exists(csv) || !fs::exists(meta))
    throw PrerequisiteError("no cached surface in " + dir.string() + "; " + hint);
  std::ifstream mf(meta);
  SurfaceMeta m;
  try {
    m = read_surface_meta(mf);
  } catch (const std::runtime_error& e) {
    throw PrerequisiteError(std::string(e.what()) + "; " + hint);
  }
  const auto want = surface_hash(c);
  if (m.surface_hash != want)
    throw PrerequisiteError("cached surface in " + dir.string() + " is stale (hash " +
                            m.surface_hash + ", config wants " + want + "); " + hint);
  std::ifstream sf(csv, std::ios::binary);
  try {
    auto s = read_surface_csv(sf, c.grid);
    s.diagnostics = m.diagnostics;
    s.source_hash = m.surface_hash;
    return s;
  } catch (const std::runtime_error& e) {
    throw PrerequisiteError(std::string(e.what()) + "; " + hint);
  }
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
  const auto rep = validate_assumptions(c.model, c.rectangle);
  print_validation(rep, out);
  return rep.ok() ? kExitOk : kExitFailure;
}

int cmd_solve(const CliOptions& opts, const RunConfig& c, std::ostream& out) {
  const auto rep = validate_assumptions(c.model, c.rectangle);
  if (!rep.ok()) {
    print_validation(rep, out);
    return kExitFailure;
  }
  auto s = solve_hjbi(c.model, c.rectangle, c.utility, c.grid);
  s.source_hash = surface_hash(c);
  const auto dir = output_dir(opts, c);
  {
    auto f = open_out(dir / "surface.csv");
    write_surface_csv(f, s, provenance(c));
  }
  {
    auto f = open_out(dir / "surface.meta.json");
    write_surface_meta(f, s, s.source_hash);
  }
  const auto& g = c.grid;
  const auto& d = s.diagnostics;
  out << "grid           " << g.n_t() << " x " << g.n_y() << "  (dt=" << num(g.dt())
      << ", dy=" << num(g.dy()) << ", theta=" << num(g.theta()) << ")\n"
      << "time steps     " << d.time_steps << '\n'
      << "max residual   " << num(d.max_residual) << '\n'
      << "max |u_y|      " << num(d.max_abs_u_y) << '\n'
      << "max dt*L^2     " << num(d.max_gradient_cfl) << '\n'
      << "u(0, y0)       " << num(s.u_at(0.0, c.sim.y0)) << '\n'
      << "wrote          " << (dir / "surface.csv").string() << '\n';
  return kExitOk;
}

int cmd_strategy(const CliOptions& opts, const RunConfig& c, std::ostream& out) {
  const auto dir = output_dir(opts, c);
  const auto s = load_surface(c, dir, opts);
  const auto pf = build_policy(s, c.model, c.rectangle, c.utility);
  auto f = open_out(dir / "policy.csv");
  write_policy_csv(f, pf, c.rectangle, provenance(c));
  const auto& nu = pf.measure(0.0, c.sim.y0);
  out << "pi*/x (0, y0)  " << num(pf.fraction(0.0, c.sim.y0)) << '\n'
      << "nu* (0, y0)    mean mu " << num(nu.mean_mu()) << ", mean sigma " << num(nu.mean_sigma())
      << '\n'
      << "wrote          " << (dir / "policy.csv").string() << '\n';
  return kExitOk;
}

int cmd_simulate(const CliOptions& opts, const RunConfig& c, std::ostream& out) {
  const auto dir = output_dir(opts, c);
  const auto s = load_surface(c, dir, opts);
  auto pf = std::make_shared<const PolicyField>(build_policy(s, c.model, c.rectangle, c.utility));
  const auto pi = PortfolioPolicy::field(pf);
  std::vector<ReportRow> rows;
  std::vector<double> wealth;
  const auto base = simulate_eu(pi, AdversaryPolicy::field(pf), c.model, c.utility, c.sim,
                                opts.histogram_bins > 0 ? &wealth : nullptr);
  rows.push_back({pi.label(), "nu*", base.mean, base.std_error, "-"});
  const auto chat = AdversaryPolicy::chattering(pf);
  const auto ce = simulate_eu(pi, chat, c.model, c.utility, c.sim);
  rows.push_back({pi.label(), chat.label(), ce.mean, ce.std_error, "-"});
  {
    auto f = open_out(dir / "simulation.csv");
    write_report_csv(f, rows, provenance(c));
  }
  const double v0 = value_function(s, 0.0, c.sim.x0, c.sim.y0, c.utility.q());
  out << "v(0, x0, y0)   " << num(v0) << '\n';
  for (const auto& r : rows)
    out << r.policy << " vs " << r.adversary << ": EU " << num(r.eu) << " (SE " << num(r.se)
        << ")\n";
  if (opts.histogram_bins > 0) {
    auto f = open_out(dir / "terminal_wealth_hist.csv");
    write_histogram_csv(f, wealth, opts.histogram_bins, provenance(c));
  }
  out << "wrote          " << (dir / "simulation.csv").string() << '\n';
  return kExitOk;
}

int cmd_verify(const CliOptions& opts, const RunConfig& c, std::ostream& out) {
  const auto dir = output_dir(opts, c);
  const auto s = load_surface(c, dir, opts);
  auto pf = std::make_shared<const PolicyField>(build_policy(s, c.model, c.rectangle, c.utility));
  const auto rep = verify_saddle(s, pf, c.model, c.rectangle, c.utility, c.sim, c.verify);
  std::vector<ReportRow> rows;
  for (const auto& f : rep.findings)
    rows.push_back({f.policy, f.adversary, f.estimate, f.std_error,
                    f.check + (f.passed ? ":pass" : ":FAIL")});
  {
    auto f = open_out(dir / "verify.csv");
    write_report_csv(f, rows, provenance(c));
  }
  out << "v(0, x0, y0)   " << num(rep.pde_value) << '\n';
  int failed = 0;
  for (const auto& f : rep.findings) {
    failed += !f.passed;
    out << (f.passed ? "pass " : "FAIL ") << f.check << "  " << f.policy << " vs " << f.adversary
        << ": EU " << num(f.estimate) << " (SE " << num(f.std_error) << "), bound "
        << num(f.bound) << '\n';
  }
  out << failed << " of " << rep.findings.size() << " checks failed\n";
  return rep.all_passed() ? kExitOk : kExitFailure;
}

UncertaintyRectangle parse_rect(const std::string& spec) {
  std::vector<double> v;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    double x;
    if (!parse_double(cell, x)) throw ConfigError("--rect: bad number '" + cell + "'");
    v.push_back(x);
  }
  if (v.size() != 4) throw ConfigError("--rect expects mu-,mu+,sigma-,sigma+");
  try {
    return UncertaintyRectangle(v[0], v[1], v[2], v[3]);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--rect: ") + e.what());
  }
}

int cmd_oracle(const CliOptions& opts, std::ostream& out) {
  if (!opts.kappa) throw ConfigError("oracle needs --kappa");
  std::optional<UncertaintyRectangle> k;
  if (opts.rect)
    k = parse_rect(*opts.rect);
  else if (!opts.config_path.empty())
    k = load_config(opts.config_path).rectangle;
  else
    throw ConfigError("oracle needs --rect or --config");
  if (opts.resolution < 10) throw ConfigError("--resolution must be at least 10");
  const double b = opts.b_val.value_or(0.0);
  const auto closed = minimize_ratio(b, *opts.kappa, *k);
  const auto brute = brute_force_min(b, *opts.kappa, *k, opts.resolution);
  out << "branch         " << to_string(closed.branch) << '\n'
      << "value          " << num(closed.value) << '\n'
      << "measure        ";
  for (std::size_t i = 0; i < closed.measure.atoms().size(); ++i) {
    const auto& a = closed.measure.atoms()[i];
    out << (i ? " + " : "") << num(a.weight) << " @ (" << num(a.mu) << ", " << num(a.sigma) << ")";
  }
  out << '\n'
      << "brute force    " << num(brute.value) << "  (resolution " << opts.resolution << ")\n"
      << "discrepancy    " << num(std::abs(closed.value - brute.value)) << '\n';
  return kExitOk;
}

int cmd_convergence(const CliOptions& opts, const RunConfig& c, std::ostream& out) {
  if (opts.levels < 1) throw ConfigError("--levels must be at least 1");
  const auto dir = output_dir(opts, c);
  GridSpec g = c.grid;
  double prev = 0.0;
  out << "level  n_t    n_y   residual        ratio\n";
  std::ostringstream csv;
  write_provenance(csv, provenance(c));
  csv << "level,n_t,n_y,dt,dy,residual,ratio,u0\n";
  for (int level = 0; level <= opts.levels; ++level) {
    const auto s = solve_hjbi(c.model, c.rectangle, c.utility, g);
    const double res = s.diagnostics.max_residual;
    const double ratio = level ? prev / res : std::nan("");
    out << level << "      " << g.n_t() << "  " << g.n_y() << "  " << num(res) << "  "
        << (level ? num(ratio) : "-") << '\n';
    csv << level << ',' << g.n_t() << ',' << g.n_y() << ',' << format_double(g.dt(), 17) << ','
        << format_double(g.dy(), 17) << ',' << format_double(res, 17) << ','
        << (level ? format_double(ratio, 17) : "") << ','
        << format_double(s.u_at(0.0, c.sim.y0), 17) << '\n';
    prev = res;
    if (level < opts.levels) g = g.refined();
  }
  auto f = open_out(dir / "convergence.csv");
  f << csv.str();
  return kExitOk;
}

std::pair<int, int> parse_grid(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("--grid expects n_t,n_y");
  try {
    std::size_t a = 0, b = 0;
    const int nt = std::stoi(s.substr(0, comma), &a);
    const int ny = std::stoi(s.substr(comma + 1), &b);
    if (a != comma || b != s.size() - comma - 1) throw ConfigError("--grid expects n_t,n_y");
    return {nt, ny};
  } catch (const std::logic_error&) {
    throw ConfigError("--grid expects two integers n_t,n_y");
  }
}

}  // namespace

int run_command(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (opts.command == "oracle" && !opts.dump_config) return cmd_oracle(opts, out);
    const auto c = effective_config(opts);
    if (opts.dump_config) {
      out << dump_config(c);
      return kExitOk;
    }
    if (opts.command == "validate") return cmd_validate(c, out);
    if (opts.command == "solve") return cmd_solve(opts, c, out);
    if (opts.command == "strategy") return cmd_strategy(opts, c, out);
    if (opts.command == "simulate") return cmd_simulate(opts, c, out);
    if (opts.command == "verify") return cmd_verify(opts, c, out);
    if (opts.command == "convergence") return cmd_convergence(opts, c, out);
    err << "error: unknown command '" << opts.command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n  hint: refine n_t (or coarsen n_y) via --grid\n";
    return kExitConfig;
  } catch (const PrerequisiteError& e) {
    err << "missing prerequisite: " << e.what() << '\n';
    return kExitPrerequisite;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust HJBI solver for power utility under drift and volatility uncertainty",
               "robust-hjbi"};
  app.require_subcommand(1);
  CliOptions opts;
  std::string grid;
  std::uint64_t seed = 0;
  std::int64_t paths = 0;
  double b_val = 0.0, kappa = 0.0;
  std::string rect, out_dir;

  auto* o_config = app.add_option("--config", opts.config_path, "run configuration (JSON)");
  auto* o_out = app.add_option("--out", out_dir, "output directory (default $ROBUST_HJBI_OUT or ./out)");
  auto* o_seed = app.add_option("--seed", seed, "override sim.seed");
  auto* o_paths = app.add_option("--paths", paths, "override sim.n_paths");
  auto* o_grid = app.add_option("--grid", grid, "override grid as n_t,n_y");
  app.add_flag("--dump-config", opts.dump_config, "print the effective configuration and exit");
  (void)o_config;

  const std::pair<const char*, const char*> commands[] = {
      {"validate", "check model assumptions"},
      {"solve", "solve the reduced HJBI equation and cache the surface"},
      {"strategy", "export the worst-case measure and optimal fraction"},
      {"simulate", "Monte-Carlo expected utility under the saddle policies"},
      {"verify", "Monte-Carlo check of the saddle inequalities"},
      {"oracle", "closed-form worst-case ratio against brute force"},
      {"convergence", "grid-refinement self-convergence study"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    if (std::string(name) == "oracle") {
      sub->add_option("--b", b_val, "value of b(y)");
      sub->add_option("--kappa", kappa, "kappa")->required();
      sub->add_option("--rect", rect, "mu-,mu+,sigma-,sigma+ (default: config rectangle)");
      sub->add_option("--resolution", opts.resolution, "brute-force grid resolution");
    }
    if (std::string(name) == "simulate")
      sub->add_option("--histogram", opts.histogram_bins, "write a terminal-wealth histogram with N bins");
    if (std::string(name) == "convergence")
      sub->add_option("--levels", opts.levels, "number of refinements");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  opts.command = app.get_subcommands().front()->get_name();
  if (*o_out) opts.out_dir = out_dir;
  if (*o_seed) opts.seed = seed;
  if (*o_paths) opts.paths = paths;
  auto* sub = app.get_subcommands().front();
  if (opts.command == "oracle") {
    if (sub->count("--b")) opts.b_val = b_val;
    opts.kappa = kappa;
    if (sub->count("--rect")) opts.rect = rect;
  }
  try {
    if (*o_grid) opts.grid = parse_grid(grid);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return run_command(opts, out, err);
}

}  // namespace robust
