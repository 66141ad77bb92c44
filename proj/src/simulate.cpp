#include "robust/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "robust/format.hpp"

namespace robust {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t path_seed(std::uint64_t master, std::uint64_t path) {
  return splitmix64(master + path * 0x9E3779B97F4A7C15ULL);
}

void SimConfig::validate() const {
  if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw std::invalid_argument("x0 must be positive");
  if (!std::isfinite(y0)) throw std::invalid_argument("y0 must be finite");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("horizon must be positive");
  if (threads < 0) throw std::invalid_argument("threads must be >= 0");
}

PortfolioPolicy PortfolioPolicy::constant(double fraction) {
  PortfolioPolicy p;
  p.constant_ = fraction;
  p.label_ = "constant(" + format_double(fraction) + ")";
  return p;
}

PortfolioPolicy PortfolioPolicy::field(std::shared_ptr<const PolicyField> field, double scale) {
  if (!field) throw std::invalid_argument("policy field is null");
  PortfolioPolicy p;
  p.field_ = std::move(field);
  p.scale_ = scale;
  p.label_ = scale == 1.0 ? "pi*" : "pi*x" + format_double(scale);
  return p;
}

AdversaryPolicy AdversaryPolicy::field(std::shared_ptr<const PolicyField> field) {
  if (!field) throw std::invalid_argument("policy field is null");
  AdversaryPolicy a;
  a.kind_ = Kind::field;
  a.field_ = std::move(field);
  a.label_ = "nu*";
  return a;
}

AdversaryPolicy AdversaryPolicy::chattering(std::shared_ptr<const PolicyField> field) {
  AdversaryPolicy a = AdversaryPolicy::field(std::move(field));
  a.kind_ = Kind::chattering;
  a.label_ = "chattering(nu*)";
  return a;
}

AdversaryPolicy AdversaryPolicy::point(double mu, double sigma) {
  AdversaryPolicy a;
  a.kind_ = Kind::constant_point;
  a.fixed_ = std::make_shared<const WorstCaseMeasure>(WorstCaseMeasure::point(mu, sigma));
  a.label_ = "point(" + format_double(mu, 6) + ";" + format_double(sigma, 6) + ")";
  return a;
}

AdversaryPolicy AdversaryPolicy::measure(WorstCaseMeasure nu) {
  AdversaryPolicy a;
  a.kind_ = Kind::constant_measure;
  a.label_ = "measure(";
  for (std::size_t i = 0; i < nu.atoms().size(); ++i) {
    const auto& at = nu.atoms()[i];
    if (i) a.label_ += " ";
    a.label_ += format_double(at.weight, 6) + "@" + format_double(at.mu, 6) + ";" +
                format_double(at.sigma, 6);
  }
  a.label_ += ")";
  a.fixed_ = std::make_shared<const WorstCaseMeasure>(std::move(nu));
  return a;
}

bool AdversaryPolicy::inside(const UncertaintyRectangle& k) const {
  if (!field_) return fixed_->inside(k);
  const auto& g = field_->grid();
  for (int i = 0; i < g.n_t(); ++i)
    for (int j = 0; j < g.n_y(); ++j)
      if (!field_->nu_star(i, j).inside(k)) return false;
  return true;
}

void RunningMoments::add(double x) {
  ++n;
  const double delta = x - mean;
  mean += delta / static_cast<double>(n);
  m2 += delta * (x - mean);
}

void RunningMoments::merge(const RunningMoments& other) {
  if (other.n == 0) return;
  if (n == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n);
  const double nb = static_cast<double>(other.n);
  const double delta = other.mean - mean;
  const double total = na + nb;
  mean += delta * nb / total;
  m2 += other.m2 + delta * delta * na * nb / total;
  n += other.n;
}

namespace {

struct PathFailure {
  std::int64_t path = std::numeric_limits<std::int64_t>::max();
  std::exception_ptr error;
};

}  // namespace

UtilityEstimate simulate_eu(const PortfolioPolicy& policy, const AdversaryPolicy& adversary,
                            const MarketModel& m, const PowerUtility& util,
                            const SimConfig& cfg, std::vector<double>* terminal_wealth) {
  cfg.validate();
  const std::int64_t n_paths = cfg.n_paths;
  const int n_steps = cfg.n_steps;
  const double dt = cfg.horizon / n_steps;
  const double sqdt = std::sqrt(dt);
  const double q = util.q();
  const double rho = m.rho;
  const double rho2 = rho * rho;
  const double log_x0 = std::log(cfg.x0);
  const bool chatter = adversary.kind() == AdversaryPolicy::Kind::chattering;

  std::vector<double> utility(static_cast<std::size_t>(n_paths));
  std::vector<double> wealth(static_cast<std::size_t>(n_paths));

  auto run_path = [&](std::int64_t p) {
    std::mt19937_64 eng(path_seed(cfg.seed, static_cast<std::uint64_t>(p)));
    std::mt19937_64 atom_eng(chatter ? path_seed(cfg.seed ^ kChatterSalt, p) : 0);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;

    double lnx = log_x0;
    double y = cfg.y0;
    for (int step = 0; step < n_steps; ++step) {
      const double t = step * dt;
      const double f = policy.fraction(t, y);
      const auto& nu = adversary.measure_at(t, y);
      double mm = nu.mean_mu();
      double ms = nu.mean_sigma();
      double ms2 = nu.mean_sigma_sq();
      if (chatter) {
        const double u = uniform(atom_eng);
        const auto& atoms = nu.atoms();
        std::size_t a = 0;
        double acc = atoms[0].weight;
        while (u >= acc && a + 1 < atoms.size()) acc += atoms[++a].weight;
        mm = atoms[a].mu;
        ms = atoms[a].sigma;
        ms2 = ms * ms;
      }
      const double z1 = normal(eng);
      const double z2 = normal(eng);

      const double load = rho2 * (ms * ms) / ms2;
      if (load > 1.0) throw std::logic_error("Cauchy-Schwarz bound violated by adversary measure");

      const double vol = std::sqrt(ms2);
      lnx += (m.r(y) + f * (m.b(y) + mm) - 0.5 * f * f * ms2) * dt + f * vol * sqdt * z1;
      y += m.beta(y) * dt + rho * ms / vol * sqdt * z1 + std::sqrt(1.0 - load) * sqdt * z2;
    }
    if (!std::isfinite(lnx) || !std::isfinite(y))
      throw std::runtime_error("non-finite value on path " + std::to_string(p));
    wealth[p] = std::exp(lnx);
    utility[p] = std::exp(q * lnx) / q;
  };

  int n_threads = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = static_cast<int>(std::min<std::int64_t>(n_threads, n_paths));

  std::vector<PathFailure> failures(n_threads);
  auto worker = [&](int w) {
    const std::int64_t begin = n_paths * w / n_threads;
    const std::int64_t end = n_paths * (w + 1) / n_threads;
    for (std::int64_t p = begin; p < end; ++p) {
      try {
        run_path(p);
      } catch (...) {
        failures[w] = {p, std::current_exception()};
        return;
      }
    }
  };
  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  const auto first_failure = std::min_element(
      failures.begin(), failures.end(),
      [](const PathFailure& a, const PathFailure& b) { return a.path < b.path; });
  if (first_failure->error) std::rethrow_exception(first_failure->error);

  RunningMoments acc;
  for (double u : utility) acc.add(u);

  UtilityEstimate est;
  est.mean = acc.mean;
  est.std_error = std::sqrt(acc.variance() / static_cast<double>(n_paths));
  est.n_paths = n_paths;
  est.min_terminal_wealth = *std::min_element(wealth.begin(), wealth.end());
  est.max_terminal_wealth = *std::max_element(wealth.begin(), wealth.end());
  if (terminal_wealth) *terminal_wealth = std::move(wealth);
  return est;
}

bool SaddleReport::all_passed() const {
  return std::all_of(findings.begin(), findings.end(),
                     [](const SaddleFinding& f) { return f.passed; });
}

SaddleReport verify_saddle(const ValueSurface& s, std::shared_ptr<const PolicyField> pf,
                           const MarketModel& m, const UncertaintyRectangle& k,
                           const PowerUtility& util, const SimConfig& cfg,
                           const DeviationSpec& deviations) {
  if (std::abs(cfg.horizon - s.grid().horizon()) > 1e-12)
    throw std::invalid_argument("simulation horizon must match the surface horizon");

  SaddleReport report;
  report.pde_value = value_function(s, 0.0, cfg.x0, cfg.y0, util.q());

  const auto pi_star = PortfolioPolicy::field(pf);
  const auto nu_star = AdversaryPolicy::field(pf);
  report.baseline = simulate_eu(pi_star, nu_star, m, util, cfg);
  const double v0 = report.baseline.mean;
  const double se0 = report.baseline.std_error;
  const double z = deviations.n_sigma;

  auto combined = [&](double se) { return std::sqrt(se * se + se0 * se0); };

  {
    const double gap = std::abs(v0 - report.pde_value);
    const double bound = z * se0 + deviations.pde_tolerance;
    report.findings.push_back(
        {"value_match", pi_star.label(), nu_star.label(), v0, se0, bound, gap <= bound});
  }

  std::vector<AdversaryPolicy> adversaries;
  for (double mu : {k.mu_minus(), k.mu_plus()})
    for (double sigma : {k.sigma_minus(), k.sigma_plus()})
      adversaries.push_back(AdversaryPolicy::point(mu, sigma));
  std::mt19937_64 dev_rng(deviations.seed);
  std::uniform_real_distribution<double> unit;
  for (int i = 0; i < deviations.random_points; ++i) {
    const double mu = k.mu_minus() + (k.mu_plus() - k.mu_minus()) * unit(dev_rng);
    const double sigma = k.sigma_minus() + (k.sigma_plus() - k.sigma_minus()) * unit(dev_rng);
    adversaries.push_back(AdversaryPolicy::point(mu, sigma));
  }
  if (deviations.chattering) adversaries.push_back(AdversaryPolicy::chattering(pf));

  for (const auto& adv : adversaries) {
    const auto est = simulate_eu(pi_star, adv, m, util, cfg);
    const double bound = v0 - z * combined(est.std_error);
    report.findings.push_back({"adversary_deviation", pi_star.label(), adv.label(), est.mean,
                               est.std_error, bound, est.mean >= bound});
    if (adv.kind() == AdversaryPolicy::Kind::chattering) {
      const double tol = z * combined(est.std_error);
      report.findings.push_back({"chattering_agreement", pi_star.label(), adv.label(), est.mean,
                                 est.std_error, tol, std::abs(est.mean - v0) <= tol});
    }
  }

  for (double scale : deviations.policy_scales) {
    const auto pol = PortfolioPolicy::field(pf, scale);
    const auto est = simulate_eu(pol, nu_star, m, util, cfg);
    const double bound = v0 + z * combined(est.std_error);
    report.findings.push_back({"policy_deviation", pol.label(), nu_star.label(), est.mean,
                               est.std_error, bound, est.mean <= bound});
  }
  return report;
}

}  // namespace robust
