#include "robust/worst_case.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace robust {

WorstCaseMeasure WorstCaseMeasure::point(double mu, double sigma) {
  WorstCaseMeasure nu;
  nu.atoms_.push_back({mu, sigma, 1.0});
  nu.cache_moments();
  return nu;
}

WorstCaseMeasure WorstCaseMeasure::bernoulli(double mu, double sigma_lo, double sigma_hi,
                                             double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (alpha == 1.0 || sigma_lo == sigma_hi) return point(mu, sigma_lo);
  if (alpha == 0.0) return point(mu, sigma_hi);
  WorstCaseMeasure nu;
  nu.atoms_.push_back({mu, sigma_lo, alpha});
  nu.atoms_.push_back({mu, sigma_hi, 1.0 - alpha});
  nu.cache_moments();
  return nu;
}

WorstCaseMeasure WorstCaseMeasure::from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("measure needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.weight > 0.0)) throw std::invalid_argument("atom weights must be positive");
    if (!(a.sigma > 0.0)) throw std::invalid_argument("atom volatility must be positive");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("atom weights must sum to 1");
  WorstCaseMeasure nu;
  nu.atoms_ = std::move(atoms);
  nu.cache_moments();
  return nu;
}

void WorstCaseMeasure::cache_moments() {
  double mm = 0.0;
  double ms = 0.0;
  for (const auto& a : atoms_) {
    mm += a.weight * a.mu;
    ms += a.weight * a.sigma;
  }
  double var = 0.0;
  for (const auto& a : atoms_) var += a.weight * (a.sigma - ms) * (a.sigma - ms);
  mean_mu_ = mm;
  mean_sigma_ = ms;
  mean_sigma_sq_ = ms * ms + var;
}

double WorstCaseMeasure::low_sigma_weight() const {
  const auto it = std::min_element(atoms_.begin(), atoms_.end(),
                                   [](const Atom& a, const Atom& b) { return a.sigma < b.sigma; });
  return atoms_.size() == 1 ? 1.0 : it->weight;
}

bool WorstCaseMeasure::inside(const UncertaintyRectangle& k, double tol) const {
  return std::all_of(atoms_.begin(), atoms_.end(),
                     [&](const Atom& a) { return k.contains(a.mu, a.sigma, tol); });
}

std::string to_string(KappaBranch branch) {
  switch (branch) {
    case KappaBranch::low_tail: return "LOW_TAIL";
    case KappaBranch::plus_corner: return "PLUS_CORNER";
    case KappaBranch::zero: return "ZERO";
    case KappaBranch::minus_corner: return "MINUS_CORNER";
    case KappaBranch::high_tail: return "HIGH_TAIL";
  }
  return "UNKNOWN";
}

KappaThresholds kappa_thresholds(double b_val, const UncertaintyRectangle& k) {
  const double m_lo = b_val + k.mu_minus();
  const double m_hi = b_val + k.mu_plus();
  const double s_lo = k.sigma_minus();
  const double s_hi = k.sigma_plus();
  const double s_mid = k.sigma_mid();
  KappaThresholds t{};
  t.t2 = -m_hi / s_lo;
  t.t3 = -m_lo / s_hi;
  if (k.sigma_degenerate()) {
    t.t1 = -std::numeric_limits<double>::infinity();
    t.t4 = std::numeric_limits<double>::infinity();
  } else {
    t.t1 = m_hi * s_mid / (s_lo * (s_mid - s_hi));
    t.t4 = m_lo * s_mid / (s_hi * (s_mid - s_lo));
  }
  return t;
}

KappaBranch classify_kappa(double kappa, const KappaThresholds& t) {
  if (kappa <= t.t1) return KappaBranch::low_tail;
  if (kappa <= t.t2) return KappaBranch::plus_corner;
  if (kappa <= t.t3) return KappaBranch::zero;
  if (kappa <= t.t4) return KappaBranch::minus_corner;
  return KappaBranch::high_tail;
}

namespace {

// Mean volatility of the Bernoulli minimiser on a tail branch. kappa == 0 only
// reaches a tail branch when m == 0, where the m / kappa term vanishes.
double tail_mean_sigma(double m, double kappa, const UncertaintyRectangle& k) {
  const double base = k.sigma_product() / k.sigma_mid();
  const double s = kappa == 0.0 ? base : m / kappa + base;
  return std::clamp(s, k.sigma_minus(), k.sigma_plus());
}

WorstCaseMeasure tail_measure(double mu, double sigma_bar, const UncertaintyRectangle& k) {
  const double alpha = (k.sigma_plus() - sigma_bar) / (k.sigma_plus() - k.sigma_minus());
  return WorstCaseMeasure::bernoulli(mu, k.sigma_minus(), k.sigma_plus(),
                                     std::clamp(alpha, 0.0, 1.0));
}

}  // namespace

RatioMinimum minimize_ratio(double b_val, double kappa, const UncertaintyRectangle& k) {
  double m_lo = b_val + k.mu_minus();
  if (m_lo < -kTailTolerance)
    throw std::invalid_argument("minimize_ratio requires b + mu- >= 0");
  m_lo = std::max(m_lo, 0.0);
  const double m_hi = std::max(b_val + k.mu_plus(), m_lo);
  const double s_lo = k.sigma_minus();
  const double s_hi = k.sigma_plus();
  const double s_mid = k.sigma_mid();
  const double c = k.sigma_product();

  const KappaBranch branch = classify_kappa(kappa, kappa_thresholds(b_val, k));
  switch (branch) {
    case KappaBranch::low_tail: {
      const double value = kappa * (2.0 * m_hi * s_mid + kappa * c) / (s_mid * s_mid);
      return {tail_measure(k.mu_plus(), tail_mean_sigma(m_hi, kappa, k), k),
              std::max(value, 0.0), branch};
    }
    case KappaBranch::plus_corner: {
      const double e = (m_hi + kappa * s_lo) / s_lo;
      return {WorstCaseMeasure::point(k.mu_plus(), s_lo), e * e, branch};
    }
    case KappaBranch::zero: {
      double sigma_hat = s_mid;
      double mu_hat = k.mu_minus();
      if (k.sigma_degenerate()) {
        sigma_hat = s_lo;
        mu_hat = -kappa * sigma_hat - b_val;
      } else if (kappa < 0.0) {
        const double lo = std::max(s_lo, m_lo / -kappa);
        const double hi = std::min(s_hi, m_hi / -kappa);
        sigma_hat = std::clamp(0.5 * (lo + hi), s_lo, s_hi);
        mu_hat = -kappa * sigma_hat - b_val;
      }
      mu_hat = std::clamp(mu_hat, k.mu_minus(), k.mu_plus());
      return {WorstCaseMeasure::point(mu_hat, sigma_hat), 0.0, branch};
    }
    case KappaBranch::minus_corner: {
      const double e = (m_lo + kappa * s_hi) / s_hi;
      return {WorstCaseMeasure::point(k.mu_minus(), s_hi), e * e, branch};
    }
    case KappaBranch::high_tail: {
      const double value = kappa * (2.0 * m_lo * s_mid + kappa * c) / (s_mid * s_mid);
      return {tail_measure(k.mu_minus(), tail_mean_sigma(m_lo, kappa, k), k),
              std::max(value, 0.0), branch};
    }
  }
  throw std::logic_error("unreachable kappa branch");
}

double ratio_value(double b_val, double kappa, const WorstCaseMeasure& nu) {
  const double num = b_val + nu.mean_mu() + kappa * nu.mean_sigma();
  return num * num / nu.mean_sigma_sq();
}

BruteForceMinimum brute_force_min(double b_val, double kappa, const UncertaintyRectangle& k,
                                  int resolution) {
  if (resolution < 10) throw std::invalid_argument("brute_force_min needs resolution >= 10");
  const int n = resolution;
  const double mu_lo = k.mu_minus();
  const double mu_step = (k.mu_plus() - mu_lo) / (n - 1);
  const double s_lo = k.sigma_minus();
  const double s_hi = k.sigma_plus();
  const double s_step = (s_hi - s_lo) / (n - 1);

  double best = std::numeric_limits<double>::infinity();
  double best_mu = mu_lo;
  double best_a = s_lo;  // sigma for point masses, alpha for Bernoulli
  bool best_is_point = true;

  for (int i = 0; i < n; ++i) {
    const double mu = i == n - 1 ? k.mu_plus() : mu_lo + i * mu_step;
    const double m = b_val + mu;
    for (int j = 0; j < n; ++j) {
      const double s = j == n - 1 ? s_hi : s_lo + j * s_step;
      const double e = m + kappa * s;
      const double v = e * e / (s * s);
      if (v < best) {
        best = v;
        best_mu = mu;
        best_a = s;
        best_is_point = true;
      }
    }
    for (int j = 0; j < n; ++j) {
      const double alpha = static_cast<double>(j) / (n - 1);
      const double mean = alpha * s_lo + (1.0 - alpha) * s_hi;
      const double second = alpha * s_lo * s_lo + (1.0 - alpha) * s_hi * s_hi;
      const double e = m + kappa * mean;
      const double v = e * e / second;
      if (v < best) {
        best = v;
        best_mu = mu;
        best_a = alpha;
        best_is_point = false;
      }
    }
  }
  auto measure = best_is_point ? WorstCaseMeasure::point(best_mu, best_a)
                               : WorstCaseMeasure::bernoulli(best_mu, s_lo, s_hi, best_a);
  return {best, std::move(measure)};
}

std::optional<std::pair<double, double>> psi_critical_points(double m_a, double kappa,
                                                             const UncertaintyRectangle& k) {
  if (kappa == 0.0) return std::nullopt;
  return std::make_pair(-m_a / kappa, m_a / kappa + k.sigma_product() / k.sigma_mid());
}

}  // namespace robust
