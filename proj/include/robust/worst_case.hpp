#pragma once

// Minimisation of ((b + mu, nu) + kappa (sigma, nu))^2 / (sigma^2, nu) over
// probability measures nu on the uncertainty rectangle.
//
// The minimiser has a deterministic drift and a volatility that is either a
// single point or Bernoulli on {sigma-, sigma+}. Which of the five regimes
// applies depends on where kappa falls relative to four thresholds built from
// m- = b + mu- and m+ = b + mu+.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robust/model.hpp"

namespace robust {

struct Atom {
  double mu;
  double sigma;
  double weight;
};

/// Finite-support probability measure on K with cached first moments.
class WorstCaseMeasure {
 public:
  static WorstCaseMeasure point(double mu, double sigma);

  /// alpha * delta(mu, sigma_lo) + (1 - alpha) * delta(mu, sigma_hi). Atoms of
  /// zero weight are dropped, so alpha in {0, 1} yields a point mass.
  static WorstCaseMeasure bernoulli(double mu, double sigma_lo, double sigma_hi, double alpha);

  /// General finite measure; weights must be positive and sum to 1.
  static WorstCaseMeasure from_atoms(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  double mean_mu() const { return mean_mu_; }
  double mean_sigma() const { return mean_sigma_; }
  /// Stored as mean_sigma^2 + variance, so mean_sigma^2 <= mean_sigma_sq holds
  /// exactly in floating point.
  double mean_sigma_sq() const { return mean_sigma_sq_; }

  /// Weight of the lowest-volatility atom (1 for point masses).
  double low_sigma_weight() const;

  bool inside(const UncertaintyRectangle& k, double tol = 1e-12) const;

 private:
  WorstCaseMeasure() = default;
  void cache_moments();

  std::vector<Atom> atoms_;
  double mean_mu_ = 0.0;
  double mean_sigma_ = 0.0;
  double mean_sigma_sq_ = 0.0;
};

enum class KappaBranch { low_tail, plus_corner, zero, minus_corner, high_tail };

std::string to_string(KappaBranch branch);

/// Branch boundaries t1 <= t2 <= t3 <= t4. Intervals are left-open and
/// right-closed: low_tail is kappa <= t1, plus_corner t1 < kappa <= t2, etc.
/// For sigma- = sigma+ the outer thresholds are -inf and +inf.
struct KappaThresholds {
  double t1;
  double t2;
  double t3;
  double t4;
};

KappaThresholds kappa_thresholds(double b_val, const UncertaintyRectangle& k);
KappaBranch classify_kappa(double kappa, const KappaThresholds& t);

struct RatioMinimum {
  WorstCaseMeasure measure;
  double value;
  KappaBranch branch;
};

/// Closed-form minimiser. Requires b_val + mu- >= 0 (throws std::invalid_argument
/// otherwise).
RatioMinimum minimize_ratio(double b_val, double kappa, const UncertaintyRectangle& k);

/// ((b + mean_mu) + kappa mean_sigma)^2 / mean_sigma_sq evaluated on a measure.
double ratio_value(double b_val, double kappa, const WorstCaseMeasure& nu);

struct BruteForceMinimum {
  double value;
  WorstCaseMeasure measure;
};

/// Exhaustive search over point masses on a resolution x resolution grid of K
/// and over alpha delta(mu, sigma-) + (1 - alpha) delta(mu, sigma+) on a
/// resolution x resolution (mu, alpha) grid.
BruteForceMinimum brute_force_min(double b_val, double kappa, const UncertaintyRectangle& k,
                                  int resolution);

/// Stationary points of psi(y) = (m_a + kappa y)^2 / (2 sigma_M y - sigma- sigma+):
/// the zero y1 = -m_a / kappa and the other root y2 = m_a / kappa + sigma- sigma+ / sigma_M.
/// Empty for kappa == 0.
std::optional<std::pair<double, double>> psi_critical_points(double m_a, double kappa,
                                                             const UncertaintyRectangle& k);

}  // namespace robust
