#pragma once

// Euler-Maruyama simulation of the relaxed (wealth, factor) system under a
// portfolio policy and an adversary choosing measures on K:
//
//   d ln X = [ r(Y) + f (b(Y) + (mu, nu)) - 1/2 f^2 (sigma^2, nu) ] dt
//            + f sqrt((sigma^2, nu)) dW
//   dY     = beta(Y) dt + rho (sigma, nu) / sqrt((sigma^2, nu)) dW
//            + sqrt(1 - rho^2 (sigma, nu)^2 / (sigma^2, nu)) dW_perp
//
// with f the wealth fraction held in the risky asset.
//
// Randomness: path p draws from its own std::mt19937_64 seeded with
// splitmix64(seed + p * 0x9E3779B97F4A7C15), so results do not depend on how
// paths are split across threads. The chattering adversary samples atoms from
// a second stream (seed xor kChatterSalt) so that its Brownian increments are
// the same as those of the moment-based run.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "robust/model.hpp"
#include "robust/pde.hpp"
#include "robust/strategy.hpp"
#include "robust/worst_case.hpp"

namespace robust {

inline constexpr std::uint64_t kChatterSalt = 0xC4A77E5ULL;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t path_seed(std::uint64_t master, std::uint64_t path);

struct SimConfig {
  std::int64_t n_paths = 200000;
  int n_steps = 500;
  std::uint64_t seed = 20240611;
  double x0 = 1.0;
  double y0 = 0.0;
  double horizon = 1.0;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

class PortfolioPolicy {
 public:
  static PortfolioPolicy constant(double fraction);
  static PortfolioPolicy field(std::shared_ptr<const PolicyField> field, double scale = 1.0);

  double fraction(double t, double y) const {
    return field_ ? scale_ * field_->fraction(t, y) : constant_;
  }
  const std::string& label() const { return label_; }

 private:
  std::shared_ptr<const PolicyField> field_;
  double constant_ = 0.0;
  double scale_ = 1.0;
  std::string label_;
};

class AdversaryPolicy {
 public:
  enum class Kind { field, constant_point, constant_measure, chattering };

  static AdversaryPolicy field(std::shared_ptr<const PolicyField> field);
  static AdversaryPolicy chattering(std::shared_ptr<const PolicyField> field);
  static AdversaryPolicy point(double mu, double sigma);
  static AdversaryPolicy measure(WorstCaseMeasure nu);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }

  /// Measure in force at (t, y).
  const WorstCaseMeasure& measure_at(double t, double y) const {
    return field_ ? field_->measure(t, y) : *fixed_;
  }

  /// All referenced atoms lie in K.
  bool inside(const UncertaintyRectangle& k) const;

 private:
  Kind kind_ = Kind::constant_point;
  std::shared_ptr<const PolicyField> field_;
  std::shared_ptr<const WorstCaseMeasure> fixed_;
  std::string label_;
};

/// Welford mean/variance with Chan's parallel merge.
struct RunningMoments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const RunningMoments& other);
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

struct UtilityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_paths = 0;
  double min_terminal_wealth = 0.0;
  double max_terminal_wealth = 0.0;
};

/// Estimates E U(X_T). If `terminal_wealth` is given it receives X_T per path.
/// Throws std::invalid_argument for bad configs, std::runtime_error for a
/// non-finite path and std::logic_error if the Cauchy-Schwarz bound
/// rho^2 (sigma, nu)^2 <= (sigma^2, nu) is ever violated.
UtilityEstimate simulate_eu(const PortfolioPolicy& policy, const AdversaryPolicy& adversary,
                            const MarketModel& m, const PowerUtility& util,
                            const SimConfig& cfg, std::vector<double>* terminal_wealth = nullptr);

struct DeviationSpec {
  int random_points = 4;
  std::vector<double> policy_scales{0.0, 0.5, 0.8, 1.2, 1.5};
  std::uint64_t seed = 7;
  double pde_tolerance = 1e-3;
  double n_sigma = 3.0;
  bool chattering = true;
};

struct SaddleFinding {
  std::string check;  // value_match, adversary_deviation, policy_deviation, chattering_agreement
  std::string policy;
  std::string adversary;
  double estimate;
  double std_error;
  double bound;  // threshold the estimate was compared against
  bool passed;
};

struct SaddleReport {
  double pde_value = 0.0;
  UtilityEstimate baseline;
  std::vector<SaddleFinding> findings;

  bool all_passed() const;
};

/// Monte-Carlo check of the saddle structure of (pi*, nu*). Failed inequalities
/// are reported as findings, not thrown.
SaddleReport verify_saddle(const ValueSurface& s, std::shared_ptr<const PolicyField> pf,
                           const MarketModel& m, const UncertaintyRectangle& k,
                           const PowerUtility& util, const SimConfig& cfg,
                           const DeviationSpec& deviations = {});

}  // namespace robust
