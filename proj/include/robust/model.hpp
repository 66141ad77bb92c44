#pragma once

// Market model, uncertainty rectangle, power utility and discretisation specs.
//
// Coefficient functions b, beta and r are restricted to parametric families with
// exactly constant tails outside [-N, N], so the boundedness and
// compact-support-derivative assumptions can be checked by construction.

#include <string>
#include <utility>
#include <vector>

namespace robust {

class CoefficientFn {
 public:
  enum class Kind { constant, smooth_ramp, piecewise_linear };

  /// f(y) = value everywhere; tail radius 0.
  static CoefficientFn constant(double value);

  /// Scaled quintic smoothstep (C2) from `left` (y <= -radius) to `right` (y >= radius).
  static CoefficientFn smooth_ramp(double left, double right, double radius);

  /// Linear interpolation between knots (y, value), clamped to the first and
  /// last knot values outside. Knots must be strictly increasing in y and lie
  /// in [-radius, radius].
  static CoefficientFn piecewise_linear(std::vector<std::pair<double, double>> knots,
                                        double radius);

  double operator()(double y) const { return value(y); }
  double value(double y) const;
  double derivative(double y) const;

  Kind kind() const { return kind_; }
  double left_tail() const { return left_; }
  double right_tail() const { return right_; }
  double tail_radius() const { return radius_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  /// Upper bound on |f| over the real line.
  double sup_abs() const;

 private:
  CoefficientFn() = default;

  Kind kind_ = Kind::constant;
  double left_ = 0.0;
  double right_ = 0.0;
  double radius_ = 0.0;
  std::vector<std::pair<double, double>> knots_;
};

std::string to_string(CoefficientFn::Kind kind);

/// Excess drift b, factor drift beta, short rate r and the correlation between
/// the traded asset and the factor.
struct MarketModel {
  MarketModel(CoefficientFn b, CoefficientFn beta, CoefficientFn r, double rho);

  CoefficientFn b;
  CoefficientFn beta;
  CoefficientFn r;
  double rho;

  /// Largest tail radius among the three coefficients.
  double tail_radius() const;
};

/// K = [mu-, mu+] x [sigma-, sigma+] with sigma- > 0.
class UncertaintyRectangle {
 public:
  UncertaintyRectangle(double mu_minus, double mu_plus, double sigma_minus, double sigma_plus);

  double mu_minus() const { return mu_minus_; }
  double mu_plus() const { return mu_plus_; }
  double sigma_minus() const { return sigma_minus_; }
  double sigma_plus() const { return sigma_plus_; }

  double sigma_mid() const { return 0.5 * (sigma_minus_ + sigma_plus_); }
  double sigma_product() const { return sigma_minus_ * sigma_plus_; }

  /// True when the volatility interval is a single point.
  bool sigma_degenerate() const { return sigma_plus_ == sigma_minus_; }

  bool contains(double mu, double sigma, double tol = 1e-12) const;

 private:
  double mu_minus_;
  double mu_plus_;
  double sigma_minus_;
  double sigma_plus_;
};

/// U(x) = x^q / q with q < 1, q != 0.
class PowerUtility {
 public:
  explicit PowerUtility(double q);

  double q() const { return q_; }
  double operator()(double x) const;

 private:
  double q_;
};

/// Uniform (t, y) grid on [0, T] x [-y_radius, y_radius]; theta is the implicit
/// weight of the diffusion term.
class GridSpec {
 public:
  GridSpec(double horizon, int n_t, double y_radius, int n_y, double theta = 0.5);

  double horizon() const { return horizon_; }
  int n_t() const { return n_t_; }
  int n_y() const { return n_y_; }
  double y_radius() const { return y_radius_; }
  double theta() const { return theta_; }

  double dt() const { return horizon_ / (n_t_ - 1); }
  double dy() const { return 2.0 * y_radius_ / (n_y_ - 1); }
  double t(int i) const { return i == n_t_ - 1 ? horizon_ : i * dt(); }
  double y(int j) const { return j == n_y_ - 1 ? y_radius_ : -y_radius_ + j * dy(); }

  /// Same domain with both steps halved.
  GridSpec refined() const;

 private:
  double horizon_;
  int n_t_;
  double y_radius_;
  int n_y_;
  double theta_;
};

struct AssumptionViolation {
  std::string assumption;   // "A1", "A2", "A3" or "r>=0"
  std::string coefficient;  // "b", "beta", "r" or "b+mu-"
  double witness_y;
  std::string detail;
};

struct ValidationReport {
  std::vector<AssumptionViolation> violations;
  int points_checked = 0;

  bool ok() const { return violations.empty(); }
};

inline constexpr double kTailTolerance = 1e-12;

/// Checks boundedness, constant tails with zero derivative, r >= 0 and
/// b(y) + mu- >= 0 at the tails and at `samples` interior points. Violations are
/// returned as data; nothing is thrown for a failing assumption.
ValidationReport validate_assumptions(const MarketModel& m, const UncertaintyRectangle& k,
                                      int samples = 401);

}  // namespace robust
