#include "robust/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace robust {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

CoefficientFn CoefficientFn::constant(double value) {
  require_finite(value, "constant value");
  CoefficientFn f;
  f.kind_ = Kind::constant;
  f.left_ = f.right_ = value;
  return f;
}

CoefficientFn CoefficientFn::smooth_ramp(double left, double right, double radius) {
  require_finite(left, "ramp left value");
  require_finite(right, "ramp right value");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("ramp radius must be positive and finite");
  CoefficientFn f;
  f.kind_ = Kind::smooth_ramp;
  f.left_ = left;
  f.right_ = right;
  f.radius_ = radius;
  return f;
}

CoefficientFn CoefficientFn::piecewise_linear(std::vector<std::pair<double, double>> knots,
                                              double radius) {
  if (knots.empty()) throw std::invalid_argument("piecewise-linear coefficient needs knots");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("piecewise-linear radius must be positive and finite");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require_finite(knots[i].first, "knot position");
    require_finite(knots[i].second, "knot value");
    if (std::abs(knots[i].first) > radius)
      throw std::invalid_argument("knot lies outside [-radius, radius]");
    if (i > 0 && !(knots[i].first > knots[i - 1].first))
      throw std::invalid_argument("knot positions must be strictly increasing");
  }
  CoefficientFn f;
  f.kind_ = Kind::piecewise_linear;
  f.left_ = knots.front().second;
  f.right_ = knots.back().second;
  f.radius_ = radius;
  f.knots_ = std::move(knots);
  return f;
}

double CoefficientFn::value(double y) const {
  switch (kind_) {
    case Kind::constant:
      return left_;
    case Kind::smooth_ramp: {
      if (y <= -radius_) return left_;
      if (y >= radius_) return right_;
      const double s = (y + radius_) / (2.0 * radius_);
      return left_ + (right_ - left_) * s * s * s * (s * (6.0 * s - 15.0) + 10.0);
    }
    case Kind::piecewise_linear: {
      if (y <= knots_.front().first) return left_;
      if (y >= knots_.back().first) return right_;
      auto hi = std::upper_bound(knots_.begin(), knots_.end(), y,
                                 [](double v, const auto& k) { return v < k.first; });
      auto lo = hi - 1;
      const double w = (y - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    }
  }
  return left_;
}

double CoefficientFn::derivative(double y) const {
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::smooth_ramp: {
      if (y <= -radius_ || y >= radius_) return 0.0;
      const double s = (y + radius_) / (2.0 * radius_);
      return (right_ - left_) * 30.0 * s * s * (1.0 - s) * (1.0 - s) / (2.0 * radius_);
    }
    case Kind::piecewise_linear: {
      if (y <= knots_.front().first || y >= knots_.back().first || knots_.size() < 2) return 0.0;
      auto hi = std::upper_bound(knots_.begin(), knots_.end(), y,
                                 [](double v, const auto& k) { return v < k.first; });
      auto lo = hi - 1;
      return (hi->second - lo->second) / (hi->first - lo->first);
    }
  }
  return 0.0;
}

double CoefficientFn::sup_abs() const {
  double s = std::max(std::abs(left_), std::abs(right_));
  for (const auto& [y, v] : knots_) s = std::max(s, std::abs(v));
  return s;
}

std::string to_string(CoefficientFn::Kind kind) {
  switch (kind) {
    case CoefficientFn::Kind::constant: return "constant";
    case CoefficientFn::Kind::smooth_ramp: return "smooth_ramp";
    case CoefficientFn::Kind::piecewise_linear: return "piecewise_linear";
  }
  return "unknown";
}

MarketModel::MarketModel(CoefficientFn b_, CoefficientFn beta_, CoefficientFn r_, double rho_)
    : b(std::move(b_)), beta(std::move(beta_)), r(std::move(r_)), rho(rho_) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
}

double MarketModel::tail_radius() const {
  return std::max({b.tail_radius(), beta.tail_radius(), r.tail_radius()});
}

UncertaintyRectangle::UncertaintyRectangle(double mu_minus, double mu_plus, double sigma_minus,
                                           double sigma_plus)
    : mu_minus_(mu_minus), mu_plus_(mu_plus), sigma_minus_(sigma_minus), sigma_plus_(sigma_plus) {
  for (double v : {mu_minus, mu_plus, sigma_minus, sigma_plus}) require_finite(v, "rectangle bound");
  if (mu_minus > mu_plus) throw std::invalid_argument("rectangle requires mu- <= mu+");
  if (!(sigma_minus > 0.0)) throw std::invalid_argument("rectangle requires sigma- > 0");
  if (sigma_minus > sigma_plus) throw std::invalid_argument("rectangle requires sigma- <= sigma+");
}

bool UncertaintyRectangle::contains(double mu, double sigma, double tol) const {
  return mu >= mu_minus_ - tol && mu <= mu_plus_ + tol && sigma >= sigma_minus_ - tol &&
         sigma <= sigma_plus_ + tol;
}

PowerUtility::PowerUtility(double q) : q_(q) {
  if (!(q < 1.0) || q == 0.0 || !std::isfinite(q))
    throw std::invalid_argument("power utility requires q < 1 and q != 0");
}

double PowerUtility::operator()(double x) const { return std::pow(x, q_) / q_; }

GridSpec::GridSpec(double horizon, int n_t, double y_radius, int n_y, double theta)
    : horizon_(horizon), n_t_(n_t), y_radius_(y_radius), n_y_(n_y), theta_(theta) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("grid horizon T must be positive");
  if (n_t < 2) throw std::invalid_argument("grid needs n_t >= 2");
  if (n_y < 3) throw std::invalid_argument("grid needs n_y >= 3");
  if (!(y_radius > 0.0) || !std::isfinite(y_radius))
    throw std::invalid_argument("grid y_radius must be positive");
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
}

GridSpec GridSpec::refined() const {
  return GridSpec(horizon_, 2 * (n_t_ - 1) + 1, y_radius_, 2 * (n_y_ - 1) + 1, theta_);
}

ValidationReport validate_assumptions(const MarketModel& m, const UncertaintyRectangle& k,
                                      int samples) {
  if (samples < 2) throw std::invalid_argument("validate_assumptions needs samples >= 2");

  ValidationReport report;
  const double radius = m.tail_radius();
  const double span = radius > 0.0 ? radius : 1.0;

  std::vector<double> ys;
  ys.reserve(samples + 8);
  for (int i = 0; i < samples; ++i) ys.push_back(-span + 2.0 * span * i / (samples - 1));
  for (double s : {1.0, 2.0, 10.0, 1e6}) {
    ys.push_back(-span * s);
    ys.push_back(span * s);
  }
  report.points_checked = static_cast<int>(ys.size());

  const std::pair<const char*, const CoefficientFn*> coeffs[] = {
      {"b", &m.b}, {"beta", &m.beta}, {"r", &m.r}};

  for (const auto& [name, f] : coeffs) {
    const double bound = f->sup_abs();
    const double n = f->tail_radius();
    bool a1_reported = false;
    bool a2_reported = false;
    for (double y : ys) {
      const double v = f->value(y);
      const double d = f->derivative(y);
      if (!a1_reported && (!std::isfinite(v) || !std::isfinite(d) ||
                           std::abs(v) > bound + kTailTolerance)) {
        report.violations.push_back({"A1", name, y, "value or derivative unbounded"});
        a1_reported = true;
      }
      if (!a2_reported && std::abs(y) >= n) {
        const double tail = y < 0.0 ? f->left_tail() : f->right_tail();
        if (std::abs(v - tail) > kTailTolerance || d != 0.0) {
          report.violations.push_back({"A2", name, y, "non-constant tail"});
          a2_reported = true;
        }
      }
    }
  }

  for (double y : ys) {
    if (m.r(y) < 0.0) {
      report.violations.push_back({"r>=0", "r", y, "negative short rate"});
      break;
    }
  }

  for (double y : ys) {
    const double margin = m.b(y) + k.mu_minus();
    if (margin < 0.0) {
      report.violations.push_back(
          {"A3", "b+mu-", y, "b(y) + mu- = " + std::to_string(margin) + " < 0"});
      break;
    }
  }
  return report;
}

}  // namespace robust
