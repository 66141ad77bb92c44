#pragma once

// Policy fields read off a solved value surface: the worst-case measure nu*(t, y)
// and the optimal wealth fraction
//
//   pi*/x = [ b + (mu, nu*) + rho (sigma, nu*) u_y ] / ((1 - q) (sigma^2, nu*)).

#include <vector>

#include "robust/model.hpp"
#include "robust/pde.hpp"
#include "robust/worst_case.hpp"

namespace robust {

class PolicyField {
 public:
  PolicyField(GridSpec grid, std::vector<WorstCaseMeasure> nu_star,
              std::vector<KappaBranch> branch, std::vector<double> pi_frac);

  const GridSpec& grid() const { return grid_; }

  const WorstCaseMeasure& nu_star(int i, int j) const { return nu_[index(i, j)]; }
  KappaBranch branch(int i, int j) const { return branch_[index(i, j)]; }
  double pi_frac(int i, int j) const { return pi_[index(i, j)]; }

  /// Bilinear in (t, y); y outside the grid is clamped to the boundary column.
  double fraction(double t, double y) const;

  /// Nearest grid node, with the same clamping as fraction().
  const WorstCaseMeasure& measure(double t, double y) const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * grid_.n_y() + j;
  }

  GridSpec grid_;
  std::vector<WorstCaseMeasure> nu_;
  std::vector<KappaBranch> branch_;
  std::vector<double> pi_;
};

PolicyField build_policy(const ValueSurface& s, const MarketModel& m,
                         const UncertaintyRectangle& k, const PowerUtility& util);

/// v(t, x, y) = x^q / q * exp(u(t, y)) with u interpolated bilinearly.
/// Throws std::domain_error for x <= 0 and std::out_of_range outside the grid.
double value_function(const ValueSurface& s, double t, double x, double y, double q);

}  // namespace robust
