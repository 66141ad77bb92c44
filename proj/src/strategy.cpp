#include "robust/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace robust {

PolicyField::PolicyField(GridSpec grid, std::vector<WorstCaseMeasure> nu_star,
                         std::vector<KappaBranch> branch, std::vector<double> pi_frac)
    : grid_(std::move(grid)),
      nu_(std::move(nu_star)),
      branch_(std::move(branch)),
      pi_(std::move(pi_frac)) {
  const std::size_t n = static_cast<std::size_t>(grid_.n_t()) * grid_.n_y();
  if (nu_.size() != n || branch_.size() != n || pi_.size() != n)
    throw std::invalid_argument("policy field arrays do not match grid");
}

double PolicyField::fraction(double t, double y) const {
  const double R = grid_.y_radius();
  const double ft = std::clamp(t / grid_.dt(), 0.0, static_cast<double>(grid_.n_t() - 1));
  const double fy = std::clamp((y + R) / grid_.dy(), 0.0, static_cast<double>(grid_.n_y() - 1));
  const int i = std::min(static_cast<int>(ft), grid_.n_t() - 2);
  const int j = std::min(static_cast<int>(fy), grid_.n_y() - 2);
  const double wt = ft - i;
  const double wy = fy - j;
  return (1 - wt) * ((1 - wy) * pi_frac(i, j) + wy * pi_frac(i, j + 1)) +
         wt * ((1 - wy) * pi_frac(i + 1, j) + wy * pi_frac(i + 1, j + 1));
}

const WorstCaseMeasure& PolicyField::measure(double t, double y) const {
  const double R = grid_.y_radius();
  const double ft = std::clamp(t / grid_.dt(), 0.0, static_cast<double>(grid_.n_t() - 1));
  const double fy = std::clamp((y + R) / grid_.dy(), 0.0, static_cast<double>(grid_.n_y() - 1));
  return nu_star(static_cast<int>(std::lround(ft)), static_cast<int>(std::lround(fy)));
}

PolicyField build_policy(const ValueSurface& s, const MarketModel& m,
                         const UncertaintyRectangle& k, const PowerUtility& util) {
  const auto& g = s.grid();
  const std::size_t n = static_cast<std::size_t>(g.n_t()) * g.n_y();
  std::vector<WorstCaseMeasure> nu;
  std::vector<KappaBranch> branch;
  std::vector<double> pi;
  nu.reserve(n);
  branch.reserve(n);
  pi.reserve(n);

  const double one_minus_q = 1.0 - util.q();
  std::vector<double> b(g.n_y());
  for (int j = 0; j < g.n_y(); ++j) b[j] = m.b(g.y(j));

  for (int i = 0; i < g.n_t(); ++i) {
    for (int j = 0; j < g.n_y(); ++j) {
      const double uy = s.u_y(i, j);
      auto min = minimize_ratio(b[j], m.rho * uy, k);
      const auto& w = min.measure;
      pi.push_back((b[j] + w.mean_mu() + m.rho * w.mean_sigma() * uy) /
                   (one_minus_q * w.mean_sigma_sq()));
      branch.push_back(min.branch);
      nu.push_back(std::move(min.measure));
    }
  }
  return PolicyField(g, std::move(nu), std::move(branch), std::move(pi));
}

double value_function(const ValueSurface& s, double t, double x, double y, double q) {
  if (!(x > 0.0)) throw std::domain_error("value_function requires x > 0");
  return std::pow(x, q) / q * std::exp(s.u_at(t, y));
}

}  // namespace robust
