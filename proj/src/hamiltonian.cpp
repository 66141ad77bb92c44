#include "robust/hamiltonian.hpp"

#include <stdexcept>

namespace robust {

double hamiltonian_point(double pi, double mu, double sigma, double x, double y,
                         const DerivativeBundle& d, const MarketModel& m) {
  return 0.5 * pi * pi * sigma * sigma * d.q11 + m.rho * pi * sigma * d.q12 + 0.5 * d.q22 +
         x * m.r(y) * d.p1 + pi * m.b(y) * d.p1 + pi * mu * d.p1 + m.beta(y) * d.p2;
}

double hamiltonian_measure(double pi, const WorstCaseMeasure& nu, double x, double y,
                           const DerivativeBundle& d, const MarketModel& m) {
  double h = 0.0;
  for (const auto& a : nu.atoms()) h += a.weight * hamiltonian_point(pi, a.mu, a.sigma, x, y, d, m);
  return h;
}

SaddlePoint saddle_point(double x, double y, const DerivativeBundle& d, const MarketModel& m,
                         const UncertaintyRectangle& k) {
  if (!(d.q11 < 0.0)) throw std::domain_error("saddle_point requires q11 < 0");

  const double b = m.b(y);
  const double base = 0.5 * d.q22 + m.beta(y) * d.p2 + x * m.r(y) * d.p1;

  if (d.p1 == 0.0) {
    // Only the volatility enters; the Bernoulli mean sigma- sigma+ / sigma_M
    // minimises (sigma, nu)^2 / (sigma^2, nu).
    const double s_mid = k.sigma_mid();
    const double mean = k.sigma_product() / s_mid;
    const double alpha = k.sigma_degenerate()
                             ? 1.0
                             : (k.sigma_plus() - mean) / (k.sigma_plus() - k.sigma_minus());
    auto nu = WorstCaseMeasure::bernoulli(k.mu_minus(), k.sigma_minus(), k.sigma_plus(), alpha);
    const double rq = m.rho * d.q12;
    const double pi_star = -nu.mean_sigma() * rq / (nu.mean_sigma_sq() * d.q11);
    const double value = base - rq * rq * k.sigma_product() / (2.0 * d.q11 * s_mid * s_mid);
    return {pi_star, std::move(nu), value, std::nullopt};
  }

  const double kappa = m.rho * d.q12 / d.p1;
  auto min = minimize_ratio(b, kappa, k);
  const auto& nu = min.measure;
  const double pi_star = -((b + nu.mean_mu()) * d.p1 + nu.mean_sigma() * m.rho * d.q12) /
                         (nu.mean_sigma_sq() * d.q11);
  const double value = base - d.p1 * d.p1 / (2.0 * d.q11) * min.value;
  return {pi_star, std::move(min.measure), value, min.branch};
}

}  // namespace robust
