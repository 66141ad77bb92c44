#pragma once

// Generator of the controlled (wealth, factor) diffusion and its pointwise
// saddle point over portfolio pi in R and measures nu on K.

#include <optional>

#include "robust/model.hpp"
#include "robust/worst_case.hpp"

namespace robust {

/// First derivatives (p1 = v_x, p2 = v_y) and second derivatives
/// (q11 = v_xx, q12 = v_xy, q22 = v_yy) of a value function at one point.
struct DerivativeBundle {
  double p1 = 0.0;
  double p2 = 0.0;
  double q11 = 0.0;
  double q12 = 0.0;
  double q22 = 0.0;
};

/// 1/2 pi^2 sigma^2 q11 + rho pi sigma q12 + 1/2 q22 + x r(y) p1
///   + pi b(y) p1 + pi mu p1 + beta(y) p2
double hamiltonian_point(double pi, double mu, double sigma, double x, double y,
                         const DerivativeBundle& d, const MarketModel& m);

/// Average of hamiltonian_point over the atoms of nu.
double hamiltonian_measure(double pi, const WorstCaseMeasure& nu, double x, double y,
                           const DerivativeBundle& d, const MarketModel& m);

struct SaddlePoint {
  double pi_star;
  WorstCaseMeasure nu_star;
  double value;
  /// Absent when p1 == 0 (kappa undefined).
  std::optional<KappaBranch> branch;
};

/// max over pi, min over nu of hamiltonian_measure. Requires q11 < 0
/// (throws std::domain_error otherwise).
SaddlePoint saddle_point(double x, double y, const DerivativeBundle& d, const MarketModel& m,
                         const UncertaintyRectangle& k);

}  // namespace robust
