#pragma once

// Reduced HJBI equation for power utility. With v(t, x, y) = x^q e^{u(t, y)} / q
// the exponent solves
//
//   u_t + 1/2 u_yy + beta u_y + 1/2 u_y^2 + q r
//       + q / (2 (1 - q)) * G(b(y), rho u_y) = 0,   u(T, y) = 0,
//
// where G(b, kappa) is the worst-case ratio from minimize_ratio. Outside
// [-N, N] all coefficients are constant and u is the linear-in-time tail
// solution, which supplies the Dirichlet data at +-y_radius.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "robust/model.hpp"

namespace robust {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveDiagnostics {
  int time_steps = 0;
  double max_residual = 0.0;
  double max_abs_u_y = 0.0;
  /// Largest dt * L^2 seen, L the Lipschitz bound of the explicit terms in u_y.
  double max_gradient_cfl = 0.0;
};

/// Grid solution u(t_i, y_j) with u_y by central differences (one-sided
/// second order at the two boundary columns).
class ValueSurface {
 public:
  ValueSurface(GridSpec grid, std::vector<double> u);

  const GridSpec& grid() const { return grid_; }
  double u(int i, int j) const { return u_[index(i, j)]; }
  double u_y(int i, int j) const { return u_y_[index(i, j)]; }
  std::span<const double> u_level(int i) const {
    return {u_.data() + index(i, 0), static_cast<std::size_t>(grid_.n_y())};
  }
  const std::vector<double>& u_values() const { return u_; }

  /// Bilinear interpolation of u; (t, y) must lie in the grid hull.
  double u_at(double t, double y) const;

  SolveDiagnostics diagnostics;
  std::string source_hash;  // identifies the configuration that produced it

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * grid_.n_y() + j;
  }

  GridSpec grid_;
  std::vector<double> u_;
  std::vector<double> u_y_;
};

enum class Side { left, right };

/// Exact solution on the constant-coefficient tail at `side`:
/// (T - t) * [ q (b_side + mu-)^2 / (2 (1 - q) sigma+^2) + q r_side ].
double tail_values(double t, Side side, const MarketModel& m, const UncertaintyRectangle& k,
                   double q, double horizon);

/// Exact u for b = beta = r = 0: (T - t) q mu-^2 / (2 (1 - q) sigma+^2).
double closed_form_b0(double t, const UncertaintyRectangle& k, double q, double horizon);

/// Backward theta-scheme: diffusion implicit with weight theta, the remaining
/// terms explicit (Heun on the first step, second-order Adams-Bashforth
/// extrapolation afterwards). Throws std::invalid_argument on bad inputs and SolverError when a
/// stability guard trips or a non-finite value appears.
ValueSurface solve_hjbi(const MarketModel& m, const UncertaintyRectangle& k,
                        const PowerUtility& util, const GridSpec& g);

/// Max over interior nodes of the finite-difference residual of the PDE,
/// centred in both t and y.
double residual_norm(const ValueSurface& s, const MarketModel& m, const UncertaintyRectangle& k,
                     const PowerUtility& util);

/// Largest dt admitted by the diffusion guard dt <= dy^2 / (2 (1 - theta) + eps).
double max_diffusion_dt(const GridSpec& g);

}  // namespace robust
