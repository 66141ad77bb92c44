#include "robust/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "robust/worst_case.hpp"

namespace robust {

namespace {

struct NodeCoefficients {
  std::vector<double> b;
  std::vector<double> beta;
  std::vector<double> r;
};

NodeCoefficients sample_coefficients(const MarketModel& m, const GridSpec& g) {
  NodeCoefficients c;
  c.b.resize(g.n_y());
  c.beta.resize(g.n_y());
  c.r.resize(g.n_y());
  for (int j = 0; j < g.n_y(); ++j) {
    const double y = g.y(j);
    c.b[j] = m.b(y);
    c.beta[j] = m.beta(y);
    c.r[j] = m.r(y);
  }
  return c;
}

double min_term_weight(double q) { return q / (2.0 * (1.0 - q)); }

// Non-diffusive part of the PDE at one node. `slope` receives its derivative in
// u_y (envelope theorem for the min term), used by the gradient guard.
double explicit_terms(double uy, double b, double beta, double r, double rho, double q,
                      const UncertaintyRectangle& k, double* slope) {
  const double kappa = rho * uy;
  const auto min = minimize_ratio(b, kappa, k);
  const double w = min_term_weight(q);
  if (slope != nullptr) {
    const auto& nu = min.measure;
    const double dg = 2.0 * (b + nu.mean_mu() + kappa * nu.mean_sigma()) * nu.mean_sigma() /
                      nu.mean_sigma_sq();
    *slope = beta + uy + w * rho * dg;
  }
  return beta * uy + 0.5 * uy * uy + q * r + w * min.value;
}

// Thomas algorithm for the constant tridiagonal system
// lower x_{j-1} + diag x_j + upper x_{j+1} = rhs_j (solved in place).
void solve_tridiagonal(double lower, double diag, double upper, std::vector<double>& rhs,
                       std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  scratch.resize(n);
  scratch[0] = upper / diag;
  rhs[0] /= diag;
  for (std::size_t j = 1; j < n; ++j) {
    const double denom = diag - lower * scratch[j - 1];
    scratch[j] = upper / denom;
    rhs[j] = (rhs[j] - lower * rhs[j - 1]) / denom;
  }
  for (std::size_t j = n - 1; j-- > 0;) rhs[j] -= scratch[j] * rhs[j + 1];
}

std::string describe_violations(const ValidationReport& report) {
  std::ostringstream os;
  for (const auto& v : report.violations)
    os << ' ' << v.assumption << '(' << v.coefficient << " at y=" << v.witness_y << ')';
  return os.str();
}

}  // namespace

ValueSurface::ValueSurface(GridSpec grid, std::vector<double> u)
    : grid_(std::move(grid)), u_(std::move(u)) {
  const int nt = grid_.n_t();
  const int ny = grid_.n_y();
  if (u_.size() != static_cast<std::size_t>(nt) * ny)
    throw std::invalid_argument("surface size does not match grid");
  u_y_.resize(u_.size());
  const double h = grid_.dy();
  for (int i = 0; i < nt; ++i) {
    const double* row = u_.data() + index(i, 0);
    double* out = u_y_.data() + index(i, 0);
    for (int j = 1; j < ny - 1; ++j) out[j] = (row[j + 1] - row[j - 1]) / (2.0 * h);
    out[0] = (-3.0 * row[0] + 4.0 * row[1] - row[2]) / (2.0 * h);
    out[ny - 1] = (3.0 * row[ny - 1] - 4.0 * row[ny - 2] + row[ny - 3]) / (2.0 * h);
  }
  for (double v : u_y_) diagnostics.max_abs_u_y = std::max(diagnostics.max_abs_u_y, std::abs(v));
}

double ValueSurface::u_at(double t, double y) const {
  const double T = grid_.horizon();
  const double R = grid_.y_radius();
  const double eps = 1e-12 * std::max(1.0, T);
  if (t < -eps || t > T + eps || y < -R - 1e-12 || y > R + 1e-12)
    throw std::out_of_range("(t, y) outside the surface grid");
  const double ft = std::clamp(t / grid_.dt(), 0.0, static_cast<double>(grid_.n_t() - 1));
  const double fy = std::clamp((y + R) / grid_.dy(), 0.0, static_cast<double>(grid_.n_y() - 1));
  const int i = std::min(static_cast<int>(ft), grid_.n_t() - 2);
  const int j = std::min(static_cast<int>(fy), grid_.n_y() - 2);
  const double wt = ft - i;
  const double wy = fy - j;
  return (1 - wt) * ((1 - wy) * u(i, j) + wy * u(i, j + 1)) +
         wt * ((1 - wy) * u(i + 1, j) + wy * u(i + 1, j + 1));
}

double tail_values(double t, Side side, const MarketModel& m, const UncertaintyRectangle& k,
                   double q, double horizon) {
  const double b = side == Side::left ? m.b.left_tail() : m.b.right_tail();
  const double r = side == Side::left ? m.r.left_tail() : m.r.right_tail();
  const double drift = b + k.mu_minus();
  const double s = k.sigma_plus();
  return (horizon - t) * (min_term_weight(q) * drift * drift / (s * s) + q * r);
}

double closed_form_b0(double t, const UncertaintyRectangle& k, double q, double horizon) {
  const double mu = k.mu_minus();
  const double s = k.sigma_plus();
  return (horizon - t) * min_term_weight(q) * mu * mu / (s * s);
}

double max_diffusion_dt(const GridSpec& g) {
  const double dy = g.dy();
  return dy * dy / (2.0 * (1.0 - g.theta()) + 1e-12);
}

ValueSurface solve_hjbi(const MarketModel& m, const UncertaintyRectangle& k,
                        const PowerUtility& util, const GridSpec& g) {
  const auto report = validate_assumptions(m, k);
  if (!report.ok())
    throw std::invalid_argument("model violates assumptions:" + describe_violations(report));
  if (g.y_radius() < m.tail_radius())
    throw std::invalid_argument("grid y_radius must be at least the coefficient tail radius");

  const int nt = g.n_t();
  const int ny = g.n_y();
  const int n_inner = ny - 2;
  const double dt = g.dt();
  const double dy = g.dy();
  const double theta = g.theta();
  const double q = util.q();
  const double T = g.horizon();

  if (dt > max_diffusion_dt(g) * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step dt=" << dt << " exceeds the diffusion guard " << max_diffusion_dt(g)
       << " for dy=" << dy << ", theta=" << theta;
    throw SolverError(os.str());
  }

  const auto coeff = sample_coefficients(m, g);
  std::vector<double> u(static_cast<std::size_t>(nt) * ny, 0.0);

  const double a = 0.5 / (dy * dy);
  const double lower = -theta * dt * a;
  const double diag = 1.0 + 2.0 * theta * dt * a;

  std::vector<double> f_now(ny, 0.0);
  std::vector<double> f_prev(ny, 0.0);
  std::vector<double> f_eff(ny, 0.0);
  std::vector<double> rhs(n_inner);
  std::vector<double> scratch;
  SolveDiagnostics diag_info;

  auto explicit_level = [&](const double* level, std::vector<double>& out) {
    double lip = 0.0;
    for (int j = 1; j < ny - 1; ++j) {
      const double uy = (level[j + 1] - level[j - 1]) / (2.0 * dy);
      double slope = 0.0;
      out[j] = explicit_terms(uy, coeff.b[j], coeff.beta[j], coeff.r[j], m.rho, q, k, &slope);
      lip = std::max(lip, std::abs(slope));
    }
    return lip;
  };

  for (int i = nt - 2; i >= 0; --i) {
    const double* next = u.data() + static_cast<std::size_t>(i + 1) * ny;
    double* cur = u.data() + static_cast<std::size_t>(i) * ny;

    std::swap(f_prev, f_now);
    const double lip = explicit_level(next, f_now);
    const double cfl = dt * lip * lip;
    diag_info.max_gradient_cfl = std::max(diag_info.max_gradient_cfl, cfl);
    if (cfl > 1.0) {
      std::ostringstream os;
      os << "time step dt=" << dt << " violates the explicit gradient bound dt*L^2 <= 1 (L=" << lip
         << ") at t=" << g.t(i + 1);
      throw SolverError(os.str());
    }
    const bool first = i == nt - 2;

    cur[0] = tail_values(g.t(i), Side::left, m, k, q, T);
    cur[ny - 1] = tail_values(g.t(i), Side::right, m, k, q, T);

    auto advance = [&](const std::vector<double>& f) {
      for (int j = 1; j < ny - 1; ++j) {
        const double lap = next[j - 1] - 2.0 * next[j] + next[j + 1];
        rhs[j - 1] = next[j] + (1.0 - theta) * dt * a * lap + dt * f[j];
      }
      rhs.front() -= lower * cur[0];
      rhs.back() -= lower * cur[ny - 1];
      solve_tridiagonal(lower, diag, lower, rhs, scratch);
      for (int j = 1; j < ny - 1; ++j) {
        const double v = rhs[j - 1];
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "non-finite value at time level " << i << " (t=" << g.t(i) << "), node " << j
             << " (y=" << g.y(j) << ")";
          throw SolverError(os.str());
        }
        cur[j] = v;
      }
    };

    if (first) {
      advance(f_now);
      explicit_level(cur, f_eff);
      for (int j = 1; j < ny - 1; ++j) f_eff[j] = 0.5 * (f_now[j] + f_eff[j]);
    } else {
      for (int j = 1; j < ny - 1; ++j) f_eff[j] = 1.5 * f_now[j] - 0.5 * f_prev[j];
    }
    advance(f_eff);
    ++diag_info.time_steps;
  }

  ValueSurface s(g, std::move(u));
  const double max_uy = s.diagnostics.max_abs_u_y;
  s.diagnostics = diag_info;
  s.diagnostics.max_abs_u_y = max_uy;
  s.diagnostics.max_residual = residual_norm(s, m, k, util);
  return s;
}

double residual_norm(const ValueSurface& s, const MarketModel& m, const UncertaintyRectangle& k,
                     const PowerUtility& util) {
  const auto& g = s.grid();
  const int nt = g.n_t();
  const int ny = g.n_y();
  const double dt = g.dt();
  const double dy = g.dy();
  const auto coeff = sample_coefficients(m, g);
  double worst = 0.0;
  for (int i = 1; i < nt - 1; ++i) {
    for (int j = 1; j < ny - 1; ++j) {
      const double ut = (s.u(i + 1, j) - s.u(i - 1, j)) / (2.0 * dt);
      const double uyy = (s.u(i, j - 1) - 2.0 * s.u(i, j) + s.u(i, j + 1)) / (dy * dy);
      const double uy = (s.u(i, j + 1) - s.u(i, j - 1)) / (2.0 * dy);
      const double f =
          explicit_terms(uy, coeff.b[j], coeff.beta[j], coeff.r[j], m.rho, util.q(), k, nullptr);
      worst = std::max(worst, std::abs(ut + 0.5 * uyy + f));
    }
  }
  return worst;
}

}  // namespace robust
