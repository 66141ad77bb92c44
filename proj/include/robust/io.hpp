#pragma once

// CSV artifacts. Every file starts with one provenance comment line
//   # robust-hjbi <version> config=<hash> seed=<seed>
// followed by a header row. Numbers use '.' and round-trip exactly; the
// surface is written with 17 significant digits.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "robust/model.hpp"
#include "robust/pde.hpp"
#include "robust/simulate.hpp"
#include "robust/strategy.hpp"

namespace robust {

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = ROBUST_VERSION;
};

void write_provenance(std::ostream& out, const Provenance& p);

/// Header `t,y,u,u_y`, one row per node, time-major.
void write_surface_csv(std::ostream& out, const ValueSurface& s, const Provenance& p);

/// Rebuilds a surface written by write_surface_csv on the given grid.
/// Throws std::runtime_error on any mismatch with the grid or parse failure.
ValueSurface read_surface_csv(std::istream& in, const GridSpec& grid);

/// Sidecar with the surface hash, grid and solve diagnostics.
void write_surface_meta(std::ostream& out, const ValueSurface& s, const std::string& surface_hash);

struct SurfaceMeta {
  std::string surface_hash;
  SolveDiagnostics diagnostics;
};
SurfaceMeta read_surface_meta(std::istream& in);

/// Header `t,y,mu_star_mean,sigma_star_mean,alpha,branch,pi_frac`; alpha is the
/// mass nu* puts on sigma = sigma-.
void write_policy_csv(std::ostream& out, const PolicyField& pf, const UncertaintyRectangle& k,
                      const Provenance& p);

struct ReportRow {
  std::string policy;
  std::string adversary;
  double eu;
  double se;
  std::string verdict;
};

/// Header `policy,adversary,eu,se,verdict`.
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows, const Provenance& p);

/// Header `bin_lo,bin_hi,count` over [min, max] of the sample.
void write_histogram_csv(std::ostream& out, const std::vector<double>& sample, int bins,
                         const Provenance& p);

}  // namespace robust
