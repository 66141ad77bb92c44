#pragma once

// Run configuration file (JSON). Schema, all sections required unless noted:
//
//   {
//     "model": {
//       "b":    <coefficient>, "beta": <coefficient>, "r": <coefficient>,
//       "rho":  0.5
//     },
//     "rectangle": {"mu_minus": 0.1, "mu_plus": 0.3,
//                   "sigma_minus": 0.2, "sigma_plus": 0.4},
//     "utility":   {"q": 0.5},
//     "grid":      {"T": 1.0, "n_t": 2001, "n_y": 201,
//                   "y_radius": 4.0,           // optional, default N + 2
//                   "theta": 0.5},             // optional
//     "sim":       {"n_paths": 200000, "n_steps": 500, "seed": 1,
//                   "x0": 1.0, "y0": 0.0},     // optional section / keys
//     "verify":    {"random_deviations": 4, "policy_scales": [0, 0.5, 0.8, 1.2, 1.5],
//                   "seed": 7, "pde_tolerance": 0.001},   // optional
//     "output":    "out"                      // optional
//   }
//
// <coefficient> is one of
//   {"kind": "constant", "value": v}
//   {"kind": "smooth_ramp", "left": a, "right": b, "radius": N}
//   {"kind": "piecewise_linear", "radius": N, "knots": [[y0, v0], [y1, v1], ...]}
//
// Unknown keys are rejected.

#include <optional>
#include <stdexcept>
#include <string>

#include "robust/model.hpp"
#include "robust/simulate.hpp"

namespace robust {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  MarketModel model;
  UncertaintyRectangle rectangle;
  PowerUtility utility;
  GridSpec grid;
  SimConfig sim;
  DeviationSpec verify;
  std::optional<std::string> output;
};

/// Throws ConfigError with a field path or line/column in the message.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical pretty-printed JSON; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const RunConfig& c);

/// FNV-1a over the canonical dump, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// Hash of only the sections that determine the value surface.
std::string surface_hash(const RunConfig& c);

std::string fnv1a_hex(const std::string& data);

}  // namespace robust
