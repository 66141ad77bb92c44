#pragma once

#include "robust/model.hpp"

namespace fixtures {

inline robust::MarketModel flat_model(double rho = 0.5) {
  using robust::CoefficientFn;
  return {CoefficientFn::constant(0.0), CoefficientFn::constant(0.0), CoefficientFn::constant(0.0),
          rho};
}

inline robust::MarketModel ramp_model(double rho = 0.5) {
  using robust::CoefficientFn;
  return {CoefficientFn::smooth_ramp(0.0, 0.2, 2.0), CoefficientFn::smooth_ramp(0.1, -0.1, 2.0),
          CoefficientFn::constant(0.01), rho};
}

inline robust::UncertaintyRectangle smoke_rect() { return {0.1, 0.3, 0.2, 0.4}; }

}  // namespace fixtures
