#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "geomflow/error.hpp"
#include "geomflow/kernels.hpp"

namespace geomflow {

using State = std::vector<double>;
using RightHandSide = std::function<State(const State&)>;

/// One classical Runge-Kutta step. Throws BlowUp when the update leaves the
/// finite range (CFL violation or genuine blow-up).
inline State rk4_step(const State& y, const RightHandSide& rhs, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidInput, "rk4 step needs dt > 0", dt);
  const std::size_t n = y.size();
  State stage(n);

  const State k1 = rhs(y);
  kernels::lincomb(stage, y, 0.5 * dt, k1);
  const State k2 = rhs(stage);
  kernels::lincomb(stage, y, 0.5 * dt, k2);
  const State k3 = rhs(stage);
  kernels::lincomb(stage, y, dt, k3);
  const State k4 = rhs(stage);

  State out = y;
  kernels::add_scaled(out, dt / 6.0, k1);
  kernels::add_scaled(out, dt / 3.0, k2);
  kernels::add_scaled(out, dt / 3.0, k3);
  kernels::add_scaled(out, dt / 6.0, k4);
  for (double v : out)
    if (!std::isfinite(v)) throw Error(ErrorKind::BlowUp, "non-finite state after RK4 step", dt);
  return out;
}

}  // namespace geomflow
