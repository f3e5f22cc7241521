#pragma once

#include <cmath>
#include <cstddef>

namespace casurf {

/// One classical Runge-Kutta step of y' = f(t, y).
template <class State, class Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double h) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, State(y + 0.5 * h * k1));
  const State k3 = f(t + 0.5 * h, State(y + 0.5 * h * k2));
  const State k4 = f(t + h, State(y + h * k3));
  return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Fixed-step integration from t0 to t1 with ceil(|t1 - t0| / max_step)
/// equal steps. Integrating backwards (t1 < t0) is allowed.
template <class State, class Rhs>
State rk4_integrate(const Rhs& f, double t0, double t1, State y,
                    double max_step) {
  const double span = t1 - t0;
  if (span == 0.0) return y;
  const auto n = static_cast<std::size_t>(std::ceil(std::abs(span) / max_step));
  const double h = span / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    y = rk4_step(f, t0 + static_cast<double>(i) * h, y, h);
  }
  return y;
}

}  // namespace casurf
