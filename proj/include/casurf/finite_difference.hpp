#pragma once

#include <type_traits>

namespace casurf::fd {

// Central difference stencils. The callable may return a scalar or an Eigen
// vector; the result type is the decayed return type of f.

template <class F>
auto central(const F& f, double x, double h) {
  using R = std::decay_t<decltype(f(x))>;
  R r = (f(x + h) - f(x - h)) / (2.0 * h);
  return r;
}

/// Fourth-order first derivative.
template <class F>
auto central5(const F& f, double x, double h) {
  using R = std::decay_t<decltype(f(x))>;
  R r = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) /
        (12.0 * h);
  return r;
}

/// Fourth-order second derivative.
template <class F>
auto second5(const F& f, double x, double h) {
  using R = std::decay_t<decltype(f(x))>;
  R r = (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) -
         f(x + 2.0 * h)) /
        (12.0 * h * h);
  return r;
}

}  // namespace casurf::fd
