#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "casurf/ambient.hpp"
#include "casurf/error.hpp"
#include "casurf/surface.hpp"

namespace casurf {

/// Uniform nu x nv grid over a finite parameter rectangle.
struct GridSpec {
  ParamDomain domain{0.0, 1.0, 0.0, 1.0};
  std::size_t nu = 2;
  std::size_t nv = 2;

  void validate() const {
    if (nu < 2 || nv < 2) {
      throw GeometryError(ErrorKind::kPrecondition, "grid resolution must be at least 2x2");
    }
    if (!(domain.u1 > domain.u0) || !(domain.v1 > domain.v0) ||
        !std::isfinite(domain.u1 - domain.u0) || !std::isfinite(domain.v1 - domain.v0)) {
      throw GeometryError(ErrorKind::kPrecondition, "grid domain must be a finite, non-empty rectangle");
    }
  }

  double u(std::size_t i) const {
    return domain.u0 + (domain.u1 - domain.u0) * static_cast<double>(i) / static_cast<double>(nu - 1);
  }
  double v(std::size_t j) const {
    return domain.v0 + (domain.v1 - domain.v0) * static_cast<double>(j) / static_cast<double>(nv - 1);
  }
  /// Nodes are stored with u varying fastest.
  std::size_t index(std::size_t i, std::size_t j) const { return j * nu + i; }
  std::size_t size() const { return nu * nv; }
};

struct SampledSurface {
  GridSpec grid;
  AmbientParams params;
  std::vector<AmbientPoint> points;  ///< grid.index(i, j) order

  const AmbientPoint& at(std::size_t i, std::size_t j) const { return points[grid.index(i, j)]; }
};

inline SampledSurface sample(const Immersion& imm, const GridSpec& grid) {
  grid.validate();
  SampledSurface s{grid, imm.params(), {}};
  s.points.reserve(grid.size());
  for (std::size_t j = 0; j < grid.nv; ++j) {
    for (std::size_t i = 0; i < grid.nu; ++i) s.points.push_back(imm.position(grid.u(i), grid.v(j)));
  }
  return s;
}

namespace detail {

/// Natural cubic spline through (x_i, y_i) on a uniform knot sequence.
class UniformSpline {
 public:
  UniformSpline(double x0, double dx, std::vector<double> y) : x0_(x0), dx_(dx), y_(std::move(y)) {
    const std::size_t n = y_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    // Tridiagonal system for second derivatives, natural end conditions.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double rhs = 6.0 * (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) / (dx_ * dx_);
      const double denom = 4.0 - c[i - 1];
      c[i] = 1.0 / denom;
      d[i] = (rhs - d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = d[i] - c[i] * m_[i + 1];
      if (i == 1) break;
    }
  }

  double operator()(double x) const {
    const std::size_t n = y_.size();
    double t = (x - x0_) / dx_;
    auto k = static_cast<std::ptrdiff_t>(std::floor(t));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(n) - 2);
    const auto i = static_cast<std::size_t>(k);
    const double a = (static_cast<double>(i + 1) - t);
    const double b = t - static_cast<double>(i);
    const double h2 = dx_ * dx_ / 6.0;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h2;
  }

 private:
  double x0_;
  double dx_;
  std::vector<double> y_;
  std::vector<double> m_;
};

}  // namespace detail

/// Smooth immersion through the grid nodes (tensor-product natural cubic
/// splines). Derivative-based checks on it are limited by the grid spacing
/// and should stay a few nodes away from the border.
inline Immersion interpolate(const SampledSurface& s) {
  s.grid.validate();
  if (s.points.size() != s.grid.size()) {
    throw GeometryError(ErrorKind::kPrecondition, "sample count does not match grid");
  }
  const GridSpec g = s.grid;
  const double du = (g.domain.u1 - g.domain.u0) / static_cast<double>(g.nu - 1);
  const double dv = (g.domain.v1 - g.domain.v0) / static_cast<double>(g.nv - 1);
  // One spline along u per (row, component).
  auto rows = std::make_shared<std::vector<std::array<detail::UniformSpline, 3>>>();
  rows->reserve(g.nv);
  for (std::size_t j = 0; j < g.nv; ++j) {
    std::array<std::vector<double>, 3> comp;
    for (std::size_t i = 0; i < g.nu; ++i) {
      const AmbientPoint& p = s.at(i, j);
      comp[0].push_back(p.x);
      comp[1].push_back(p.y);
      comp[2].push_back(p.z);
    }
    rows->push_back({detail::UniformSpline(g.domain.u0, du, comp[0]),
                     detail::UniformSpline(g.domain.u0, du, comp[1]),
                     detail::UniformSpline(g.domain.u0, du, comp[2])});
  }
  return Immersion(s.params, g.domain, [rows, g, dv](double u, double v) {
    std::array<double, 3> out{};
    for (int c = 0; c < 3; ++c) {
      std::vector<double> col;
      col.reserve(g.nv);
      for (const auto& row : *rows) col.push_back(row[c](u));
      out[c] = detail::UniformSpline(g.domain.v0, dv, std::move(col))(v);
    }
    return AmbientPoint{out[0], out[1], out[2]};
  });
}

}  // namespace casurf
