/// @file
/// Randomized verification of the ambient closed forms against the
/// finite-difference oracles.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

#include "casurf/ambient.hpp"

namespace casurf {

struct AmbientCheck {
  std::size_t samples = 0;
  double orthonormality = 0.0;
  double commutator = 0.0;
  double connection = 0.0;
  double curvature = 0.0;
  /// Only for kappa = 4 tau^2: max |K(plane) - tau^2| and tau^2 itself.
  std::optional<double> constant_curvature;
  double constant_curvature_value = 0.0;
};

/// Points in a box around the origin; for kappa < 0 the box is shrunk well
/// inside the chart.
inline AmbientPoint random_ambient_point(const AmbientParams& params, std::mt19937_64& rng) {
  double a = 1.0;
  if (params.kappa < 0.0) a = std::min(a, 0.7 / std::sqrt(-params.kappa));
  std::uniform_real_distribution<double> xy(-a, a), z(-1.0, 1.0);
  const double x = xy(rng), y = xy(rng);
  return {x, y, z(rng)};
}

inline TangentVector random_tangent(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  const double x = c(rng), y = c(rng);
  return TangentVector(x, y, c(rng));
}

inline AmbientCheck verify_ambient(const AmbientParams& params, std::size_t samples,
                                   std::uint64_t seed) {
  if (samples == 0) throw GeometryError(ErrorKind::kPrecondition, "samples must be positive");
  std::mt19937_64 rng(seed);
  AmbientCheck out;
  out.samples = samples;
  const bool constant = std::abs(params.kappa - 4.0 * params.tau * params.tau) < 1e-12;
  if (constant) {
    out.constant_curvature = 0.0;
    out.constant_curvature_value = params.tau * params.tau;
  }
  for (std::size_t n = 0; n < samples; ++n) {
    const AmbientPoint p = random_ambient_point(params, rng);
    const Frame f = frame_at(params, p);
    const Eigen::Matrix3d gram = f.matrix().transpose() * metric_at(params, p) * f.matrix();
    out.orthonormality =
        std::max(out.orthonormality, (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        out.connection = std::max(
            out.connection,
            (connection_oracle(params, i, j, p) - connection_frame(params, i, j, p)).norm());
        if (i < j) {
          out.commutator = std::max(
              out.commutator,
              (commutator_oracle(params, i, j, p) - commutator_closed_form(params, i, j, p)).norm());
        }
      }
    }
    const TangentVector X = random_tangent(rng), Y = random_tangent(rng), Z = random_tangent(rng);
    out.curvature = std::max(out.curvature, (curvature_oracle(params, X, Y, Z, p) -
                                             curvature_tensor(params, X, Y, Z, p)).norm());
    if (constant) {
      const double K = sectional_curvature(params, X, Y, p);
      *out.constant_curvature =
          std::max(*out.constant_curvature, std::abs(K - out.constant_curvature_value));
    }
  }
  return out;
}

}  // namespace casurf
