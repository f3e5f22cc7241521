/// @file
/// Geometry of the Bianchi-Cartan-Vranceanu spaces M(kappa, tau).
///
/// The chart is { (x, y, z) : 1 + (kappa/4)(x^2 + y^2) > 0 } with metric
///
///   ds^2 = (dx^2 + dy^2) / w^2 + (dz + tau (y dx - x dy) / w)^2,
///   w    = 1 + (kappa/4)(x^2 + y^2).
///
/// kappa = 0, tau != 0 is the Heisenberg group Nil3. Everything that takes a
/// TangentVector works in components with respect to the orthonormal frame
///
///   e1 = w d/dx - tau y d/dz,  e2 = w d/dy + tau x d/dz,  e3 = d/dz,
///
/// so inner products are plain dot products. The closed forms (frame,
/// commutators, connection, curvature) sit next to finite-difference oracles
/// that only consume metric_at / frame_at.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "casurf/error.hpp"
#include "casurf/finite_difference.hpp"

namespace casurf {

/// Components with respect to the orthonormal frame {e1, e2, e3}.
class TangentVector : public Eigen::Vector3d {
 public:
  TangentVector() : Eigen::Vector3d(Eigen::Vector3d::Zero()) {}
  TangentVector(double c1, double c2, double c3) : Eigen::Vector3d(c1, c2, c3) {}
  template <typename Derived>
  TangentVector(const Eigen::MatrixBase<Derived>& other)  // NOLINT
      : Eigen::Vector3d(other) {}
  template <typename Derived>
  TangentVector& operator=(const Eigen::MatrixBase<Derived>& other) {
    Eigen::Vector3d::operator=(other);
    return *this;
  }
};

/// Components with respect to the coordinate basis {d/dx, d/dy, d/dz}.
class CoordVector : public Eigen::Vector3d {
 public:
  CoordVector() : Eigen::Vector3d(Eigen::Vector3d::Zero()) {}
  CoordVector(double x, double y, double z) : Eigen::Vector3d(x, y, z) {}
  template <typename Derived>
  CoordVector(const Eigen::MatrixBase<Derived>& other)  // NOLINT
      : Eigen::Vector3d(other) {}
  template <typename Derived>
  CoordVector& operator=(const Eigen::MatrixBase<Derived>& other) {
    Eigen::Vector3d::operator=(other);
    return *this;
  }
};

using MetricMatrix = Eigen::Matrix3d;

struct AmbientParams {
  double kappa = 0.0;
  double tau = 0.0;

  static constexpr AmbientParams nil3(double tau) { return {0.0, tau}; }

  bool is_nil3() const { return kappa == 0.0 && tau != 0.0; }

  /// w = 1 + (kappa/4)(x^2 + y^2).
  double conformal(double x, double y) const {
    return 1.0 + 0.25 * kappa * (x * x + y * y);
  }

  /// kappa = 4 tau^2: constant sectional curvature kappa/4.
  bool has_constant_curvature() const {
    return std::abs(kappa - 4.0 * tau * tau) <=
           1e-12 * std::max(1.0, std::abs(kappa));
  }
};

struct AmbientPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static AmbientPoint from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

  friend AmbientPoint operator+(const AmbientPoint& p, const CoordVector& d) {
    return {p.x + d.x(), p.y + d.y(), p.z + d.z()};
  }
};

/// Coordinate components of the orthonormal frame at a point.
struct Frame {
  CoordVector e1;
  CoordVector e2;
  CoordVector e3;

  const CoordVector& operator[](int i) const {
    return i == 1 ? e1 : (i == 2 ? e2 : e3);
  }
  /// Columns e1, e2, e3.
  Eigen::Matrix3d matrix() const {
    Eigen::Matrix3d m;
    m << e1, e2, e3;
    return m;
  }
};

inline bool in_domain(const AmbientParams& params, const AmbientPoint& p) {
  return params.conformal(p.x, p.y) > 0.0 && std::isfinite(p.x) &&
         std::isfinite(p.y) && std::isfinite(p.z);
}

inline void require_in_domain(const AmbientParams& params, const AmbientPoint& p) {
  if (!in_domain(params, p)) {
    throw GeometryError(ErrorKind::kInvalidPoint,
                        "point (" + std::to_string(p.x) + ", " +
                            std::to_string(p.y) + ", " + std::to_string(p.z) +
                            ") outside 1 + (kappa/4)(x^2+y^2) > 0");
  }
}

/// Stencils of half-width h must stay 10h inside the chart boundary
/// (only present for kappa < 0, where it is the circle of radius 2/sqrt(-kappa)).
inline void require_stencil_margin(const AmbientParams& params,
                                   const AmbientPoint& p, double h) {
  require_in_domain(params, p);
  if (!(h > 0.0)) {
    throw GeometryError(ErrorKind::kStepTooLarge, "finite-difference step must be positive");
  }
  if (params.kappa < 0.0) {
    const double boundary = 2.0 / std::sqrt(-params.kappa);
    const double margin = boundary - std::hypot(p.x, p.y);
    if (margin < 10.0 * h) {
      throw GeometryError(ErrorKind::kStepTooLarge,
                          "stencil margin " + std::to_string(margin) +
                              " below 10h = " + std::to_string(10.0 * h));
    }
  }
}

inline void require_frame_index(int i) {
  if (i < 1 || i > 3) {
    throw GeometryError(ErrorKind::kInvalidIndex,
                        "frame index " + std::to_string(i) + " not in {1,2,3}");
  }
}

/// Gram matrix of ds^2 in the coordinate basis.
inline MetricMatrix metric_at(const AmbientParams& params, const AmbientPoint& p) {
  require_in_domain(params, p);
  const double w = params.conformal(p.x, p.y);
  // ds^2 = sum of squares of the coframe theta1 = dx/w, theta2 = dy/w,
  // theta3 = dz + tau (y dx - x dy)/w.
  const Eigen::Vector3d t1(1.0 / w, 0.0, 0.0);
  const Eigen::Vector3d t2(0.0, 1.0 / w, 0.0);
  const Eigen::Vector3d t3(params.tau * p.y / w, -params.tau * p.x / w, 1.0);
  return t1 * t1.transpose() + t2 * t2.transpose() + t3 * t3.transpose();
}

inline Frame frame_at(const AmbientParams& params, const AmbientPoint& p) {
  require_in_domain(params, p);
  const double w = params.conformal(p.x, p.y);
  return {CoordVector(w, 0.0, -params.tau * p.y),
          CoordVector(0.0, w, params.tau * p.x), CoordVector(0.0, 0.0, 1.0)};
}

/// Inverse of Frame::matrix(): maps coordinate components to frame components.
inline Eigen::Matrix3d coframe_at(const AmbientParams& params, const AmbientPoint& p) {
  require_in_domain(params, p);
  const double w = params.conformal(p.x, p.y);
  Eigen::Matrix3d m;
  m << 1.0 / w, 0.0, 0.0,  //
      0.0, 1.0 / w, 0.0,   //
      params.tau * p.y / w, -params.tau * p.x / w, 1.0;
  return m;
}

inline TangentVector to_frame(const AmbientParams& params, const AmbientPoint& p,
                              const CoordVector& v) {
  return coframe_at(params, p) * v;
}

inline CoordVector to_coordinates(const AmbientParams& params, const AmbientPoint& p,
                                  const TangentVector& v) {
  return frame_at(params, p).matrix() * v;
}

/// Levi-Civita connection nabla_{e_i} e_j in frame components (1-based indices).
inline TangentVector connection_frame(const AmbientParams& params, int i, int j,
                                      const AmbientPoint& p) {
  require_frame_index(i);
  require_frame_index(j);
  require_in_domain(params, p);
  const double kx = 0.5 * params.kappa * p.x;
  const double ky = 0.5 * params.kappa * p.y;
  const double t = params.tau;
  const std::array<std::array<TangentVector, 3>, 3> table = {{
      {TangentVector(0, ky, 0), TangentVector(-ky, 0, t), TangentVector(0, -t, 0)},
      {TangentVector(0, -kx, -t), TangentVector(kx, 0, 0), TangentVector(t, 0, 0)},
      {TangentVector(0, -t, 0), TangentVector(t, 0, 0), TangentVector(0, 0, 0)},
  }};
  return table[i - 1][j - 1];
}

/// nabla_X Y for constant frame-component fields X, Y at p.
inline TangentVector connection_apply(const AmbientParams& params, const TangentVector& X,
                                      const TangentVector& Y, const AmbientPoint& p) {
  TangentVector out;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      const double c = X[i - 1] * Y[j - 1];
      if (c != 0.0) out += c * connection_frame(params, i, j, p);
    }
  }
  return out;
}

/// [e_i, e_j] in frame components from the closed-form relations.
inline TangentVector commutator_closed_form(const AmbientParams& params, int i, int j,
                                            const AmbientPoint& p) {
  require_frame_index(i);
  require_frame_index(j);
  require_in_domain(params, p);
  if (i == j) return {};
  if ((i == 1 && j == 2) || (i == 2 && j == 1)) {
    const TangentVector c12(-0.5 * params.kappa * p.y, 0.5 * params.kappa * p.x,
                            2.0 * params.tau);
    return i == 1 ? c12 : TangentVector(-c12);
  }
  return {};  // [e2,e3] = [e3,e1] = 0
}

/// Riemann-Christoffel tensor R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z
/// - nabla_[X,Y] Z, all in frame components.
inline TangentVector curvature_tensor(const AmbientParams& params, const TangentVector& X,
                                      const TangentVector& Y, const TangentVector& Z,
                                      const AmbientPoint& p) {
  require_in_domain(params, p);
  const double k = params.kappa;
  const double t2 = params.tau * params.tau;
  const TangentVector e3(0, 0, 1);
  const double x3 = X.z();
  const double y3 = Y.z();
  const double z3 = Z.z();
  return (k - 3.0 * t2) * (Y.dot(Z) * X - X.dot(Z) * Y) -
         (k - 4.0 * t2) *
             (y3 * z3 * X - x3 * z3 * Y + x3 * Y.dot(Z) * e3 - y3 * X.dot(Z) * e3);
}

/// <R(X,Y)Y, X> / (|X|^2 |Y|^2 - <X,Y>^2).
inline double sectional_curvature(const AmbientParams& params, const TangentVector& X,
                                  const TangentVector& Y, const AmbientPoint& p) {
  const double area2 = X.squaredNorm() * Y.squaredNorm() - std::pow(X.dot(Y), 2);
  if (area2 <= 0.0) {
    throw GeometryError(ErrorKind::kPrecondition, "sectional curvature of a degenerate plane");
  }
  return curvature_tensor(params, X, Y, Y, p).dot(X) / area2;
}

/// Hopf fibration (x, y, z) -> (x, y).
inline std::pair<double, double> hopf_project(const AmbientPoint& p) { return {p.x, p.y}; }

// ---------------------------------------------------------------------------
// Finite-difference oracles. These read the geometry from metric_at and
// frame_at only.

/// Coordinate Christoffel symbols; gamma[k](i, j) = Gamma^k_{ij}.
using Christoffel = std::array<Eigen::Matrix3d, 3>;

inline Christoffel christoffel_oracle(const AmbientParams& params, const AmbientPoint& p,
                                      double h = 1e-5) {
  require_stencil_margin(params, p, h);
  std::array<Eigen::Matrix3d, 3> dg;  // dg[l] = d_l g
  for (int l = 0; l < 3; ++l) {
    dg[l] = fd::central(
        [&](double s) {
          Eigen::Vector3d q = p.vec();
          q[l] = s;
          return Eigen::Matrix3d(metric_at(params, AmbientPoint::from(q)));
        },
        p.vec()[l], h);
  }
  const Eigen::Matrix3d ginv = metric_at(params, p).inverse();
  Christoffel gamma;
  for (int k = 0; k < 3; ++k) {
    gamma[k].setZero();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l) {
          s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        }
        gamma[k](i, j) = 0.5 * s;
      }
    }
  }
  return gamma;
}

namespace detail {

/// d_a e_j for a = 0..2 (coordinate components), by central differences.
inline std::array<CoordVector, 3> frame_derivatives(const AmbientParams& params,
                                                    const AmbientPoint& p, int j,
                                                    double h) {
  std::array<CoordVector, 3> d;
  for (int a = 0; a < 3; ++a) {
    d[a] = fd::central(
        [&](double s) {
          Eigen::Vector3d q = p.vec();
          q[a] = s;
          return Eigen::Vector3d(frame_at(params, AmbientPoint::from(q))[j]);
        },
        p.vec()[a], h);
  }
  return d;
}

/// Directional derivative X^a d_a Y of the frame field e_j along coordinate vector X.
inline CoordVector frame_field_derivative(const AmbientParams& params, const AmbientPoint& p,
                                          const CoordVector& X, int j, double h) {
  const auto d = frame_derivatives(params, p, j, h);
  return X.x() * d[0] + X.y() * d[1] + X.z() * d[2];
}

inline CoordVector christoffel_contract(const Christoffel& g, const CoordVector& X,
                                        const CoordVector& Y) {
  return CoordVector(X.dot(g[0] * Y), X.dot(g[1] * Y), X.dot(g[2] * Y));
}

}  // namespace detail

/// nabla_{e_i} e_j in frame components, assembled from christoffel_oracle
/// and finite differences of the frame fields.
inline TangentVector connection_oracle(const AmbientParams& params, int i, int j,
                                       const AmbientPoint& p, double h = 1e-5) {
  require_frame_index(i);
  require_frame_index(j);
  const Christoffel gamma = christoffel_oracle(params, p, h);
  const Frame frame = frame_at(params, p);
  const CoordVector ei = frame[i];
  const CoordVector ej = frame[j];
  const CoordVector coord = detail::frame_field_derivative(params, p, ei, j, h) +
                            detail::christoffel_contract(gamma, ei, ej);
  return to_frame(params, p, coord);
}

/// [e_i, e_j] in frame components by finite differences of the frame fields.
inline TangentVector commutator_oracle(const AmbientParams& params, int i, int j,
                                       const AmbientPoint& p, double h = 1e-5) {
  require_frame_index(i);
  require_frame_index(j);
  require_stencil_margin(params, p, h);
  const Frame frame = frame_at(params, p);
  const CoordVector coord = detail::frame_field_derivative(params, p, frame[i], j, h) -
                            detail::frame_field_derivative(params, p, frame[j], i, h);
  return to_frame(params, p, coord);
}

/// R(X,Y)Z from coordinate Riemann components
///   R^l_{ijk} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik},
/// with the Christoffel symbols themselves from christoffel_oracle(h_inner)
/// and their derivatives by central differences of width h_outer.
inline TangentVector curvature_oracle(const AmbientParams& params, const TangentVector& X,
                                      const TangentVector& Y, const TangentVector& Z,
                                      const AmbientPoint& p, double h_outer = 1e-3,
                                      double h_inner = 1e-5) {
  require_stencil_margin(params, p, h_outer + h_inner);
  const Christoffel g = christoffel_oracle(params, p, h_inner);
  std::array<Christoffel, 3> dg;  // dg[a][l](j,k) = d_a Gamma^l_{jk}
  for (int a = 0; a < 3; ++a) {
    Eigen::Vector3d qp = p.vec();
    Eigen::Vector3d qm = p.vec();
    qp[a] += h_outer;
    qm[a] -= h_outer;
    const Christoffel gp = christoffel_oracle(params, AmbientPoint::from(qp), h_inner);
    const Christoffel gm = christoffel_oracle(params, AmbientPoint::from(qm), h_inner);
    for (int l = 0; l < 3; ++l) dg[a][l] = (gp[l] - gm[l]) / (2.0 * h_outer);
  }
  const Frame frame = frame_at(params, p);
  const Eigen::Matrix3d E = frame.matrix();
  const Eigen::Vector3d x = E * X;
  const Eigen::Vector3d y = E * Y;
  const Eigen::Vector3d z = E * Z;
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int l = 0; l < 3; ++l) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double xy = x[i] * y[j];
        if (xy == 0.0) continue;
        for (int k = 0; k < 3; ++k) {
          double r = dg[i][l](j, k) - dg[j][l](i, k);
          for (int m = 0; m < 3; ++m) {
            r += g[l](i, m) * g[m](j, k) - g[l](j, m) * g[m](i, k);
          }
          s += r * xy * z[k];
        }
      }
    }
    out[l] = s;
  }
  return to_frame(params, p, out);
}

}  // namespace casurf
