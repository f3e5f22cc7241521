/// @file
/// Extrinsic and intrinsic geometry of an immersed surface patch
/// F : (u, v) -> M(kappa, tau).
///
/// Conventions:
///  - N is the unit normal with <N, e3> >= 0; when <N, e3> = 0 the tie is
///    broken by requiring {F_u, F_v, N} to be positively oriented.
///  - cos(theta) = <N, e3>, T = e3 - cos(theta) N, J X = N x X.
///  - S X = -nabla_X N. Matrices are returned in the orthonormal basis
///    {T/|T|, JT/|JT|}, which gives the same matrix as the basis {T, JT}
///    because |T| = |JT| = sin(theta).
///
/// All derivatives of fields on the surface use fourth-order central
/// stencils; the steps live in FdSteps.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "casurf/ambient.hpp"
#include "casurf/error.hpp"
#include "casurf/finite_difference.hpp"

namespace casurf {

struct ParamPoint {
  double u = 0.0;
  double v = 0.0;
};

struct ParamDomain {
  double u0 = -std::numeric_limits<double>::infinity();
  double u1 = std::numeric_limits<double>::infinity();
  double v0 = -std::numeric_limits<double>::infinity();
  double v1 = std::numeric_limits<double>::infinity();

  bool contains(double u, double v, double margin = 0.0) const {
    return u - margin >= u0 && u + margin <= u1 && v - margin >= v0 && v + margin <= v1;
  }
};

/// F_u and F_v in coordinate components.
struct CoordTangents {
  CoordVector du;
  CoordVector dv;
};

struct FdSteps {
  double tangent = 1e-3;   ///< F -> F_u, F_v when no exact tangents are supplied
  double field = 1e-3;     ///< derivatives of N, T, cos(theta), lambda
  double codazzi = 1e-4;   ///< derivatives of S applied to coordinate fields
  double brioschi = 1e-2;  ///< first/second derivatives of E, F, G
};

class Immersion {
 public:
  using PositionFn = std::function<AmbientPoint(double, double)>;
  using TangentFn = std::function<CoordTangents(double, double)>;

  Immersion(AmbientParams params, ParamDomain domain, PositionFn position,
            TangentFn tangents = {})
      : params_(params),
        domain_(domain),
        position_(std::move(position)),
        tangents_(std::move(tangents)) {}

  const AmbientParams& params() const { return params_; }
  const ParamDomain& domain() const { return domain_; }
  const FdSteps& steps() const { return steps_; }
  void set_steps(const FdSteps& steps) { steps_ = steps; }
  bool has_exact_tangents() const { return static_cast<bool>(tangents_); }

  AmbientPoint position(double u, double v) const {
    const AmbientPoint p = position_(u, v);
    require_in_domain(params_, p);
    return p;
  }

  CoordTangents tangents(double u, double v) const {
    if (tangents_) return tangents_(u, v);
    const double h = steps_.tangent;
    return {fd::central5([&](double s) { return position(s, v).vec(); }, u, h),
            fd::central5([&](double s) { return position(u, s).vec(); }, v, h)};
  }

  /// Throws kStepTooLarge when a stencil of half-width `reach` leaves the domain.
  void require_stencil(double u, double v, double reach) const {
    if (!domain_.contains(u, v, reach)) {
      throw GeometryError(ErrorKind::kStepTooLarge,
                          "stencil at (" + std::to_string(u) + ", " + std::to_string(v) +
                              ") leaves the parameter domain");
    }
  }

 private:
  AmbientParams params_;
  ParamDomain domain_;
  PositionFn position_;
  TangentFn tangents_;
  FdSteps steps_;
};

/// Adds eps * sin(u) to the fiber coordinate: a genuine immersion that is not
/// constant-angle. Used as a negative control.
inline Immersion add_fiber_perturbation(const Immersion& imm, double eps) {
  Immersion out(
      imm.params(), imm.domain(),
      [imm, eps](double u, double v) {
        AmbientPoint p = imm.position(u, v);
        p.z += eps * std::sin(u);
        return p;
      },
      imm.has_exact_tangents() ? Immersion::TangentFn([imm, eps](double u, double v) {
        CoordTangents t = imm.tangents(u, v);
        t.du.z() += eps * std::cos(u);
        return t;
      })
                               : Immersion::TangentFn{});
  out.set_steps(imm.steps());
  return out;
}

// ---------------------------------------------------------------------------

/// Tangent vectors F_u, F_v in frame components at F(u, v).
struct FrameTangents {
  AmbientPoint point;
  TangentVector du;
  TangentVector dv;
};

inline FrameTangents frame_tangents(const Immersion& imm, double u, double v) {
  const AmbientPoint p = imm.position(u, v);
  const CoordTangents t = imm.tangents(u, v);
  const Eigen::Matrix3d co = coframe_at(imm.params(), p);
  return {p, co * t.du, co * t.dv};
}

/// Gram matrix of {F_u, F_v} under metric_at.
inline Eigen::Matrix2d first_fundamental_form(const Immersion& imm, double u, double v) {
  const AmbientPoint p = imm.position(u, v);
  const CoordTangents t = imm.tangents(u, v);
  const MetricMatrix g = metric_at(imm.params(), p);
  Eigen::Matrix2d I;
  I(0, 0) = t.du.dot(g * t.du);
  I(0, 1) = I(1, 0) = t.du.dot(g * t.dv);
  I(1, 1) = t.dv.dot(g * t.dv);
  if (!(I.determinant() > 1e-14 * I(0, 0) * I(1, 1)) || !std::isfinite(I.determinant())) {
    throw GeometryError(ErrorKind::kImmersionFailure,
                        "degenerate tangent plane at (" + std::to_string(u) + ", " +
                            std::to_string(v) + ")");
  }
  return I;
}

/// |F_u x F_v| / (|F_u| |F_v|): 1 for orthogonal tangents, 0 when degenerate.
inline double immersion_conditioning(const Immersion& imm, double u, double v) {
  const FrameTangents ft = frame_tangents(imm, u, v);
  const double denom = ft.du.norm() * ft.dv.norm();
  return denom > 0.0 ? ft.du.cross(ft.dv).norm() / denom : 0.0;
}

/// |<N, e3>| at or below this counts as a horizontal normal.
inline constexpr double kHorizontalNormal = 1e-13;

inline TangentVector unit_normal(const Immersion& imm, double u, double v) {
  const FrameTangents ft = frame_tangents(imm, u, v);
  TangentVector n = ft.du.cross(ft.dv);
  const double len = n.norm();
  if (!(len > 1e-14 * ft.du.norm() * ft.dv.norm())) {
    throw GeometryError(ErrorKind::kImmersionFailure,
                        "F_u and F_v are dependent at (" + std::to_string(u) + ", " +
                            std::to_string(v) + ")");
  }
  n /= len;
  // Horizontal normals keep the orientation of {F_u, F_v, N}.
  if (n.z() < -kHorizontalNormal) n = -n;
  return n;
}

struct AngleData {
  double theta = 0.0;
  double cos_theta = 1.0;
  TangentVector N;
  TangentVector T;
  TangentVector JT;
};

inline AngleData angle_and_projections(const Immersion& imm, double u, double v) {
  AngleData a;
  a.N = unit_normal(imm, u, v);
  a.cos_theta = std::clamp(a.N.z(), 0.0, 1.0);
  a.theta = std::atan2(std::hypot(a.N.x(), a.N.y()), a.cos_theta);
  a.T = TangentVector(0, 0, 1) - a.cos_theta * a.N;
  a.JT = a.N.cross(a.T);
  return a;
}

/// theta closer than this to 0 or pi/2 has no usable {T, JT} basis.
inline constexpr double kDegenerateAngle = 1e-9;

inline bool angle_is_degenerate(double theta) {
  return theta < kDegenerateAngle || theta > std::numbers::pi / 2 - kDegenerateAngle;
}

enum class ShapeBasis { kTJT, kOrthonormal };

struct ShapeOperator {
  /// Column j is the image of basis vector j.
  Eigen::Matrix2d matrix;
  ShapeBasis basis = ShapeBasis::kTJT;
  TangentVector b1;  ///< unit basis vectors in frame components
  TangentVector b2;
  /// S_22 in the {T, JT} basis; NaN for the orthonormal fallback.
  double lambda = std::numeric_limits<double>::quiet_NaN();

  // Data to apply S to any tangent vector.
  TangentVector s_du;  ///< S F_u
  TangentVector s_dv;  ///< S F_v
  TangentVector du;
  TangentVector dv;
  Eigen::Matrix2d gram_inverse;

  TangentVector apply(const TangentVector& X) const {
    const Eigen::Vector2d c = gram_inverse * Eigen::Vector2d(X.dot(du), X.dot(dv));
    return c[0] * s_du + c[1] * s_dv;
  }
};

namespace detail {

/// d/du and d/dv of a frame-component field on the surface.
template <class Field>
std::pair<TangentVector, TangentVector> field_partials(const Field& f, double u, double v,
                                                       double h) {
  return {fd::central5([&](double s) { return Eigen::Vector3d(f(s, v)); }, u, h),
          fd::central5([&](double s) { return Eigen::Vector3d(f(u, s)); }, v, h)};
}

inline TangentVector tangential(const TangentVector& X, const TangentVector& N) {
  return X - X.dot(N) * N;
}

}  // namespace detail

/// S F_u = -nabla_{F_u} N and S F_v = -nabla_{F_v} N, tangential parts.
inline std::pair<TangentVector, TangentVector> shape_on_coordinate_fields(
    const Immersion& imm, double u, double v) {
  const FrameTangents ft = frame_tangents(imm, u, v);
  const TangentVector N = unit_normal(imm, u, v);
  const auto [dNu, dNv] = detail::field_partials(
      [&](double a, double b) { return unit_normal(imm, a, b); }, u, v, imm.steps().field);
  const AmbientParams& params = imm.params();
  const TangentVector su = -(dNu + connection_apply(params, ft.du, N, ft.point));
  const TangentVector sv = -(dNv + connection_apply(params, ft.dv, N, ft.point));
  return {detail::tangential(su, N), detail::tangential(sv, N)};
}

inline ShapeOperator shape_operator(const Immersion& imm, double u, double v,
                                    ShapeBasis basis = ShapeBasis::kTJT) {
  const FrameTangents ft = frame_tangents(imm, u, v);
  const AngleData a = angle_and_projections(imm, u, v);
  ShapeOperator s;
  s.basis = basis;
  s.du = ft.du;
  s.dv = ft.dv;
  Eigen::Matrix2d gram;
  gram << ft.du.dot(ft.du), ft.du.dot(ft.dv), ft.du.dot(ft.dv), ft.dv.dot(ft.dv);
  s.gram_inverse = gram.inverse();
  std::tie(s.s_du, s.s_dv) = shape_on_coordinate_fields(imm, u, v);

  if (basis == ShapeBasis::kTJT) {
    if (angle_is_degenerate(a.theta)) {
      throw GeometryError(ErrorKind::kBasisDegenerate,
                          "theta = " + std::to_string(a.theta) +
                              " has no {T, JT} basis; request ShapeBasis::kOrthonormal");
    }
    s.b1 = a.T.normalized();
    s.b2 = a.JT.normalized();
  } else {
    s.b1 = ft.du.normalized();
    s.b2 = a.N.cross(s.b1);
  }
  const TangentVector sb1 = s.apply(s.b1);
  const TangentVector sb2 = s.apply(s.b2);
  s.matrix << sb1.dot(s.b1), sb2.dot(s.b1), sb1.dot(s.b2), sb2.dot(s.b2);
  if (basis == ShapeBasis::kTJT) s.lambda = s.matrix(1, 1);
  return s;
}

/// K = det S + tau^2 + (kappa - 4 tau^2) cos^2(theta).
inline double gaussian_curvature_extrinsic(const Immersion& imm, double u, double v,
                                           double shape_perturbation = 0.0) {
  const AngleData a = angle_and_projections(imm, u, v);
  Eigen::Matrix2d S = shape_operator(imm, u, v, ShapeBasis::kOrthonormal).matrix;
  S.diagonal().array() += shape_perturbation;
  const double k = imm.params().kappa;
  const double t2 = imm.params().tau * imm.params().tau;
  return S.determinant() + t2 + (k - 4.0 * t2) * a.cos_theta * a.cos_theta;
}

/// Intrinsic K by the Brioschi formula, with every derivative of E, F, G
/// taken by finite differences.
inline double gaussian_curvature_intrinsic(const Immersion& imm, double u, double v) {
  const double h = imm.steps().brioschi;
  imm.require_stencil(u, v, 4.0 * h);
  auto I = [&](double a, double b) { return first_fundamental_form(imm, a, b); };
  auto comp = [&](int i, int j) {
    return [&, i, j](double a, double b) { return I(a, b)(i, j); };
  };
  const auto E = comp(0, 0);
  const auto F = comp(0, 1);
  const auto G = comp(1, 1);
  auto du = [&](const auto& f, double a, double b) {
    return fd::central5([&](double s) { return f(s, b); }, a, h);
  };
  auto dv = [&](const auto& f, double a, double b) {
    return fd::central5([&](double s) { return f(a, s); }, b, h);
  };
  const Eigen::Matrix2d I0 = I(u, v);
  const double e = I0(0, 0), f = I0(0, 1), g = I0(1, 1);
  const double Eu = du(E, u, v), Ev = dv(E, u, v);
  const double Fu = du(F, u, v), Fv = dv(F, u, v);
  const double Gu = du(G, u, v), Gv = dv(G, u, v);
  const double Evv = fd::second5([&](double s) { return E(u, s); }, v, h);
  const double Guu = fd::second5([&](double s) { return G(s, v); }, u, h);
  const double Fuv = fd::central5([&](double s) { return du(F, u, s); }, v, h);

  Eigen::Matrix3d m1;
  m1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,  //
      Fv - 0.5 * Gu, e, f,                                       //
      0.5 * Gv, f, g;
  Eigen::Matrix3d m2;
  m2 << 0.0, 0.5 * Ev, 0.5 * Gu,  //
      0.5 * Ev, e, f,             //
      0.5 * Gu, f, g;
  const double w = e * g - f * f;
  return (m1.determinant() - m2.determinant()) / (w * w);
}

/// Surface Levi-Civita derivative of a tangent field W (frame components)
/// along the coordinate field F_u (dir = 0) or F_v (dir = 1).
template <class Field>
TangentVector surface_covariant_derivative(const Immersion& imm, const Field& W, double u,
                                           double v, int dir, double h) {
  const FrameTangents ft = frame_tangents(imm, u, v);
  const TangentVector N = unit_normal(imm, u, v);
  const auto [dWu, dWv] = detail::field_partials(W, u, v, h);
  const TangentVector X = dir == 0 ? ft.du : ft.dv;
  const TangentVector amb =
      (dir == 0 ? dWu : dWv) + connection_apply(imm.params(), X, W(u, v), ft.point);
  return detail::tangential(amb, N);
}

struct CompatibilityOptions {
  /// Replace S by S + eps * Id everywhere: an inconsistent datum that no
  /// immersion realizes.
  double shape_perturbation = 0.0;
};

struct CompatibilityResiduals {
  double gauss = 0.0;
  double codazzi = 0.0;
  double struct1 = 0.0;
  double struct2 = 0.0;

  double max() const { return std::max({gauss, codazzi, struct1, struct2}); }
};

/// Residuals of the Gauss, Codazzi and the two structure equations of M(kappa, tau):
///   K = det S + tau^2 + (kappa - 4 tau^2) cos^2(theta)              (vs Brioschi)
///   nabla_X SY - nabla_Y SX - S[X,Y] = (kappa - 4 tau^2) cos(theta) (<Y,T> X - <X,T> Y)
///   nabla_X T = cos(theta) (SX - tau JX)
///   X[cos(theta)] = -<SX - tau JX, T>
/// with X, Y running over the coordinate fields F_u, F_v.
inline CompatibilityResiduals compatibility_residuals(const Immersion& imm, double u, double v,
                                                      const CompatibilityOptions& opt = {}) {
  const AmbientParams& params = imm.params();
  const double eps = opt.shape_perturbation;
  const FdSteps& steps = imm.steps();
  imm.require_stencil(u, v, 4.0 * std::max(steps.brioschi, steps.field));

  CompatibilityResiduals r;
  const FrameTangents ft = frame_tangents(imm, u, v);
  const AngleData a = angle_and_projections(imm, u, v);

  r.gauss = std::abs(gaussian_curvature_extrinsic(imm, u, v, eps) -
                     gaussian_curvature_intrinsic(imm, u, v));

  auto shape_field = [&](int dir) {
    return [&imm, dir, eps](double s, double t) {
      const auto [su, sv] = shape_on_coordinate_fields(imm, s, t);
      const FrameTangents f = frame_tangents(imm, s, t);
      return TangentVector(dir == 0 ? su + eps * f.du : sv + eps * f.dv);
    };
  };
  const TangentVector lhs =
      surface_covariant_derivative(imm, shape_field(1), u, v, 0, steps.codazzi) -
      surface_covariant_derivative(imm, shape_field(0), u, v, 1, steps.codazzi);
  const double k4 = params.kappa - 4.0 * params.tau * params.tau;
  const TangentVector rhs =
      k4 * a.cos_theta * (ft.dv.dot(a.T) * ft.du - ft.du.dot(a.T) * ft.dv);
  r.codazzi = (lhs - rhs).norm();

  auto T_field = [&imm](double s, double t) { return angle_and_projections(imm, s, t).T; };
  auto cos_field = [&imm](double s, double t) {
    return angle_and_projections(imm, s, t).cos_theta;
  };
  const TangentVector S_du = shape_field(0)(u, v);
  const TangentVector S_dv = shape_field(1)(u, v);
  const double h = steps.field;
  const double dcos[2] = {fd::central5([&](double s) { return cos_field(s, v); }, u, h),
                          fd::central5([&](double s) { return cos_field(u, s); }, v, h)};
  for (int dir = 0; dir < 2; ++dir) {
    const TangentVector X = dir == 0 ? ft.du : ft.dv;
    const TangentVector SX = dir == 0 ? S_du : S_dv;
    const TangentVector W = SX - params.tau * a.N.cross(X);
    const TangentVector nabla_T = surface_covariant_derivative(imm, T_field, u, v, dir, h);
    r.struct1 = std::max(r.struct1, (nabla_T - a.cos_theta * W).norm());
    r.struct2 = std::max(r.struct2, std::abs(dcos[dir] + W.dot(a.T)));
  }
  return r;
}

/// Per-point package of the extrinsic data.
struct SurfaceGeometry {
  TangentVector N;
  double theta = 0.0;
  TangentVector T;
  TangentVector JT;
  Eigen::Matrix2d S;
  ShapeBasis basis = ShapeBasis::kTJT;
  double K = 0.0;
  double lambda = std::numeric_limits<double>::quiet_NaN();
};

inline SurfaceGeometry surface_geometry(const Immersion& imm, double u, double v) {
  const AngleData a = angle_and_projections(imm, u, v);
  const ShapeBasis basis =
      angle_is_degenerate(a.theta) ? ShapeBasis::kOrthonormal : ShapeBasis::kTJT;
  const ShapeOperator s = shape_operator(imm, u, v, basis);
  SurfaceGeometry g;
  g.N = a.N;
  g.theta = a.theta;
  g.T = a.T;
  g.JT = a.JT;
  g.S = s.matrix;
  g.basis = basis;
  g.lambda = s.lambda;
  g.K = gaussian_curvature_extrinsic(imm, u, v);
  return g;
}

}  // namespace casurf
