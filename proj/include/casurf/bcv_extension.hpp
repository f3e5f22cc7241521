/// @file
/// Constant-angle surfaces in a general BCV space M(kappa, tau).
///
/// With r^2 = kappa sin^2 th + 4 tau^2 cos^2 th > 0 and coordinates chosen so
/// that T = d/du and d/dv = a T + b JT,
///
///   lambda = r tan(psi),  a = (2 tau / r) sin(psi),  b = cos(psi),
///   psi    = varphi(v) - r cos th u,
///
/// and the immersion (F1, F2, F3) together with the normal angle phi solves
/// an eight-equation first-order system (four u-equations, four
/// v-equations). The u-equations for F1, F2, phi have the closed-form
/// solution implemented by remark_closed_form.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "casurf/ambient.hpp"
#include "casurf/constant_angle.hpp"
#include "casurf/error.hpp"
#include "casurf/finite_difference.hpp"
#include "casurf/grid.hpp"
#include "casurf/rk4.hpp"
#include "casurf/surface.hpp"

namespace casurf {

inline double r_squared(double kappa, double tau, double theta) {
  const double s = std::sin(theta), c = std::cos(theta);
  return kappa * s * s + 4.0 * tau * tau * c * c;
}

inline double require_solved_branch(double kappa, double tau, double theta) {
  const double r2 = r_squared(kappa, tau, theta);
  if (!(r2 > 0.0)) {
    throw GeometryError(ErrorKind::kUnsolvedBranch,
                        "r^2 = kappa sin^2(theta) + 4 tau^2 cos^2(theta) = " + std::to_string(r2) +
                            " is not positive");
  }
  return std::sqrt(r2);
}

struct LambdaAB {
  double lambda = 0.0;
  double a = 0.0;
  double b = 1.0;
};

inline LambdaAB bcv_lambda_a_b(double kappa, double tau, double theta,
                               const std::function<double(double)>& varphi, double u, double v) {
  const double r = require_solved_branch(kappa, tau, theta);
  const double psi = varphi(v) - r * std::cos(theta) * u;
  require_off_pole(psi, u, v);
  return {r * std::tan(psi), 2.0 * tau / r * std::sin(psi), std::cos(psi)};
}

// ---------------------------------------------------------------------------
// Closed-form solution of the u-equations.

struct RemarkFields {
  std::function<double(double)> D;
  std::function<double(double)> L;
  std::function<double(double)> rho;
  std::function<double(double)> C;

  static RemarkFields constant(double D, double L, double rho, double C) {
    return {[D](double) { return D; }, [L](double) { return L; }, [rho](double) { return rho; },
            [C](double) { return C; }};
  }

  /// Constant fields with D solving
  ///   D (1 + kappa L^2 / 4) - kappa sin^2(2 th) / (16 D) = 2 tau cos^2 th,
  /// the condition under which the phi-equation holds (positive root).
  static RemarkFields consistent(double kappa, double tau, double theta, double L, double rho,
                                 double C) {
    const double q = 1.0 + 0.25 * kappa * L * L;
    const double c2 = std::pow(std::cos(theta), 2);
    const double s2 = std::pow(std::sin(2.0 * theta), 2);
    const double disc = 4.0 * tau * tau * c2 * c2 + q * kappa * s2 / 4.0;
    if (!(q > 0.0) || disc < 0.0) {
      throw GeometryError(ErrorKind::kPrecondition, "no real D for the requested L");
    }
    const double D = (2.0 * tau * c2 + std::sqrt(disc)) / (2.0 * q);
    return constant(D, L, rho, C);
  }

  /// Constants reproducing the state (F1, F2, phi) at parameter u0.
  static RemarkFields from_state(double kappa, double tau, double theta, double F1, double F2,
                                 double phi, double u0 = 0.0);
};

struct RemarkCoefficients {
  double A = 0.0;
  double B = 0.0;
  double D = 0.0;
  double L = 0.0;
};

/// A = (kappa/4) sin 2th L, B = D + (kappa/4)(sin^2 2th / (4D) + D L^2).
inline RemarkCoefficients remark_coefficients(const RemarkFields& rf, double kappa, double theta,
                                              double v) {
  const double D = rf.D(v);
  if (D == 0.0) throw GeometryError(ErrorKind::kInvalidSpec, "D(v) must be nonzero");
  const double L = rf.L(v);
  const double s = std::sin(2.0 * theta);
  return {0.25 * kappa * s * L, D + 0.25 * kappa * (s * s / (4.0 * D) + D * L * L), D, L};
}

/// (B^2 - A^2) - r^2 cos^2 th; zero exactly when the constants are consistent.
inline double remark_identity_defect(const RemarkFields& rf, double kappa, double tau,
                                     double theta, double v) {
  const RemarkCoefficients k = remark_coefficients(rf, kappa, theta, v);
  return k.B * k.B - k.A * k.A - r_squared(kappa, tau, theta) * std::pow(std::cos(theta), 2);
}

inline double remark_constraint_defect(const RemarkFields& rf, double kappa, double tau,
                                       double theta, double v) {
  const double D = rf.D(v), L = rf.L(v);
  return D * (1.0 + 0.25 * kappa * L * L) -
         kappa * std::pow(std::sin(2.0 * theta), 2) / (16.0 * D) -
         2.0 * tau * std::pow(std::cos(theta), 2);
}

struct RemarkState {
  double F1 = 0.0;
  double F2 = 0.0;
  double phi = 0.0;
};

inline RemarkState remark_closed_form(const RemarkFields& rf, double kappa, double tau,
                                      double theta, double u, double v) {
  (void)tau;
  const RemarkCoefficients k = remark_coefficients(rf, kappa, theta, v);
  if (k.B == 0.0) throw GeometryError(ErrorKind::kPrecondition, "B(v) = 0: branch inconsistency");
  const double disc = k.B * k.B - k.A * k.A;
  if (!(disc > 0.0)) {
    throw GeometryError(ErrorKind::kUnsolvedBranch, "B^2 - A^2 is not positive");
  }
  const double R = std::sqrt(disc);
  const double arg = -0.5 * R * u + rf.C(v);
  if (tan_pole_distance(arg) < kPoleMargin) {
    throw GeometryError(ErrorKind::kSingularity,
                        "tan argument near a pole at u = " + std::to_string(u));
  }
  const double rho = rf.rho(v);
  const double phi = rho + 2.0 * std::atan((-k.A + R * std::tan(arg)) / k.B);
  const double q = std::sin(2.0 * theta) / (2.0 * k.D);
  return {q * std::sin(phi) + k.L * std::cos(rho), -q * std::cos(phi) + k.L * std::sin(rho), phi};
}

inline RemarkFields RemarkFields::from_state(double kappa, double tau, double theta, double F1,
                                             double F2, double phi, double u0) {
  const double s = std::sin(theta), c = std::cos(theta);
  const double w = 1.0 + 0.25 * kappa * (F1 * F1 + F2 * F2);
  // phi_u = -D w must agree with the phi-equation at the initial state.
  const double D = (0.5 * kappa * s * c * (F1 * std::sin(phi) - F2 * std::cos(phi)) +
                    2.0 * tau * c * c) / w;
  if (D == 0.0) throw GeometryError(ErrorKind::kInvalidSpec, "initial state forces D = 0");
  const double q = std::sin(2.0 * theta) / (2.0 * D);
  const double lc = F1 - q * std::sin(phi);
  const double ls = F2 + q * std::cos(phi);
  const double L = std::hypot(lc, ls);
  const double rho = std::atan2(ls, lc);
  RemarkFields rf = constant(D, L, rho, 0.0);
  const RemarkCoefficients k = remark_coefficients(rf, kappa, theta, 0.0);
  const double R = std::sqrt(k.B * k.B - k.A * k.A);
  const double half = 0.5 * std::remainder(phi - rho, 2.0 * std::numbers::pi);
  const double C = 0.5 * R * u0 + std::atan((k.B * std::tan(half) + k.A) / R);
  return constant(D, L, rho, C);
}

/// Residuals of the three u-equations (phi, F1, F2) for the closed forms.
struct RemarkResiduals {
  double phi = 0.0;
  double F1 = 0.0;
  double F2 = 0.0;

  double max() const { return std::max({phi, F1, F2}); }
};

inline RemarkResiduals remark_u_residuals(const RemarkFields& rf, double kappa, double tau,
                                          double theta, double u, double v, double h = 1e-3) {
  const double s = std::sin(theta), c = std::cos(theta);
  const RemarkState st = remark_closed_form(rf, kappa, tau, theta, u, v);
  auto at = [&](double x) {
    const RemarkState r = remark_closed_form(rf, kappa, tau, theta, x, v);
    return Eigen::Vector3d(r.F1, r.F2, r.phi);
  };
  const Eigen::Vector3d d = fd::central5(at, u, h);
  const double w = 1.0 + 0.25 * kappa * (st.F1 * st.F1 + st.F2 * st.F2);
  const double phi_u = -0.5 * kappa * s * c * (st.F1 * std::sin(st.phi) - st.F2 * std::cos(st.phi)) -
                       2.0 * tau * c * c;
  return {std::abs(d[2] - phi_u), std::abs(d[0] + s * c * std::cos(st.phi) * w),
          std::abs(d[1] + s * c * std::sin(st.phi) * w)};
}

/// Residuals of the v-equations (phi, F1, F2) for the closed forms. The
/// closed forms are not known to satisfy these for general D, L, rho, C;
/// the values are reported, not asserted.
inline RemarkResiduals remark_v_residuals(const RemarkFields& rf, double kappa, double tau,
                                          double theta, const std::function<double(double)>& varphi,
                                          double u, double v, double h = 1e-3) {
  const double s = std::sin(theta);
  const RemarkState st = remark_closed_form(rf, kappa, tau, theta, u, v);
  const LambdaAB lab = bcv_lambda_a_b(kappa, tau, theta, varphi, u, v);
  auto at = [&](double x, double y) {
    const RemarkState r = remark_closed_form(rf, kappa, tau, theta, x, y);
    return Eigen::Vector3d(r.F1, r.F2, r.phi);
  };
  const Eigen::Vector3d du = fd::central5([&](double x) { return at(x, v); }, u, h);
  const Eigen::Vector3d dv = fd::central5([&](double y) { return at(u, y); }, v, h);
  const double w = 1.0 + 0.25 * kappa * (st.F1 * st.F1 + st.F2 * st.F2);
  const double phi_v =
      lab.a * du[2] +
      lab.b * (lab.lambda - 0.5 * kappa * s * (st.F1 * std::cos(st.phi) + st.F2 * std::sin(st.phi)));
  const double f1_v = lab.a * du[0] + lab.b * s * std::sin(st.phi) * w;
  const double f2_v = lab.a * du[1] - lab.b * s * std::cos(st.phi) * w;
  return {std::abs(dv[2] - phi_v), std::abs(dv[0] - f1_v), std::abs(dv[1] - f2_v)};
}

// ---------------------------------------------------------------------------
// Numerical integration of the full system.

/// (F1, F2, F3, phi).
using BcvState = Eigen::Vector4d;

namespace detail {

struct BcvSystem {
  double kappa, tau, theta, r;
  std::function<double(double)> varphi;

  double w(const BcvState& y) const { return 1.0 + 0.25 * kappa * (y[0] * y[0] + y[1] * y[1]); }

  void require_chart(const BcvState& y) const {
    if (!(w(y) > 0.0) || !y.allFinite()) {
      throw GeometryError(ErrorKind::kDomainExit, "integration left 1 + (kappa/4)(F1^2+F2^2) > 0");
    }
  }

  BcvState du(const BcvState& y) const {
    require_chart(y);
    const double s = std::sin(theta), c = std::cos(theta);
    const double F1 = y[0], F2 = y[1], ph = y[3];
    const double cp = std::cos(ph), sp = std::sin(ph);
    const double ww = w(y);
    BcvState d;
    d[0] = -s * c * cp * ww;
    d[1] = -s * c * sp * ww;
    d[2] = -s * (-tau * F2 * c * cp + tau * F1 * c * sp - s);
    d[3] = -0.5 * kappa * s * c * (F1 * sp - F2 * cp) - 2.0 * tau * c * c;
    return d;
  }

  BcvState dv(double u, double v, const BcvState& y) const {
    const double s = std::sin(theta), c = std::cos(theta);
    const double psi = varphi(v) - r * c * u;
    const double lambda = r * std::tan(psi);
    const double a = 2.0 * tau / r * std::sin(psi);
    const double b = std::cos(psi);
    const BcvState yu = du(y);
    const double F1 = y[0], F2 = y[1], ph = y[3];
    const double cp = std::cos(ph), sp = std::sin(ph);
    const double ww = w(y);
    BcvState d;
    d[0] = a * yu[0] + b * s * sp * ww;
    d[1] = a * yu[1] - b * s * cp * ww;
    d[2] = a * yu[2] - b * tau * s * (F2 * sp + F1 * cp);
    d[3] = a * yu[3] + b * (lambda - 0.5 * kappa * s * (F1 * cp + F2 * sp));
    return d;
  }
};

}  // namespace detail

struct BcvIntegratedSurface : IntegratedSurface {
  /// (F1, F2, F3, phi) at any (u, v), integrated from the anchor.
  std::function<BcvState(double, double)> state;
};

/// RK4 integration of the eight-equation system: u-flow from the anchor,
/// then v-flow for each u. `start` is (F1, F2, F3, phi) at the anchor.
inline BcvIntegratedSurface integrate_bcv_system(double kappa, double tau, double theta,
                                              const std::function<double(double)>& varphi,
                                              const BcvState& start, const GridSpec& grid,
                                              const IntegrationOptions& opt = {}) {
  const double r = require_solved_branch(kappa, tau, theta);
  const AmbientParams params{kappa, tau};
  if (classify_constant_angle(theta, params) != ConstantAngleBranch::kGeneric) {
    throw GeometryError(ErrorKind::kPrecondition, "integration needs 0 < theta < pi/2");
  }
  grid.validate();
  require_in_domain(params, {start[0], start[1], start[2]});
  const ParamPoint anchor = opt.anchor.value_or(ParamPoint{grid.domain.u0, grid.domain.v0});
  for (std::size_t j = 0; j < grid.nv; ++j) {
    for (std::size_t i = 0; i < grid.nu; ++i) {
      require_off_pole(varphi(grid.v(j)) - r * std::cos(theta) * grid.u(i), grid.u(i), grid.v(j));
    }
  }
  const detail::BcvSystem sys{kappa, tau, theta, r, varphi};
  const double step = opt.step;
  auto state_at = [sys, start, anchor, step](double u, double v) {
    BcvState y = rk4_integrate([&](double, const BcvState& s) { return sys.du(s); }, anchor.u, u,
                               start, step);
    y = rk4_integrate([&](double t, const BcvState& s) { return sys.dv(u, t, s); }, anchor.v, v, y,
                      step);
    sys.require_chart(y);
    return y;
  };
  Immersion imm(params, {}, [state_at](double u, double v) {
    const BcvState y = state_at(u, v);
    return AmbientPoint{y[0], y[1], y[2]};
  });
  BcvIntegratedSurface out{{imm, SampledSurface{grid, params, {}}, {}}, state_at};
  for (std::size_t j = 0; j < grid.nv; ++j) {
    for (std::size_t i = 0; i < grid.nu; ++i) {
      const BcvState y = state_at(grid.u(i), grid.v(j));
      out.samples.points.push_back({y[0], y[1], y[2]});
      out.phi.push_back(y[3]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constant-angle residual report.

/// Deviations of a candidate constant-angle surface from
///  - constancy of theta,
///  - S = [[0, -tau], [-tau, lambda]] in {T, JT},
///  - the surface connection table
///      nabla_T T = -2 tau cos th JT,   nabla_JT T = lambda cos th JT,
///      nabla_T JT = 2 tau cos th T,    nabla_JT JT = -lambda cos th T,
///  - K = (kappa - 4 tau^2) cos^2 th (intrinsic and extrinsic),
///  - T[lambda] + lambda^2 cos th + kappa cos th sin^2 th + 4 tau^2 cos^3 th = 0.
/// Entries that do not apply on the theta = 0 or pi/2 branch are NaN.
struct ConstantAngleReport {
  ConstantAngleBranch branch = ConstantAngleBranch::kGeneric;
  double theta = 0.0;  ///< angle at the first sample
  std::size_t samples = 0;
  double angle_spread = 0.0;
  double shape_s11 = std::numeric_limits<double>::quiet_NaN();
  double shape_s12 = std::numeric_limits<double>::quiet_NaN();
  double connection = std::numeric_limits<double>::quiet_NaN();
  double curvature_extrinsic = 0.0;
  double curvature_intrinsic = 0.0;
  double lambda_pde = std::numeric_limits<double>::quiet_NaN();

  /// True when every applicable entry is below tol.
  bool within(double tol) const {
    for (double x : {angle_spread, shape_s11, shape_s12, connection, curvature_extrinsic,
                     curvature_intrinsic, lambda_pde}) {
      if (!std::isnan(x) && !(x < tol)) return false;
    }
    return true;
  }
};

namespace detail {

/// Coefficients (alpha, beta) with X = alpha F_u + beta F_v.
inline Eigen::Vector2d coordinate_coefficients(const FrameTangents& ft, const TangentVector& X) {
  Eigen::Matrix2d gram;
  gram << ft.du.dot(ft.du), ft.du.dot(ft.dv), ft.du.dot(ft.dv), ft.dv.dot(ft.dv);
  return gram.inverse() * Eigen::Vector2d(X.dot(ft.du), X.dot(ft.dv));
}

}  // namespace detail

inline ConstantAngleReport lemma4_residuals(const Immersion& imm,
                                            std::span<const ParamPoint> samples) {
  if (samples.empty()) throw GeometryError(ErrorKind::kPrecondition, "no sample points");
  const AmbientParams& params = imm.params();
  const double tau = params.tau, kappa = params.kappa;
  ConstantAngleReport rep;
  rep.samples = samples.size();
  rep.theta = angle_and_projections(imm, samples[0].u, samples[0].v).theta;
  const bool degenerate = angle_is_degenerate(rep.theta);
  rep.branch = rep.theta < kDegenerateAngle ? ConstantAngleBranch::kLeaf
               : degenerate                 ? ConstantAngleBranch::kHopfCylinder
                                            : ConstantAngleBranch::kGeneric;
  if (!degenerate) {
    rep.shape_s11 = rep.shape_s12 = rep.connection = rep.lambda_pde = 0.0;
  }
  const double h = imm.steps().field;
  for (const ParamPoint& p : samples) {
    const double u = p.u, v = p.v;
    const AngleData a = angle_and_projections(imm, u, v);
    rep.angle_spread = std::max(rep.angle_spread, std::abs(a.theta - rep.theta));
    const double ct = a.cos_theta, st = std::sin(a.theta);
    const double K_expected = (kappa - 4.0 * tau * tau) * ct * ct;
    rep.curvature_extrinsic =
        std::max(rep.curvature_extrinsic, std::abs(gaussian_curvature_extrinsic(imm, u, v) - K_expected));
    rep.curvature_intrinsic =
        std::max(rep.curvature_intrinsic, std::abs(gaussian_curvature_intrinsic(imm, u, v) - K_expected));
    if (degenerate) continue;

    const ShapeOperator S = shape_operator(imm, u, v, ShapeBasis::kTJT);
    rep.shape_s11 = std::max(rep.shape_s11, std::abs(S.matrix(0, 0)));
    rep.shape_s12 = std::max(rep.shape_s12, std::abs(S.matrix(0, 1) + tau));
    rep.shape_s12 = std::max(rep.shape_s12, std::abs(S.matrix(1, 0) + tau));
    const double lambda = S.lambda;

    const FrameTangents ft = frame_tangents(imm, u, v);
    auto T_field = [&imm](double s, double t) { return angle_and_projections(imm, s, t).T; };
    auto JT_field = [&imm](double s, double t) { return angle_and_projections(imm, s, t).JT; };
    auto along = [&](const TangentVector& X, const auto& W) {
      const Eigen::Vector2d c = detail::coordinate_coefficients(ft, X);
      return TangentVector(c[0] * surface_covariant_derivative(imm, W, u, v, 0, h) +
                           c[1] * surface_covariant_derivative(imm, W, u, v, 1, h));
    };
    const double scale = st * st;  // |T|^2 = |JT|^2
    const double conn = std::max(
        {(along(a.T, T_field) + 2.0 * tau * ct * a.JT).norm(),
         (along(a.JT, T_field) - lambda * ct * a.JT).norm(),
         (along(a.T, JT_field) - 2.0 * tau * ct * a.T).norm(),
         (along(a.JT, JT_field) + lambda * ct * a.T).norm()}) / scale;
    rep.connection = std::max(rep.connection, conn);

    auto lambda_field = [&imm](double s, double t) {
      return shape_operator(imm, s, t, ShapeBasis::kTJT).lambda;
    };
    const Eigen::Vector2d c = detail::coordinate_coefficients(ft, a.T);
    const double T_lambda = c[0] * fd::central5([&](double s) { return lambda_field(s, v); }, u, h) +
                            c[1] * fd::central5([&](double s) { return lambda_field(u, s); }, v, h);
    const double pde = T_lambda + lambda * lambda * ct + kappa * ct * st * st +
                       4.0 * tau * tau * ct * ct * ct;
    rep.lambda_pde = std::max(rep.lambda_pde, std::abs(pde));
  }
  return rep;
}

}  // namespace casurf
