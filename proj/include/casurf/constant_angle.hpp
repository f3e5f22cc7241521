/// @file
/// Constant-angle surfaces in Nil3 = M(0, tau).
///
/// Every such surface is locally a Hopf cylinder (theta = pi/2) or, for
/// 0 < theta < pi/2, the surface
///
///   F1 = (tan th / 2 tau) sin u + f1(v)
///   F2 = -(tan th / 2 tau) cos u + f2(v)
///   F3 = -(tan^2 th / 4 tau) u - (tan th / 2)(cos u f1(v) + sin u f2(v)) - tau f3(v)
///
/// with (f1')^2 + (f2')^2 = sin^2 th and f3' = f1' f2 - f1 f2'.
///
/// The same surfaces are reconstructed independently by integrating the
/// tangent distribution dF/du = T, dF/dv = a T + b JT in "proof" coordinates,
/// where the normal angle is phi(u) = -2 tau cos^2 th u + c and
///
///   lambda = 2 tau cos th tan(psi),  a = sin(psi) / cos th,  b = cos(psi),
///   psi    = varphi(v) - 2 tau cos^2 th u.
///
/// The coordinates are related by u_thm = -2 tau cos^2 th u + c.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "casurf/ambient.hpp"
#include "casurf/error.hpp"
#include "casurf/grid.hpp"
#include "casurf/rk4.hpp"
#include "casurf/surface.hpp"

namespace casurf {

/// c0 + c1 v + c2 v^2.
struct Polynomial {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  double operator()(double v) const { return c[0] + v * (c[1] + v * c[2]); }
  double derivative(double v) const { return c[1] + 2.0 * c[2] * v; }
  int degree() const { return c[2] != 0.0 ? 2 : (c[1] != 0.0 ? 1 : 0); }
};

/// theta below this is treated as 0; above pi/2 minus this as pi/2.
inline constexpr double kAngleThreshold = 1e-6;

enum class ConstantAngleBranch {
  kLeaf,          ///< theta = 0, only possible for tau = 0
  kGeneric,       ///< 0 < theta < pi/2
  kHopfCylinder,  ///< theta = pi/2
};

/// theta = 0 requires the horizontal distribution to be integrable, which
/// fails as soon as tau != 0 ([e1, e2] has an e3 component).
inline ConstantAngleBranch classify_constant_angle(double theta, const AmbientParams& params) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
    throw GeometryError(ErrorKind::kPrecondition,
                        "angle " + std::to_string(theta) + " outside [0, pi/2]");
  }
  if (theta < kAngleThreshold) {
    if (params.tau != 0.0) {
      throw GeometryError(ErrorKind::kNonIntegrable,
                          "theta = " + std::to_string(theta) +
                              " (below threshold) with tau != 0: e1, e2 do not span an "
                              "integrable distribution");
    }
    return ConstantAngleBranch::kLeaf;
  }
  if (theta > std::numbers::pi / 2 - kAngleThreshold) return ConstantAngleBranch::kHopfCylinder;
  return ConstantAngleBranch::kGeneric;
}

/// Throws unless (theta, tau) selects the generic Nil3 branch.
inline void require_generic_nil3_angle(double theta, double tau) {
  if (tau == 0.0) throw GeometryError(ErrorKind::kPrecondition, "Nil3 requires tau != 0");
  if (classify_constant_angle(theta, AmbientParams::nil3(tau)) ==
      ConstantAngleBranch::kHopfCylinder) {
    throw GeometryError(ErrorKind::kPrecondition,
                        "theta = pi/2 is a Hopf cylinder; use hopf_cylinder()");
  }
}

/// Regular planar curve for Hopf cylinders.
struct PlanarCurve {
  std::function<Eigen::Vector2d(double)> point;
  std::function<Eigen::Vector2d(double)> velocity;

  static PlanarCurve circle(double radius, Eigen::Vector2d center = Eigen::Vector2d::Zero()) {
    return {[=](double s) { return Eigen::Vector2d(center + radius * Eigen::Vector2d(std::cos(s), std::sin(s))); },
            [=](double s) { return Eigen::Vector2d(radius * Eigen::Vector2d(-std::sin(s), std::cos(s))); }};
  }
  static PlanarCurve line(Eigen::Vector2d origin, Eigen::Vector2d direction) {
    return {[=](double s) { return Eigen::Vector2d(origin + s * direction); },
            [=](double) { return direction; }};
  }
};

/// F(s, t) = (gamma1(s), gamma2(s), t).
inline Immersion hopf_cylinder(const PlanarCurve& curve, const AmbientParams& params,
                               ParamDomain domain = {}) {
  return Immersion(
      params, domain,
      [curve](double s, double t) {
        const Eigen::Vector2d g = curve.point(s);
        return AmbientPoint{g.x(), g.y(), t};
      },
      [curve](double s, double) {
        const Eigen::Vector2d d = curve.velocity(s);
        if (!(d.norm() > 1e-14)) {
          throw GeometryError(ErrorKind::kImmersionFailure,
                              "base curve is singular at s = " + std::to_string(s));
        }
        return CoordTangents{CoordVector(d.x(), d.y(), 0.0), CoordVector(0.0, 0.0, 1.0)};
      });
}

/// The horizontal plane z = z0 (theta = 0), a leaf when tau = 0.
inline Immersion leaf_surface(const AmbientParams& params, double z0 = 0.0) {
  if (params.tau != 0.0) {
    throw GeometryError(ErrorKind::kNonIntegrable, "leaves exist only for tau = 0");
  }
  return Immersion(
      params, {}, [z0](double u, double v) { return AmbientPoint{u, v, z0}; },
      [](double, double) {
        return CoordTangents{CoordVector(1, 0, 0), CoordVector(0, 1, 0)};
      });
}

/// Data of a generic constant-angle surface in Nil3.
class ConstantAngleSpec {
 public:
  /// f1' = sin th sin(alpha), f2' = sin th cos(alpha), so the length
  /// constraint holds by construction; f3 is the matching primitive with
  /// f3(0) = f3_at_zero.
  static ConstantAngleSpec from_direction(double theta, double tau, double alpha,
                                          double f1_at_zero = 0.0, double f2_at_zero = 0.0,
                                          double f3_at_zero = 0.0) {
    require_generic_nil3_angle(theta, tau);
    const double d1 = std::sin(theta) * std::sin(alpha);
    const double d2 = std::sin(theta) * std::cos(alpha);
    Polynomial f1{{f1_at_zero, d1, 0.0}};
    Polynomial f2{{f2_at_zero, d2, 0.0}};
    Polynomial f3{{f3_at_zero, d1 * f2_at_zero - f1_at_zero * d2, 0.0}};
    return ConstantAngleSpec(theta, tau, f1, f2, f3);
  }

  /// Validates user-supplied coefficients.
  static ConstantAngleSpec from_polynomials(double theta, double tau, const Polynomial& f1,
                                            const Polynomial& f2, const Polynomial& f3) {
    require_generic_nil3_angle(theta, tau);
    if (f1.c[2] != 0.0 || f2.c[2] != 0.0) {
      throw GeometryError(ErrorKind::kInvalidSpec, "f1 and f2 must have degree at most one");
    }
    const double s2 = std::pow(std::sin(theta), 2);
    const double len2 = f1.c[1] * f1.c[1] + f2.c[1] * f2.c[1];
    if (std::abs(len2 - s2) > 1e-12 * std::max(1.0, s2)) {
      throw GeometryError(ErrorKind::kInvalidSpec,
                          "(f1')^2 + (f2')^2 = " + std::to_string(len2) +
                              " differs from sin^2(theta) = " + std::to_string(s2));
    }
    // f1' f2 - f1 f2' is the constant f1.c1 f2.c0 - f1.c0 f2.c1 for linear f1, f2.
    const double rhs = f1.c[1] * f2.c[0] - f1.c[0] * f2.c[1];
    const double scale = std::max({1.0, std::abs(f1.c[0]), std::abs(f2.c[0])});
    if (std::abs(f3.c[1] - rhs) > 1e-12 * scale || std::abs(f3.c[2]) > 1e-12 * scale) {
      throw GeometryError(ErrorKind::kInvalidSpec, "f3' != f1' f2 - f1 f2'");
    }
    return ConstantAngleSpec(theta, tau, f1, f2, f3);
  }

  double theta() const { return theta_; }
  double tau() const { return tau_; }
  const Polynomial& f1() const { return f1_; }
  const Polynomial& f2() const { return f2_; }
  const Polynomial& f3() const { return f3_; }
  /// alpha with (f1', f2') = sin th (sin alpha, cos alpha).
  double direction() const { return std::atan2(f1_.c[1], f2_.c[1]); }

 private:
  ConstantAngleSpec(double theta, double tau, Polynomial f1, Polynomial f2, Polynomial f3)
      : theta_(theta), tau_(tau), f1_(f1), f2_(f2), f3_(f3) {}

  double theta_;
  double tau_;
  Polynomial f1_;
  Polynomial f2_;
  Polynomial f3_;
};

inline AmbientPoint theorem1_point(const ConstantAngleSpec& spec, double u, double v) {
  const double t = std::tan(spec.theta());
  const double tau = spec.tau();
  const double k = t / (2.0 * tau);
  const double f1 = spec.f1()(v), f2 = spec.f2()(v), f3 = spec.f3()(v);
  return {k * std::sin(u) + f1, -k * std::cos(u) + f2,
          -t * t * u / (4.0 * tau) - 0.5 * t * (std::cos(u) * f1 + std::sin(u) * f2) -
              tau * f3};
}

inline Immersion theorem1_surface(const ConstantAngleSpec& spec, ParamDomain domain = {}) {
  return Immersion(
      AmbientParams::nil3(spec.tau()), domain,
      [spec](double u, double v) { return theorem1_point(spec, u, v); },
      [spec](double u, double v) {
        const double t = std::tan(spec.theta());
        const double tau = spec.tau();
        const double k = t / (2.0 * tau);
        const double f1 = spec.f1()(v), f2 = spec.f2()(v);
        const double d1 = spec.f1().derivative(v), d2 = spec.f2().derivative(v);
        const double c = std::cos(u), s = std::sin(u);
        return CoordTangents{
            CoordVector(k * c, k * s, -t * t / (4.0 * tau) + 0.5 * t * (s * f1 - c * f2)),
            CoordVector(d1, d2, -0.5 * t * (c * d1 + s * d2) - tau * spec.f3().derivative(v))};
      });
}

// ---------------------------------------------------------------------------
// Proof coordinates.

struct ProofFields {
  std::function<double(double)> varphi = [](double) { return 0.0; };
  double c = 0.0;

  static ProofFields constant(double varphi0, double c) {
    return {[varphi0](double) { return varphi0; }, c};
  }
};

/// psi = varphi(v) - 2 tau cos^2 th u.
inline double proof_argument(const ProofFields& pf, double theta, double tau, double u, double v) {
  const double ct = std::cos(theta);
  return pf.varphi(v) - 2.0 * tau * ct * ct * u;
}

/// Distance from x to the nearest pi/2 + k pi.
inline double tan_pole_distance(double x) {
  return std::abs(std::remainder(x - std::numbers::pi / 2, std::numbers::pi));
}

/// Nodes closer than this to a pole of lambda are rejected.
inline constexpr double kPoleMargin = 1e-3;

inline void require_off_pole(double psi, double u, double v) {
  if (tan_pole_distance(psi) < kPoleMargin) {
    throw GeometryError(ErrorKind::kSingularity,
                        "lambda pole near (u, v) = (" + std::to_string(u) + ", " +
                            std::to_string(v) + ")");
  }
}

inline double lambda_closed_form(const ProofFields& pf, double theta, double tau, double u,
                                 double v) {
  const double psi = proof_argument(pf, theta, tau, u, v);
  require_off_pole(psi, u, v);
  return 2.0 * tau * std::cos(theta) * std::tan(psi);
}

inline std::pair<double, double> ab_closed_form(const ProofFields& pf, double theta, double tau,
                                                double u, double v) {
  const double ct = std::cos(theta);
  if (std::abs(ct) < kAngleThreshold) {
    throw GeometryError(ErrorKind::kPrecondition, "a = sin(psi)/cos(theta) needs cos(theta) != 0");
  }
  const double psi = proof_argument(pf, theta, tau, u, v);
  return {std::sin(psi) / ct, std::cos(psi)};
}

/// Normal angle phi(u) = -2 tau cos^2 th u + c; independent of v.
inline double phi_closed_form(const ProofFields& pf, double theta, double tau, double u) {
  const double ct = std::cos(theta);
  return -2.0 * tau * ct * ct * u + pf.c;
}

/// u_thm = -2 tau cos^2 th u + c.
inline double theorem_u_from_proof_u(double theta, double tau, double c, double u) {
  const double ct = std::cos(theta);
  return -2.0 * tau * ct * ct * u + c;
}

/// T and JT along the distribution, frame components.
inline TangentVector proof_T(double theta, double phi) {
  const double s = std::sin(theta), c = std::cos(theta);
  return -s * TangentVector(c * std::cos(phi), c * std::sin(phi), -s);
}
inline TangentVector proof_JT(double theta, double phi) {
  return std::sin(theta) * TangentVector(std::sin(phi), -std::cos(phi), 0.0);
}

/// Proof data whose integral is theorem1_surface(spec) after the coordinate
/// change u_thm = -2 tau cos^2 th u + c. Only tau > 0 is supported.
struct ProofMatch {
  ProofFields fields;
  ParamPoint anchor;  ///< proof coordinates of `start`
  AmbientPoint start;
};

inline ProofMatch matching_proof_data(const ConstantAngleSpec& spec, double c = 0.0,
                                      ParamPoint anchor = {}) {
  if (!(spec.tau() > 0.0)) {
    throw GeometryError(ErrorKind::kPrecondition, "proof/theorem matching requires tau > 0");
  }
  const double varphi = c - std::numbers::pi + spec.direction();
  const double ut = theorem_u_from_proof_u(spec.theta(), spec.tau(), c, anchor.u);
  return {ProofFields::constant(varphi, c), anchor, theorem1_point(spec, ut, anchor.v)};
}

/// Inverse of matching_proof_data: the Theorem-1 spec reproduced by
/// integrating from `start` at `anchor` with constant varphi. tau > 0.
inline ConstantAngleSpec spec_from_proof_data(double theta, double tau, double varphi, double c,
                                              const AmbientPoint& start, ParamPoint anchor) {
  require_generic_nil3_angle(theta, tau);
  if (!(tau > 0.0)) {
    throw GeometryError(ErrorKind::kPrecondition, "proof/theorem matching requires tau > 0");
  }
  const double alpha = varphi - c + std::numbers::pi;
  const double d1 = std::sin(theta) * std::sin(alpha);
  const double d2 = std::sin(theta) * std::cos(alpha);
  const double t = std::tan(theta);
  const double ut = theorem_u_from_proof_u(theta, tau, c, anchor.u);
  const double k = t / (2.0 * tau);
  const double f1a = start.x - k * std::sin(ut);
  const double f2a = start.y + k * std::cos(ut);
  const double f3a =
      (-t * t * ut / (4.0 * tau) - 0.5 * t * (std::cos(ut) * f1a + std::sin(ut) * f2a) - start.z) / tau;
  const double o1 = f1a - d1 * anchor.v;
  const double o2 = f2a - d2 * anchor.v;
  const double m = d1 * o2 - o1 * d2;
  const Polynomial f1{{o1, d1, 0.0}}, f2{{o2, d2, 0.0}}, f3{{f3a - m * anchor.v, m, 0.0}};
  return ConstantAngleSpec::from_polynomials(theta, tau, f1, f2, f3);
}

/// Normal angle phi with N = (sin th cos phi, sin th sin phi, cos th).
inline double normal_angle(const Immersion& imm, double u, double v) {
  const TangentVector N = unit_normal(imm, u, v);
  return std::atan2(N.y(), N.x());
}

/// (d phi/du, d phi/dv) measured from the normal field.
inline std::pair<double, double> normal_angle_rates(const Immersion& imm, double u, double v) {
  const TangentVector N = unit_normal(imm, u, v);
  const auto [Nu, Nv] = detail::field_partials(
      [&imm](double a, double b) { return unit_normal(imm, a, b); }, u, v, imm.steps().field);
  const double h2 = N.x() * N.x() + N.y() * N.y();
  if (!(h2 > 0.0)) throw GeometryError(ErrorKind::kBasisDegenerate, "horizontal part of N vanishes");
  return {(N.x() * Nu.y() - N.y() * Nu.x()) / h2, (N.x() * Nv.y() - N.y() * Nv.x()) / h2};
}

// ---------------------------------------------------------------------------

/// Grid samples plus the continuous immersion they were drawn from. The
/// immersion re-integrates from the anchor on every evaluation.
struct IntegratedSurface {
  Immersion immersion;
  SampledSurface samples;
  std::vector<double> phi;  ///< normal angle at each node (grid order)
};

struct IntegrationOptions {
  double step = 1e-3;  ///< maximal RK4 step
  /// Where the initial point sits; defaults to the grid corner (u0, v0).
  std::optional<ParamPoint> anchor;
};

namespace detail {

inline CoordVector nil3_frame_to_coords(double tau, const Eigen::Vector3d& F,
                                        const TangentVector& c) {
  // e1 = (1, 0, -tau F2), e2 = (0, 1, tau F1), e3 = (0, 0, 1) at F.
  return CoordVector(c.x(), c.y(), -tau * F.y() * c.x() + tau * F.x() * c.y() + c.z());
}

}  // namespace detail

/// Integrates dF/du = T(phi(u)), dF/dv = a T + b JT in Nil3, first along u
/// from the anchor, then along v.
inline IntegratedSurface integrate_distribution(double theta, double tau, const ProofFields& pf,
                                                const AmbientPoint& p0, const GridSpec& grid,
                                                const IntegrationOptions& opt = {}) {
  require_generic_nil3_angle(theta, tau);
  grid.validate();
  const ParamPoint anchor = opt.anchor.value_or(ParamPoint{grid.domain.u0, grid.domain.v0});
  for (std::size_t j = 0; j < grid.nv; ++j) {
    for (std::size_t i = 0; i < grid.nu; ++i) {
      require_off_pole(proof_argument(pf, theta, tau, grid.u(i), grid.v(j)), grid.u(i), grid.v(j));
    }
  }
  const double step = opt.step;
  auto flow = [=](double u, double v) {
    auto du = [&](double s, const Eigen::Vector3d& F) -> Eigen::Vector3d {
      return detail::nil3_frame_to_coords(tau, F, proof_T(theta, phi_closed_form(pf, theta, tau, s)));
    };
    Eigen::Vector3d F = rk4_integrate(du, anchor.u, u, p0.vec(), step);
    const double phi = phi_closed_form(pf, theta, tau, u);
    const TangentVector T = proof_T(theta, phi);
    const TangentVector JT = proof_JT(theta, phi);
    auto dv = [&](double s, const Eigen::Vector3d& G) -> Eigen::Vector3d {
      const auto [a, b] = ab_closed_form(pf, theta, tau, u, s);
      return detail::nil3_frame_to_coords(tau, G, TangentVector(a * T + b * JT));
    };
    F = rk4_integrate(dv, anchor.v, v, F, step);
    return AmbientPoint::from(F);
  };
  Immersion imm(AmbientParams::nil3(tau), {}, flow);
  IntegratedSurface out{imm, sample(imm, grid), {}};
  for (std::size_t j = 0; j < grid.nv; ++j) {
    for (std::size_t i = 0; i < grid.nu; ++i) out.phi.push_back(phi_closed_form(pf, theta, tau, grid.u(i)));
  }
  return out;
}

}  // namespace casurf
