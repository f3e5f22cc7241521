#pragma once

#include <fmt/core.h>
#include <fmt/ostream.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "casurf/bcv_extension.hpp"
#include "casurf/mesh_io.hpp"
#include "casurf/report.hpp"
#include "casurf/verification.hpp"
#include "definition.hpp"

namespace casurf::cli {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2 };

struct Tolerances {
  double angle = 1e-6;
  double curvature_extrinsic = 1e-4;
  double curvature_intrinsic = 1e-3;
  double shape = 1e-5;
  double connection = 1e-4;
  double lambda_pde = 1e-4;
  double compatibility = 1e-3;
  double closed_form = 1e-6;

  static Tolerances uniform(double t) { return {t, t, t, t, t, t, t, t}; }
  /// Spline-interpolated grids only resolve derivatives to O(h^2).
  static Tolerances for_grid_file() { return uniform(1e-2); }
};

// ---------------------------------------------------------------------------
// Output helpers.

inline void print_report(std::ostream& os, const std::string& title, const CheckReport& r) {
  fmt::print(os, "{}\n", title);
  fmt::print(os, "  {:<28} {:>12} {:>10} {:>8}  {}\n", "check", "max residual", "tolerance",
             "samples", "result");
  for (const CheckEntry& c : r.checks()) {
    fmt::print(os, "  {:<28} {:>12.3e} {:>10.1e} {:>8}  {}\n", c.name, c.max_residual, c.tolerance,
               c.samples, c.pass ? "PASS" : "FAIL");
  }
  fmt::print(os, "overall: {}\n", r.pass() ? "PASS" : "FAIL");
  for (const std::string& name : r.failing()) fmt::print(os, "failed: {}\n", name);
}

inline void write_report_file(const std::string& path, const CheckReport& r) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GeometryError(ErrorKind::kPrecondition, "cannot write report to '" + path + "'");
  r.write_key_value(out);
}

inline void write_surface(const std::string& path, const std::string& format,
                          const SampledSurface& s, std::ostream& fallback) {
  auto emit = [&](std::ostream& os) {
    if (format == "obj") {
      write_obj(os, s);
    } else if (format == "csv") {
      write_csv(os, s);
    } else {
      throw GeometryError(ErrorKind::kInvalidSpec, "format must be csv or obj");
    }
  };
  if (path.empty() || path == "-") {
    emit(fallback);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GeometryError(ErrorKind::kPrecondition, "cannot write '" + path + "'");
  emit(out);
  if (!out) throw GeometryError(ErrorKind::kPrecondition, "write to '" + path + "' failed");
}

inline void note_steps(CheckReport& r, const FdSteps& s) {
  r.note("fd.tangent", s.tangent);
  r.note("fd.field", s.field);
  r.note("fd.codazzi", s.codazzi);
  r.note("fd.brioschi", s.brioschi);
}

inline std::string branch_name(ConstantAngleBranch b) {
  switch (b) {
    case ConstantAngleBranch::kLeaf: return "leaf";
    case ConstantAngleBranch::kGeneric: return "generic";
    case ConstantAngleBranch::kHopfCylinder: return "hopf_cylinder";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// verify-ambient

struct VerifyAmbientOptions {
  double kappa = 0.0;
  double tau = 0.5;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::string report;
};

inline CheckReport verify_ambient_report(const VerifyAmbientOptions& o) {
  const AmbientParams params{o.kappa, o.tau};
  const AmbientCheck c = verify_ambient(params, o.samples, o.seed);
  auto tol = [&](double t) { return o.tol.value_or(t); };
  CheckReport r;
  r.note("command", "verify-ambient");
  r.note("kappa", o.kappa);
  r.note("tau", o.tau);
  r.note("samples", std::to_string(o.samples));
  r.note("seed", std::to_string(o.seed));
  r.add("orthonormality", c.orthonormality, tol(1e-12), c.samples);
  r.add("commutator", c.commutator, tol(1e-6), c.samples);
  r.add("connection", c.connection, tol(1e-6), c.samples);
  r.add("curvature", c.curvature, tol(1e-4), c.samples);
  if (c.constant_curvature) {
    r.note("constant_sectional_curvature", c.constant_curvature_value);
    r.add("constant_sectional_curvature", *c.constant_curvature, tol(1e-4), c.samples);
  }
  return r;
}

inline int cmd_verify_ambient(const VerifyAmbientOptions& o, std::ostream& out) {
  const CheckReport r = verify_ambient_report(o);
  print_report(out, fmt::format("verify-ambient kappa={} tau={}", o.kappa, o.tau), r);
  write_report_file(o.report, r);
  return r.pass() ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// Surface checks shared by check and integrate.

struct SurfaceCheckOptions {
  std::optional<double> tol;
  /// Interior check points per parameter direction; 0 picks 3 for closed
  /// forms and 2 for integrated or interpolated surfaces.
  std::size_t points_per_side = 0;
  std::uint64_t seed = 1;
};

/// Tangent planes with |F_u x F_v| / (|F_u| |F_v|) below this are skipped.
inline constexpr double kMinConditioning = 0.05;

inline bool well_conditioned(const Immersion& imm, double u, double v) {
  try {
    return immersion_conditioning(imm, u, v) >= kMinConditioning;
  } catch (const GeometryError& e) {
    if (e.kind() == ErrorKind::kImmersionFailure) return false;
    throw;
  }
}

/// Cell centers of a per_side x per_side subdivision of the domain.
inline std::vector<ParamPoint> interior_points(const GridSpec& g, std::size_t per_side) {
  std::vector<ParamPoint> out;
  const double n = static_cast<double>(per_side);
  for (std::size_t b = 0; b < per_side; ++b) {
    for (std::size_t a = 0; a < per_side; ++a) {
      const double fu = (static_cast<double>(a) + 0.5) / n;
      const double fv = (static_cast<double>(b) + 0.5) / n;
      out.push_back({g.domain.u0 + fu * (g.domain.u1 - g.domain.u0),
                     g.domain.v0 + fv * (g.domain.v1 - g.domain.v0)});
    }
  }
  return out;
}

inline void run_surface_checks(const SurfaceDefinition& def, const BuiltSurface& b,
                               const SurfaceCheckOptions& o, CheckReport& r) {
  Tolerances tol = b.from_grid ? Tolerances::for_grid_file() : Tolerances{};
  if (o.tol) tol = Tolerances::uniform(*o.tol);
  const GridSpec& g = b.samples.grid;
  const Immersion& imm = b.immersion;
  const bool expensive = b.from_grid || def.family == "bcv_integrated";
  const std::size_t per_side = o.points_per_side ? o.points_per_side : (expensive ? 2 : 3);

  r.note("family", def.family);
  r.note("kappa", imm.params().kappa);
  r.note("tau", imm.params().tau);
  if (b.theta) r.note("theta", *b.theta);
  if (def.perturb != 0.0) r.note("perturb", def.perturb);
  r.note("grid", fmt::format("{}x{}", g.nu, g.nv));
  r.note("domain", fmt::format("{}:{},{}:{}", format_double(g.domain.u0), format_double(g.domain.u1),
                               format_double(g.domain.v0), format_double(g.domain.v1)));
  r.note("seed", std::to_string(o.seed));
  note_steps(r, imm.steps());

  // Angle at every node, away from the border of interpolated grids.
  const std::size_t border = b.from_grid ? 2 : 0;
  std::optional<double> reference = b.theta;
  double angle = 0.0;
  std::size_t nodes = 0, skipped = 0;
  for (std::size_t j = border; j + border < g.nv; ++j) {
    for (std::size_t i = border; i + border < g.nu; ++i) {
      if (!well_conditioned(imm, g.u(i), g.v(j))) {
        ++skipped;
        continue;
      }
      const double t = angle_and_projections(imm, g.u(i), g.v(j)).theta;
      if (!reference) reference = t;
      angle = std::max(angle, std::abs(t - *reference));
      ++nodes;
    }
  }
  r.note("skipped_nodes", std::to_string(skipped));
  if (nodes == 0) throw GeometryError(ErrorKind::kImmersionFailure, "no well-conditioned grid node");
  r.add("angle_constancy", angle, tol.angle, nodes);

  std::vector<ParamPoint> pts;
  for (const ParamPoint& p : interior_points(g, per_side)) {
    if (well_conditioned(imm, p.u, p.v)) pts.push_back(p);
  }
  if (pts.empty()) throw GeometryError(ErrorKind::kImmersionFailure, "no well-conditioned check point");
  const ConstantAngleReport rep = lemma4_residuals(imm, pts);
  r.note("branch", branch_name(rep.branch));
  r.note("measured_theta", rep.theta);
  const double ct = std::cos(rep.theta);
  r.note("expected_K", (imm.params().kappa - 4.0 * imm.params().tau * imm.params().tau) * ct * ct);
  r.add("curvature_extrinsic", rep.curvature_extrinsic, tol.curvature_extrinsic, pts.size());
  r.add("curvature_intrinsic", rep.curvature_intrinsic, tol.curvature_intrinsic, pts.size());
  if (!std::isnan(rep.shape_s11)) {
    r.add("shape_s11", rep.shape_s11, tol.shape, pts.size());
    r.add("shape_s12", rep.shape_s12, tol.shape, pts.size());
    r.add("connection_table", rep.connection, tol.connection, pts.size());
    r.add("lambda_pde", rep.lambda_pde, tol.lambda_pde, pts.size());
  }
  double compat = 0.0;
  for (const ParamPoint& p : pts) compat = std::max(compat, compatibility_residuals(imm, p.u, p.v).max());
  r.add("compatibility", compat, tol.compatibility, pts.size());
  if (b.closed_form_distance) {
    r.add("closed_form_match", *b.closed_form_distance, tol.closed_form, g.size());
  }
}

// ---------------------------------------------------------------------------
// generate, check, integrate

struct OutputOptions {
  std::string out;
  std::string format = "csv";
};

inline int cmd_generate(const SurfaceDefinition& def, const OutputOptions& o, std::ostream& out) {
  const BuiltSurface b = build_surface(def);
  const bool to_stdout = o.out.empty() || o.out == "-";
  write_surface(o.out, o.format, b.samples, out);
  if (!to_stdout) {
    fmt::print(out, "wrote {} vertices ({}x{} grid, {}) to {}\n", b.samples.points.size(),
               b.samples.grid.nu, b.samples.grid.nv, o.format, o.out);
  }
  return kExitPass;
}

inline int cmd_check(const SurfaceDefinition& def, const SurfaceCheckOptions& o,
                     const std::string& report, std::ostream& out) {
  const BuiltSurface b = build_surface(def);
  CheckReport r;
  r.note("command", "check");
  run_surface_checks(def, b, o, r);
  print_report(out, fmt::format("check {}", def.family), r);
  write_report_file(report, r);
  return r.pass() ? kExitPass : kExitFail;
}

inline int cmd_integrate(SurfaceDefinition def, const SurfaceCheckOptions& o,
                         const OutputOptions& io, const std::string& report, std::ostream& out) {
  def.family = "bcv_integrated";
  require_solved_branch(def.ambient.kappa, def.ambient.tau, def.theta);
  const BuiltSurface b = build_surface(def);
  CheckReport r;
  r.note("command", "integrate");
  r.note("step", def.step);
  run_surface_checks(def, b, o, r);
  print_report(out, fmt::format("integrate kappa={} tau={} theta={}", def.ambient.kappa,
                                def.ambient.tau, format_double(def.theta)),
               r);
  write_report_file(report, r);
  if (!io.out.empty()) {
    write_surface(io.out, io.format, b.samples, out);
    fmt::print(out, "wrote {} vertices to {}\n", b.samples.points.size(), io.out);
  }
  return r.pass() ? kExitPass : kExitFail;
}

}  // namespace casurf::cli
