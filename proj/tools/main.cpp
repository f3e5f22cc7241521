#include <CLI11.hpp>
#include <fmt/core.h>

#include <iostream>
#include <optional>
#include <string>

#include "commands.hpp"

namespace {

using namespace casurf;
using namespace casurf::cli;

/// Surface flags; each one set on the command line overrides the
/// definition file.
struct SurfaceFlags {
  std::string def;
  std::optional<std::string> family;
  std::optional<double> kappa, tau;
  std::optional<std::string> theta, alpha;
  std::optional<double> f1_0, f2_0, f3_0;
  std::optional<std::string> f1, f2, f3;
  std::optional<std::string> curve;
  std::optional<double> radius;
  std::optional<std::string> center;
  std::optional<std::string> varphi, phase, start;
  std::optional<double> step, perturb;
  std::optional<std::string> grid, domain;
  std::optional<std::string> path;

  void attach(CLI::App& app, bool with_family) {
    app.add_option("--def", def, "surface definition file (INI)")->check(CLI::ExistingFile);
    if (with_family) {
      app.add_option("--family", family, "hopf_cylinder | theorem1 | bcv_integrated | grid_file")
          ->check(CLI::IsMember({"hopf_cylinder", "theorem1", "bcv_integrated", "grid_file"}));
    }
    app.add_option("--kappa", kappa, "base curvature kappa");
    app.add_option("--tau", tau, "bundle curvature tau");
    app.add_option("--theta", theta, "constant angle (number or k*pi/n)");
    app.add_option("--alpha", alpha, "direction of (f1', f2')");
    app.add_option("--f1-0", f1_0, "f1(0)");
    app.add_option("--f2-0", f2_0, "f2(0)");
    app.add_option("--f3-0", f3_0, "f3(0)");
    app.add_option("--f1", f1, "f1 coefficients c0,c1");
    app.add_option("--f2", f2, "f2 coefficients c0,c1");
    app.add_option("--f3", f3, "f3 coefficients c0,c1");
    app.add_option("--curve", curve, "Hopf cylinder base curve: circle | line")
        ->check(CLI::IsMember({"circle", "line"}));
    app.add_option("--radius", radius, "circle radius");
    app.add_option("--center", center, "circle center x,y");
    app.add_option("--varphi", varphi, "varphi(v) coefficients c0[,c1[,c2]]");
    app.add_option("--phase", phase, "phase constant c of the normal angle");
    app.add_option("--start", start, "initial point x,y,z[,phi]");
    app.add_option("--step", step, "RK4 step")->check(CLI::PositiveNumber);
    app.add_option("--perturb", perturb, "add eps*sin(u) to the fiber coordinate");
    app.add_option("--grid", grid, "grid resolution NxM");
    app.add_option("--domain", domain, "parameter domain u0:u1,v0:v1");
    app.add_option("--grid-file", path, "CSV grid for the grid_file family");
  }

  SurfaceDefinition resolve() const {
    SurfaceDefinition d = def.empty() ? SurfaceDefinition{} : load_definition(def);
    if (family) d.family = *family;
    if (kappa) d.ambient.kappa = *kappa;
    if (tau) d.ambient.tau = *tau;
    if (theta) d.theta = parse_angle(*theta);
    if (alpha) d.alpha = parse_angle(*alpha);
    if (f1_0) d.f1_0 = *f1_0;
    if (f2_0) d.f2_0 = *f2_0;
    if (f3_0) d.f3_0 = *f3_0;
    if (f1) d.f1 = parse_polynomial(*f1);
    if (f2) d.f2 = parse_polynomial(*f2);
    if (f3) d.f3 = parse_polynomial(*f3);
    if (curve) d.curve = *curve;
    if (radius) d.radius = *radius;
    if (center) d.center = parse_vec2(*center);
    if (varphi) d.varphi = parse_polynomial(*varphi);
    if (phase) d.phase = parse_angle(*phase);
    if (start) d.start = parse_list(*start);
    if (step) d.step = *step;
    if (perturb) d.perturb = *perturb;
    if (grid) d.resolution = parse_grid(*grid);
    if (domain) d.domain = parse_domain(*domain);
    if (path) {
      d.path = *path;
      if (!family && def.empty()) d.family = "grid_file";
    }
    return d;
  }
};

void add_output(CLI::App& app, OutputOptions& o) {
  app.add_option("--out", o.out, "output path (stdout when omitted)");
  app.add_option("--format", o.format, "csv | obj")->check(CLI::IsMember({"csv", "obj"}));
}

void add_checks(CLI::App& app, SurfaceCheckOptions& o, std::string& report) {
  app.add_option("--tol", o.tol, "override every tolerance")->check(CLI::PositiveNumber);
  app.add_option("--samples", o.points_per_side, "interior check points per direction")
      ->check(CLI::Range(std::size_t{1}, std::size_t{50}));
  app.add_option("--seed", o.seed, "recorded in the report");
  app.add_option("--report", report, "key = value report file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constant-angle surfaces in BCV spaces: verification, generation and export"};
  app.require_subcommand(1);

  VerifyAmbientOptions va;
  CLI::App* verify = app.add_subcommand("verify-ambient", "check frame, connection and curvature");
  verify->add_option("--kappa", va.kappa, "base curvature kappa");
  verify->add_option("--tau", va.tau, "bundle curvature tau");
  verify->add_option("--samples", va.samples, "random points")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
  verify->add_option("--seed", va.seed, "random seed");
  verify->add_option("--tol", va.tol, "override every tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--report", va.report, "key = value report file");

  SurfaceFlags gen_flags;
  OutputOptions gen_out;
  CLI::App* generate = app.add_subcommand("generate", "sample a surface and export it");
  gen_flags.attach(*generate, true);
  add_output(*generate, gen_out);

  SurfaceFlags check_flags;
  SurfaceCheckOptions check_opts;
  std::string check_report;
  CLI::App* check = app.add_subcommand("check", "run the invariant checks on a surface");
  check_flags.attach(*check, true);
  add_checks(*check, check_opts, check_report);

  SurfaceFlags int_flags;
  SurfaceCheckOptions int_opts;
  OutputOptions int_out;
  std::string int_report;
  CLI::App* integrate = app.add_subcommand("integrate", "integrate the constant-angle system");
  int_flags.attach(*integrate, false);
  add_checks(*integrate, int_opts, int_report);
  add_output(*integrate, int_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*verify) return cmd_verify_ambient(va, std::cout);
    if (*generate) return cmd_generate(gen_flags.resolve(), gen_out, std::cout);
    if (*check) return cmd_check(check_flags.resolve(), check_opts, check_report, std::cout);
    if (*integrate) {
      return cmd_integrate(int_flags.resolve(), int_opts, int_out, int_report, std::cout);
    }
  } catch (const GeometryError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitFail;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitFail;
  }
  return kExitUsage;
}
