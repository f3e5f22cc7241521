#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>

#include "commands.hpp"

namespace {

using namespace casurf;
using namespace casurf::cli;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "casurf_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run(const std::string& args) {
  const std::string cmd = std::string(CASURF_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const GeometryError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no GeometryError thrown";
  return ErrorKind::kPrecondition;
}

TEST(Parsing, Angles) {
  EXPECT_DOUBLE_EQ(parse_angle("pi/4"), kPi / 4);
  EXPECT_DOUBLE_EQ(parse_angle(" 2*pi/3 "), 2 * kPi / 3);
  EXPECT_DOUBLE_EQ(parse_angle("-*pi"), -kPi);
  EXPECT_DOUBLE_EQ(parse_angle("0.5"), 0.5);
  EXPECT_EQ(kind_of([] { parse_angle("pie"); }), ErrorKind::kInvalidSpec);
  EXPECT_EQ(kind_of([] { parse_angle("abc"); }), ErrorKind::kInvalidSpec);
}

TEST(Parsing, GridAndDomain) {
  EXPECT_EQ(parse_grid("100x20"), (std::pair<std::size_t, std::size_t>{100, 20}));
  EXPECT_EQ(kind_of([] { parse_grid("1x5"); }), ErrorKind::kPrecondition);
  EXPECT_EQ(kind_of([] { parse_grid("10by5"); }), ErrorKind::kInvalidSpec);
  const ParamDomain d = parse_domain("0:2*pi,-1:1");
  EXPECT_DOUBLE_EQ(d.u1, 2 * kPi);
  EXPECT_DOUBLE_EQ(d.v0, -1.0);
  EXPECT_EQ(kind_of([] { parse_domain("0:1"); }), ErrorKind::kInvalidSpec);
  const Polynomial p = parse_polynomial("1, 2");
  EXPECT_EQ(p.c[0], 1.0);
  EXPECT_EQ(p.c[1], 2.0);
  EXPECT_EQ(p.c[2], 0.0);
}

TEST(Definition, LoadsIniFile) {
  const fs::path p = scratch("example.ini");
  std::ofstream(p) << "; Example surface\n"
                      "[surface]\nfamily = theorem1\n"
                      "[ambient]\nkappa = 0\ntau = 0.5  \n"
                      "# comment\n"
                      "[parameters]\ntheta = pi/4\nalpha = 0\nf2_0 = 0.25\n"
                      "[domain]\nu = 0:2*pi\nv = -1:1\ngrid = 30x7\n";
  const SurfaceDefinition d = load_definition(p.string());
  EXPECT_EQ(d.family, "theorem1");
  EXPECT_EQ(d.ambient.tau, 0.5);
  EXPECT_DOUBLE_EQ(d.theta, kPi / 4);
  EXPECT_EQ(d.f2_0, 0.25);
  const GridSpec g = d.grid();
  EXPECT_EQ(g.nu, 30u);
  EXPECT_EQ(g.nv, 7u);
  EXPECT_DOUBLE_EQ(g.domain.u1, 2 * kPi);
}

TEST(Definition, RejectsBadInput) {
  SurfaceDefinition d;
  d.family = "torus";
  EXPECT_EQ(kind_of([&] { build_surface(d); }), ErrorKind::kInvalidSpec);
  d.family = "theorem1";
  d.f1 = Polynomial{{0, 1, 0}};
  d.f2 = Polynomial{{0, 0, 0}};
  d.f3 = Polynomial{};
  EXPECT_EQ(kind_of([&] { build_surface(d); }), ErrorKind::kInvalidSpec);
  EXPECT_EQ(kind_of([] { load_definition("/nonexistent/def.ini"); }), ErrorKind::kPrecondition);
}

TEST(Export, ObjHasGridVerticesAndTriangles) {
  SurfaceDefinition d;
  const BuiltSurface b = build_surface(d);
  std::ostringstream os;
  write_obj(os, b.samples);
  const std::string s = os.str();
  std::size_t v = 0, f = 0;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) {
    if (line.rfind("v ", 0) == 0) ++v;
    if (line.rfind("f ", 0) == 0) ++f;
  }
  EXPECT_EQ(v, 2000u);
  EXPECT_EQ(f, 2u * 99u * 19u);
  EXPECT_NE(s.find("\nf 1 2 102\nf 1 102 101\n"), std::string::npos);
}

TEST(Export, CsvRoundTripsExactly) {
  SurfaceDefinition d;
  d.resolution = {{5, 4}};
  const BuiltSurface b = build_surface(d);
  std::ostringstream os;
  write_csv(os, b.samples);
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("u,v,x,y,z\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 21);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  std::istringstream is(text);
  const SampledSurface back = read_csv(is, b.samples.params);
  ASSERT_EQ(back.points.size(), b.samples.points.size());
  EXPECT_EQ(back.grid.nu, 5u);
  EXPECT_EQ(back.grid.nv, 4u);
  for (std::size_t k = 0; k < back.points.size(); ++k) {
    EXPECT_EQ(back.points[k].x, b.samples.points[k].x);
    EXPECT_EQ(back.points[k].y, b.samples.points[k].y);
    EXPECT_EQ(back.points[k].z, b.samples.points[k].z);
  }
}

TEST(Export, FormatDoubleIsExact) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(-0.5), "-0.5");
  EXPECT_EQ(format_double(1e-20), "9.9999999999999995e-21");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Commands, VerifyAmbientReportsConstantCurvature) {
  VerifyAmbientOptions o;
  o.kappa = 1.0;
  o.tau = 0.5;
  o.samples = 20;
  const CheckReport r = verify_ambient_report(o);
  EXPECT_TRUE(r.pass());
  ASSERT_EQ(r.checks().size(), 5u);
  EXPECT_EQ(r.checks().back().name, "constant_sectional_curvature");
  bool found = false;
  for (const auto& [k, v] : r.provenance()) {
    if (k == "constant_sectional_curvature") {
      EXPECT_EQ(v, "0.25");
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Commands, CheckExamplePassesAndPerturbedFails) {
  SurfaceDefinition d;
  std::ostringstream out;
  EXPECT_EQ(cmd_check(d, {}, "", out), kExitPass);
  EXPECT_NE(out.str().find("overall: PASS"), std::string::npos);
  d.perturb = 0.01;
  std::ostringstream bad;
  EXPECT_EQ(cmd_check(d, {}, "", bad), kExitFail);
  EXPECT_NE(bad.str().find("failed: angle_constancy"), std::string::npos);
}

TEST(Commands, HopfCylinderReportsItsBranch) {
  SurfaceDefinition d;
  d.family = "hopf_cylinder";
  BuiltSurface b = build_surface(d);
  CheckReport r;
  run_surface_checks(d, b, {}, r);
  EXPECT_TRUE(r.pass());
  bool hopf = false;
  for (const auto& [k, v] : r.provenance()) hopf = hopf || (k == "branch" && v == "hopf_cylinder");
  EXPECT_TRUE(hopf);
}

TEST(Commands, GridFileRoundTrip) {
  SurfaceDefinition d;
  d.domain = ParamDomain{-1.0, 1.0, -1.0, 1.0};
  d.resolution = {{41, 41}};
  const fs::path csv = scratch("grid.csv");
  {
    std::ofstream os(csv, std::ios::binary);
    write_csv(os, build_surface(d).samples);
  }
  SurfaceDefinition g;
  g.family = "grid_file";
  g.path = csv.string();
  std::ostringstream out;
  EXPECT_EQ(cmd_check(g, {}, "", out), kExitPass) << out.str();
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run("verify-ambient --kappa 0 --tau 0.5 --samples 10"), 0);
  EXPECT_EQ(run("verify-ambient --samples 0"), 2);
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("generate --grid 3"), 1);
  EXPECT_EQ(run("generate --theta 0 --tau 0.5"), 1);
  EXPECT_EQ(run("check --perturb 0.01"), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST(Binary, OutputIsDeterministic) {
  const fs::path a = scratch("a.csv"), b = scratch("b.csv");
  const fs::path ra = scratch("a.txt"), rb = scratch("b.txt");
  ASSERT_EQ(run("generate --theta pi/4 --tau 0.5 --out " + a.string()), 0);
  ASSERT_EQ(run("generate --theta pi/4 --tau 0.5 --out " + b.string()), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());
  ASSERT_EQ(run("check --report " + ra.string()), 0);
  ASSERT_EQ(run("check --report " + rb.string()), 0);
  EXPECT_EQ(slurp(ra), slurp(rb));
  EXPECT_NE(slurp(ra).find("overall.pass = true"), std::string::npos);
}

}  // namespace
