// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "casurf/bcv_extension.hpp"
#include "casurf/finite_difference.hpp"
#include "casurf/verification.hpp"

namespace {

using namespace casurf;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;
constexpr double kMinConditioning = 0.05;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Tally {
  int failed = 0;

  void line(int n, bool pass, const std::string& detail) {
    fmt::print("criterion {} {}  {}\n", n, pass ? "PASS" : "FAIL", detail);
    std::fflush(stdout);
    if (!pass) ++failed;
  }
};

std::string sci(double x) { return fmt::format("{:.2e}", x); }

std::function<double(double)> constant(double c) {
  return [c](double) { return c; };
}

// ---------------------------------------------------------------------------

void ambient_frames(Tally& t) {
  const Stopwatch sw;
  double ortho = 0, comm = 0, conn = 0, curv = 0;
  int runs = 0;
  for (double tau : {0.0, 0.5, 1.0}) {
    for (double kappa : {0.0, 1.0, -1.0, 4 * tau * tau}) {
      const AmbientCheck c = verify_ambient(AmbientParams{kappa, tau}, 100, 1 + runs);
      ortho = std::max(ortho, c.orthonormality);
      comm = std::max(comm, c.commutator);
      conn = std::max(conn, c.connection);
      curv = std::max(curv, c.curvature);
      ++runs;
    }
  }
  const double secs = sw.seconds();
  const bool pass = ortho < 1e-12 && comm < 1e-6 && conn < 1e-6 && curv < 1e-4 && secs < 10;
  t.line(1, pass,
         fmt::format("{} ambients x 100 points: orthonormality {} commutator {} connection {} "
                     "curvature {} time {:.2f}s",
                     runs, sci(ortho), sci(comm), sci(conn), sci(curv), secs));
}

struct SurfaceStats {
  double angle = 0;
  double k_int = 0;
  double k_ext = 0;
  double s11 = 0;
  double s12 = 0;
  std::size_t points = 0;
};

/// Angle spread over an nu x nv grid and curvature / shape errors at the
/// well-conditioned cell centers of a 6 x 6 grid.
SurfaceStats surface_stats(const Immersion& imm, const ParamDomain& d, double theta, double tau,
                           double k_target, std::size_t n_angle) {
  SurfaceStats s;
  const GridSpec grid{d, n_angle, n_angle};
  for (std::size_t j = 0; j < grid.nv; ++j) {
    for (std::size_t i = 0; i < grid.nu; ++i) {
      s.angle = std::max(s.angle, std::abs(angle_and_projections(imm, grid.u(i), grid.v(j)).theta - theta));
    }
  }
  const std::size_t m = 6;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const double u = d.u0 + (d.u1 - d.u0) * (i + 0.5) / m;
      const double v = d.v0 + (d.v1 - d.v0) * (j + 0.5) / m;
      if (immersion_conditioning(imm, u, v) < kMinConditioning) continue;
      ++s.points;
      s.k_int = std::max(s.k_int, std::abs(gaussian_curvature_intrinsic(imm, u, v) - k_target));
      s.k_ext = std::max(s.k_ext, std::abs(gaussian_curvature_extrinsic(imm, u, v) - k_target));
      const ShapeOperator S = shape_operator(imm, u, v);
      s.s11 = std::max(s.s11, std::abs(S.matrix(0, 0)));
      s.s12 = std::max({s.s12, std::abs(S.matrix(0, 1) + tau), std::abs(S.matrix(1, 0) + tau)});
    }
  }
  return s;
}

void nil3_surfaces(Tally& t) {
  const Stopwatch sw;
  SurfaceStats all;
  const ParamDomain d{0.0, 2 * kPi, -1.0, 1.0};
  for (double theta : {kPi / 6, kPi / 4, kPi / 3}) {
    for (double tau : {0.5, 1.0}) {
      const Immersion imm =
          theorem1_surface(ConstantAngleSpec::from_direction(theta, tau, 0.3, 0.2, -0.1, 0.4));
      const double k = -4 * tau * tau * std::pow(std::cos(theta), 2);
      const SurfaceStats s = surface_stats(imm, d, theta, tau, k, 50);
      all.angle = std::max(all.angle, s.angle);
      all.k_int = std::max(all.k_int, s.k_int);
      all.k_ext = std::max(all.k_ext, s.k_ext);
      all.s11 = std::max(all.s11, s.s11);
      all.s12 = std::max(all.s12, s.s12);
      all.points += s.points;
    }
  }
  const double secs = sw.seconds();
  t.line(2, all.k_int < 1e-3 && all.k_ext < 1e-6 && all.angle < 1e-8 && secs < 30,
         fmt::format("6 surfaces: |K_int - K| {} |K_ext - K| {} ({} points) angle spread {} "
                     "(50x50) time {:.2f}s",
                     sci(all.k_int), sci(all.k_ext), all.points, sci(all.angle), secs));
  t.line(3, all.s11 < 1e-6 && all.s12 < 1e-6,
         fmt::format("6 surfaces: |S11| {} |S12 + tau| {} ({} points)", sci(all.s11),
                     sci(all.s12), all.points));
}

// ---------------------------------------------------------------------------

void closed_forms(Tally& t) {
  const double theta = kPi / 3, tau = 0.5, c = std::cos(theta), s = std::sin(theta);
  const double h = 1e-3;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1, 1);

  double lambda_pde = 0, ab = 0, phi = 0;
  const ProofFields pf{[](double v) { return 0.3 + 0.2 * v; }, 0.1};
  for (int n = 0; n < 100;) {
    const double u = d(rng), v = d(rng);
    if (tan_pole_distance(proof_argument(pf, theta, tau, u, v)) < 0.2) continue;
    ++n;
    const double lam = lambda_closed_form(pf, theta, tau, u, v);
    const double lam_u =
        fd::central5([&](double x) { return lambda_closed_form(pf, theta, tau, x, v); }, u, h);
    lambda_pde = std::max(lambda_pde, std::abs(lam_u + lam * lam * c + 4 * tau * tau * c * c * c));
    const double b = ab_closed_form(pf, theta, tau, u, v).second;
    const double a_u =
        fd::central5([&](double x) { return ab_closed_form(pf, theta, tau, x, v).first; }, u, h);
    const double b_u =
        fd::central5([&](double x) { return ab_closed_form(pf, theta, tau, x, v).second; }, u, h);
    ab = std::max({ab, std::abs(a_u + 2 * tau * b * c), std::abs(b_u - lam * b * c)});
    const double phi_u =
        fd::central5([&](double x) { return phi_closed_form(pf, theta, tau, x); }, u, h);
    phi = std::max(phi, std::abs(phi_u + 2 * tau * c * c));
  }
  for (double kappa : {1.0, 2.0}) {
    const auto varphi = constant(0.3);
    const double r = std::sqrt(r_squared(kappa, tau, theta));
    for (int n = 0; n < 100;) {
      const double u = d(rng), v = d(rng);
      if (tan_pole_distance(varphi(v) - r * c * u) < 0.2) continue;
      ++n;
      const LambdaAB l = bcv_lambda_a_b(kappa, tau, theta, varphi, u, v);
      auto at = [&](double x) { return bcv_lambda_a_b(kappa, tau, theta, varphi, x, v); };
      const double lam_u = fd::central5([&](double x) { return at(x).lambda; }, u, h);
      const double a_u = fd::central5([&](double x) { return at(x).a; }, u, h);
      const double b_u = fd::central5([&](double x) { return at(x).b; }, u, h);
      lambda_pde = std::max(lambda_pde, std::abs(lam_u + l.lambda * l.lambda * c + kappa * c * s * s +
                                                 4 * tau * tau * c * c * c));
      ab = std::max({ab, std::abs(a_u + 2 * tau * l.b * c), std::abs(b_u - l.lambda * l.b * c)});
    }
  }

  auto remark = [&](const RemarkFields& rf, double& u_res, double& identity) {
    const double kappa = 1.0;
    std::mt19937_64 g(12);
    u_res = 0;
    identity = std::abs(remark_identity_defect(rf, kappa, tau, theta, 0.0));
    for (int n = 0; n < 100; ++n) {
      const double u = d(g), v = d(g);
      u_res = std::max(u_res, remark_u_residuals(rf, kappa, tau, theta, u, v).max());
    }
  };
  double u_res = 0, identity = 0;
  remark(RemarkFields::constant(1.0, 0.5, 0.0, 0.0), u_res, identity);
  const bool pass = lambda_pde < 1e-8 && ab < 1e-8 && phi < 1e-8 && u_res < 1e-6 && identity < 1e-12;
  t.line(4, pass,
         fmt::format("lambda PDE {} (a,b) system {} phi system {} | D=1 L=1/2: u-equations {} "
                     "|B^2-A^2 - r^2 cos^2| {}",
                     sci(lambda_pde), sci(ab), sci(phi), sci(u_res), sci(identity)));
  const RemarkFields consistent = RemarkFields::consistent(1.0, tau, theta, 0.5, 0.0, 0.0);
  remark(consistent, u_res, identity);
  fmt::print("            info: with D = {:.6f} (L=1/2): u-equations {} |B^2-A^2 - r^2 cos^2| {}\n",
             consistent.D(0), sci(u_res), sci(identity));
}

// ---------------------------------------------------------------------------

void reconstruction(Tally& t) {
  const Stopwatch sw;
  const ConstantAngleSpec spec = ConstantAngleSpec::from_direction(kPi / 4, 0.5, 0.0);
  const double theta = spec.theta(), tau = spec.tau(), c = 0.0;
  const ParamDomain d{-2.5, 2.5, -1.0, 1.0};
  const GridSpec grid{d, 50, 50};
  const ParamPoint anchor{0.0, 0.0};
  const ProofMatch m = matching_proof_data(spec, c, anchor);
  const IntegratedSurface s =
      integrate_distribution(theta, tau, m.fields, m.start, grid, {1e-3, anchor});
  double err = 0;
  for (std::size_t j = 0; j < grid.nv; ++j) {
    for (std::size_t i = 0; i < grid.nu; ++i) {
      const double ut = theorem_u_from_proof_u(theta, tau, c, grid.u(i));
      err = std::max(err, (s.samples.at(i, j).vec() - theorem1_point(spec, ut, grid.v(j)).vec()).norm());
    }
  }
  const double k = -4 * tau * tau * std::pow(std::cos(theta), 2);
  const SurfaceStats st = surface_stats(s.immersion, d, theta, tau, k, 50);
  const double secs = sw.seconds();
  t.line(5, err < 1e-6 && st.k_int < 1e-3 && st.k_ext < 1e-6 && st.angle < 1e-8 && secs < 30,
         fmt::format("Example: |integrated - closed form| {} (50x50) angle spread {} |K_int - K| {} "
                     "|K_ext - K| {} time {:.2f}s",
                     sci(err), sci(st.angle), sci(st.k_int), sci(st.k_ext), secs));
}

void bcv_integration(Tally& t) {
  const Stopwatch sw;
  const double tau = 0.5, theta = kPi / 3;
  const ParamDomain d{-0.5, 0.5, -0.5, 0.5};
  std::string detail;
  bool pass = true;
  for (double kappa : {1.0, 2.0}) {
    const GridSpec grid{d, 5, 5};
    const BcvIntegratedSurface s =
        integrate_bcv_system(kappa, tau, theta, constant(0.3), BcvState(0.1, -0.2, 0.0, 0.4), grid);
    const double target = (kappa - 4 * tau * tau) * std::pow(std::cos(theta), 2);
    double angle = 0, k_int = 0, k_ext = 0;
    for (std::size_t j = 0; j < grid.nv; ++j) {
      for (std::size_t i = 0; i < grid.nu; ++i) {
        angle = std::max(angle, std::abs(angle_and_projections(s.immersion, grid.u(i), grid.v(j)).theta - theta));
      }
    }
    for (ParamPoint p : {ParamPoint{0.0, 0.0}, ParamPoint{0.2, -0.15}, ParamPoint{-0.25, 0.2}}) {
      k_int = std::max(k_int, std::abs(gaussian_curvature_intrinsic(s.immersion, p.u, p.v) - target));
      k_ext = std::max(k_ext, std::abs(gaussian_curvature_extrinsic(s.immersion, p.u, p.v) - target));
    }
    pass = pass && angle < 1e-5 && k_int < 1e-3 && k_ext < 1e-3;
    detail += fmt::format("kappa={} (K={:.4g}): angle {} |K_int - K| {} |K_ext - K| {} | ", kappa,
                          target, sci(angle), sci(k_int), sci(k_ext));
  }
  const ProofFields pf = ProofFields::constant(0.3, 0.2);
  const GridSpec grid{d, 6, 6};
  const AmbientPoint p0{0.1, -0.2, 0.05};
  const IntegratedSurface a = integrate_distribution(kPi / 4, tau, pf, p0, grid);
  const BcvIntegratedSurface b = integrate_bcv_system(
      0.0, tau, kPi / 4, pf.varphi,
      BcvState(p0.x, p0.y, p0.z, phi_closed_form(pf, kPi / 4, tau, d.u0)), grid);
  double err = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    err = std::max(err, (a.samples.points[k].vec() - b.samples.points[k].vec()).norm());
  }
  pass = pass && err < 1e-6;
  t.line(6, pass, detail + fmt::format("kappa=0 vs Nil3 integrator {} time {:.2f}s", sci(err), sw.seconds()));
}

void compatibility(Tally& t) {
  const Immersion graph(AmbientParams::nil3(0.5), {-1, 1, -1, 1},
                        [](double u, double v) { return AmbientPoint{u, v, u * v}; });
  double clean = 0, perturbed = std::numeric_limits<double>::infinity();
  for (double u : {-0.4, 0.0, 0.4}) {
    for (double v : {-0.4, 0.0, 0.4}) {
      clean = std::max(clean, compatibility_residuals(graph, u, v).max());
      perturbed = std::min(perturbed,
                           compatibility_residuals(graph, u, v, CompatibilityOptions{0.05}).max());
    }
  }
  t.line(7, clean < 1e-3 && perturbed > 1e-3,
         fmt::format("graph (u,v,uv) in Nil3: max residual {} | S + 0.05 Id: min residual {}",
                     sci(clean), sci(perturbed)));
}

// ---------------------------------------------------------------------------

int run(const std::string& args) {
  const std::string cmd = std::string(CASURF_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void cli_contract(Tally& t) {
  const fs::path dir = fs::temp_directory_path() / "casurf_acceptance";
  fs::create_directories(dir);
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  const std::string ra = (dir / "a.txt").string(), rb = (dir / "b.txt").string();
  const int g1 = run("generate --theta pi/4 --tau 0.5 --out " + a);
  const int g2 = run("generate --theta pi/4 --tau 0.5 --out " + b);
  const int c1 = run("check --report " + ra);
  const int c2 = run("check --report " + rb);
  const bool golden = g1 == 0 && g2 == 0 && c1 == 0 && c2 == 0 && !slurp(a).empty() &&
                      slurp(a) == slurp(b) && !slurp(ra).empty() && slurp(ra) == slurp(rb);
  const int pass_code = run("verify-ambient --kappa 0 --tau 0.5 --samples 100");
  const int fail_code = run("check --perturb 0.01");
  const int usage_code = run("verify-ambient --samples 0");
  const bool codes = pass_code == 0 && fail_code == 1 && usage_code == 2;
  t.line(8, golden && codes,
         fmt::format("csv/report byte-identical across runs: {} | exit codes pass/fail/usage: {}/{}/{}",
                     golden ? "yes" : "no", pass_code, fail_code, usage_code));
}

}  // namespace

int main() {
  Tally t;
  try {
    ambient_frames(t);
    nil3_surfaces(t);
    closed_forms(t);
    reconstruction(t);
    bcv_integration(t);
    compatibility(t);
    cli_contract(t);
  } catch (const std::exception& e) {
    fmt::print("error: {}\n", e.what());
    return 2;
  }
  fmt::print("{} of 8 criteria failed\n", t.failed);
  return t.failed == 0 ? 0 : 1;
}
