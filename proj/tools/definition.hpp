#pragma once

#include <Eigen/Dense>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "casurf/bcv_extension.hpp"
#include "casurf/constant_angle.hpp"
#include "casurf/error.hpp"
#include "casurf/grid.hpp"
#include "casurf/mesh_io.hpp"
#include "casurf/surface.hpp"

namespace casurf::cli {

// ---------------------------------------------------------------------------
// Value parsers. Malformed text raises kInvalidSpec.

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) {
    throw GeometryError(ErrorKind::kInvalidSpec, "'" + text + "' is not a number");
  }
  return x;
}

/// A number, or `[a*]pi[/b]` such as `pi/4` or `2*pi/3`.
inline double parse_angle(const std::string& text) {
  const std::string t = trim(text);
  const auto at = t.find("pi");
  if (at == std::string::npos) return parse_number(t);
  double factor = 1.0, divisor = 1.0;
  std::string head = trim(t.substr(0, at));
  if (!head.empty()) {
    if (head.back() != '*') throw GeometryError(ErrorKind::kInvalidSpec, "bad angle '" + text + "'");
    head.pop_back();
    factor = head == "-" ? -1.0 : parse_number(head);
  }
  const std::string tail = trim(t.substr(at + 2));
  if (!tail.empty()) {
    if (tail.front() != '/') throw GeometryError(ErrorKind::kInvalidSpec, "bad angle '" + text + "'");
    divisor = parse_number(tail.substr(1));
  }
  return factor * std::numbers::pi / divisor;
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string cell;
  while (std::getline(is, cell, ',')) out.push_back(parse_number(cell));
  if (out.empty()) throw GeometryError(ErrorKind::kInvalidSpec, "empty list");
  return out;
}

/// `a:b`
inline std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw GeometryError(ErrorKind::kInvalidSpec, "range '" + text + "' must look like a:b");
  }
  return {parse_angle(text.substr(0, colon)), parse_angle(text.substr(colon + 1))};
}

/// `u0:u1,v0:v1`
inline ParamDomain parse_domain(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw GeometryError(ErrorKind::kInvalidSpec, "domain '" + text + "' must look like u0:u1,v0:v1");
  }
  const auto [u0, u1] = parse_range(text.substr(0, comma));
  const auto [v0, v1] = parse_range(text.substr(comma + 1));
  return {u0, u1, v0, v1};
}

/// `NxM`
inline std::pair<std::size_t, std::size_t> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw GeometryError(ErrorKind::kInvalidSpec, "grid '" + text + "' must look like NxM");
  const double n = parse_number(text.substr(0, x)), m = parse_number(text.substr(x + 1));
  if (n != std::floor(n) || m != std::floor(m) || n < 2 || m < 2) {
    throw GeometryError(ErrorKind::kPrecondition, "grid resolution must be integers >= 2");
  }
  return {static_cast<std::size_t>(n), static_cast<std::size_t>(m)};
}

inline Polynomial parse_polynomial(const std::string& text) {
  const std::vector<double> c = parse_list(text);
  if (c.size() > 3) throw GeometryError(ErrorKind::kInvalidSpec, "polynomial degree above 2");
  Polynomial p;
  for (std::size_t k = 0; k < c.size(); ++k) p.c[k] = c[k];
  return p;
}

inline Eigen::Vector2d parse_vec2(const std::string& text) {
  const std::vector<double> c = parse_list(text);
  if (c.size() != 2) throw GeometryError(ErrorKind::kInvalidSpec, "'" + text + "' must have two entries");
  return {c[0], c[1]};
}

// ---------------------------------------------------------------------------

/// Everything needed to rebuild a surface. Unset optional fields take the
/// family defaults.
struct SurfaceDefinition {
  std::string family = "theorem1";  ///< hopf_cylinder | theorem1 | bcv_integrated | grid_file
  AmbientParams ambient{0.0, 0.5};
  double perturb = 0.0;  ///< eps in F3 + eps sin u

  // theorem1 and the integrated families
  double theta = std::numbers::pi / 4;
  double alpha = 0.0;
  double f1_0 = 0.0, f2_0 = 0.0, f3_0 = 0.0;
  std::optional<Polynomial> f1, f2, f3;

  // hopf_cylinder
  std::string curve = "circle";
  double radius = 1.0;
  Eigen::Vector2d center{0.0, 0.0};
  Eigen::Vector2d origin{0.0, 0.0};
  Eigen::Vector2d direction{1.0, 0.0};

  // bcv_integrated
  Polynomial varphi{{0.3, 0.0, 0.0}};
  double phase = 0.0;
  std::vector<double> start{0.0, 0.0, 0.0};
  double step = 1e-3;

  // grid_file
  std::string path;

  std::optional<ParamDomain> domain;
  std::optional<std::pair<std::size_t, std::size_t>> resolution;

  GridSpec grid() const {
    GridSpec g;
    if (domain) {
      g.domain = *domain;
    } else if (family == "theorem1" || family == "hopf_cylinder") {
      g.domain = {0.0, 2.0 * std::numbers::pi, -1.0, 1.0};
    } else {
      g.domain = {-0.5, 0.5, -0.5, 0.5};
    }
    if (resolution) {
      std::tie(g.nu, g.nv) = *resolution;
    } else if (family == "theorem1" || family == "hopf_cylinder") {
      g.nu = 100;
      g.nv = 20;
    } else {
      g.nu = g.nv = 11;
    }
    g.validate();
    return g;
  }
};

inline SurfaceDefinition load_definition(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw GeometryError(ErrorKind::kPrecondition, "cannot open definition file " + file);
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw GeometryError(ErrorKind::kInvalidSpec, e.what());
  }
  auto get = [&pt](const std::string& key) -> std::optional<std::string> {
    if (auto v = pt.get_optional<std::string>(boost::property_tree::ptree::path_type(key, '.'))) {
      return trim(*v);
    }
    return std::nullopt;
  };
  SurfaceDefinition d;
  if (auto v = get("surface.family")) d.family = *v;
  if (auto v = get("surface.perturb")) d.perturb = parse_number(*v);
  if (auto v = get("ambient.kappa")) d.ambient.kappa = parse_number(*v);
  if (auto v = get("ambient.tau")) d.ambient.tau = parse_number(*v);
  if (auto v = get("parameters.theta")) d.theta = parse_angle(*v);
  if (auto v = get("parameters.alpha")) d.alpha = parse_angle(*v);
  if (auto v = get("parameters.f1_0")) d.f1_0 = parse_number(*v);
  if (auto v = get("parameters.f2_0")) d.f2_0 = parse_number(*v);
  if (auto v = get("parameters.f3_0")) d.f3_0 = parse_number(*v);
  if (auto v = get("parameters.f1")) d.f1 = parse_polynomial(*v);
  if (auto v = get("parameters.f2")) d.f2 = parse_polynomial(*v);
  if (auto v = get("parameters.f3")) d.f3 = parse_polynomial(*v);
  if (auto v = get("parameters.curve")) d.curve = *v;
  if (auto v = get("parameters.radius")) d.radius = parse_number(*v);
  if (auto v = get("parameters.center")) d.center = parse_vec2(*v);
  if (auto v = get("parameters.origin")) d.origin = parse_vec2(*v);
  if (auto v = get("parameters.direction")) d.direction = parse_vec2(*v);
  if (auto v = get("parameters.varphi")) d.varphi = parse_polynomial(*v);
  if (auto v = get("parameters.phase")) d.phase = parse_angle(*v);
  if (auto v = get("parameters.start")) d.start = parse_list(*v);
  if (auto v = get("parameters.step")) d.step = parse_number(*v);
  if (auto v = get("parameters.path")) {
    std::filesystem::path p(*v);
    if (p.is_relative()) p = std::filesystem::path(file).parent_path() / p;
    d.path = p.string();
  }
  const auto u = get("domain.u"), v = get("domain.v");
  if (u || v) {
    if (!u || !v) throw GeometryError(ErrorKind::kInvalidSpec, "[domain] needs both u and v");
    const auto [u0, u1] = parse_range(*u);
    const auto [v0, v1] = parse_range(*v);
    d.domain = ParamDomain{u0, u1, v0, v1};
  }
  if (auto g = get("domain.grid")) d.resolution = parse_grid(*g);
  return d;
}

// ---------------------------------------------------------------------------

/// A surface ready for export and checking.
struct BuiltSurface {
  Immersion immersion;
  SampledSurface samples;
  std::optional<double> theta;  ///< declared constant angle, if any
  /// Integrated Nil3 surfaces with tau > 0 and constant varphi: max node
  /// distance to the matching closed-form surface.
  std::optional<double> closed_form_distance;
  bool from_grid = false;
};

namespace detail {

inline ConstantAngleSpec theorem1_spec(const SurfaceDefinition& d) {
  if (d.f1 || d.f2 || d.f3) {
    if (!(d.f1 && d.f2 && d.f3)) {
      throw GeometryError(ErrorKind::kInvalidSpec, "f1, f2 and f3 must be given together");
    }
    return ConstantAngleSpec::from_polynomials(d.theta, d.ambient.tau, *d.f1, *d.f2, *d.f3);
  }
  return ConstantAngleSpec::from_direction(d.theta, d.ambient.tau, d.alpha, d.f1_0, d.f2_0, d.f3_0);
}

inline std::function<double(double)> as_function(const Polynomial& p) {
  return [p](double v) { return p(v); };
}

}  // namespace detail

inline BuiltSurface build_surface(const SurfaceDefinition& d) {
  const GridSpec grid = d.grid();
  const AmbientParams& params = d.ambient;
  auto finish = [&](Immersion imm, std::optional<double> theta,
                    std::optional<SampledSurface> nodes = std::nullopt) {
    if (d.perturb != 0.0) {
      imm = add_fiber_perturbation(imm, d.perturb);
      nodes.reset();
    }
    SampledSurface s = nodes ? std::move(*nodes) : sample(imm, grid);
    return BuiltSurface{imm, std::move(s), theta, std::nullopt, false};
  };

  if (d.family == "theorem1") {
    if (params.kappa != 0.0) throw GeometryError(ErrorKind::kPrecondition, "theorem1 needs kappa = 0");
    return finish(theorem1_surface(detail::theorem1_spec(d)), d.theta);
  }
  if (d.family == "hopf_cylinder") {
    PlanarCurve c;
    if (d.curve == "circle") {
      if (!(d.radius > 0.0)) throw GeometryError(ErrorKind::kPrecondition, "radius must be positive");
      c = PlanarCurve::circle(d.radius, d.center);
    } else if (d.curve == "line") {
      c = PlanarCurve::line(d.origin, d.direction);
    } else {
      throw GeometryError(ErrorKind::kInvalidSpec, "curve must be circle or line");
    }
    return finish(hopf_cylinder(c, params), std::numbers::pi / 2);
  }
  if (d.family == "bcv_integrated") {
    IntegrationOptions opt;
    opt.step = d.step;
    if (params.kappa == 0.0) {
      if (d.start.size() != 3) {
        throw GeometryError(ErrorKind::kInvalidSpec, "start must be x,y,z for kappa = 0");
      }
      const ProofFields pf{detail::as_function(d.varphi), d.phase};
      const AmbientPoint p0{d.start[0], d.start[1], d.start[2]};
      IntegratedSurface s = integrate_distribution(d.theta, params.tau, pf, p0, grid, opt);
      std::optional<double> dist;
      if (params.tau > 0.0 && d.varphi.degree() == 0) {
        const ParamPoint anchor{grid.domain.u0, grid.domain.v0};
        const ConstantAngleSpec spec =
            spec_from_proof_data(d.theta, params.tau, d.varphi(0.0), d.phase, p0, anchor);
        double m = 0.0;
        for (std::size_t j = 0; j < grid.nv; ++j) {
          for (std::size_t i = 0; i < grid.nu; ++i) {
            const double ut = theorem_u_from_proof_u(d.theta, params.tau, d.phase, grid.u(i));
            m = std::max(m, (s.samples.at(i, j).vec() - theorem1_point(spec, ut, grid.v(j)).vec()).norm());
          }
        }
        dist = m;
      }
      BuiltSurface b = finish(s.immersion, d.theta, s.samples);
      b.closed_form_distance = dist;
      return b;
    }
    if (d.start.size() != 3 && d.start.size() != 4) {
      throw GeometryError(ErrorKind::kInvalidSpec, "start must be F1,F2,F3[,phi]");
    }
    const BcvState y0(d.start[0], d.start[1], d.start[2], d.start.size() == 4 ? d.start[3] : d.phase);
    BcvIntegratedSurface s = integrate_bcv_system(params.kappa, params.tau, d.theta,
                                                  detail::as_function(d.varphi), y0, grid, opt);
    return finish(s.immersion, d.theta, s.samples);
  }
  if (d.family == "grid_file") {
    std::ifstream in(d.path);
    if (!in) throw GeometryError(ErrorKind::kPrecondition, "cannot open grid file '" + d.path + "'");
    SampledSurface s = read_csv(in, params);
    Immersion imm = interpolate(s);
    if (d.perturb != 0.0) imm = add_fiber_perturbation(imm, d.perturb);
    return BuiltSurface{imm, std::move(s), std::nullopt, std::nullopt, true};
  }
  throw GeometryError(ErrorKind::kInvalidSpec, "unknown family '" + d.family + "'");
}

}  // namespace casurf::cli
