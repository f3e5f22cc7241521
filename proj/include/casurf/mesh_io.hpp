/// @file
/// CSV point grids and OBJ triangle meshes for sampled surfaces.
///
/// CSV: header `u,v,x,y,z`, one row per node in grid order (u fastest),
/// 17 significant digits, `\n` line endings.
/// OBJ: one `v` line per node in grid order; each grid cell becomes the
/// triangles (a, b, c) and (a, c, d) with a = (i, j), b = (i+1, j),
/// c = (i+1, j+1), d = (i, j+1). Closed parameter domains are not welded.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "casurf/error.hpp"
#include "casurf/grid.hpp"
#include "casurf/report.hpp"

namespace casurf {

inline void write_csv(std::ostream& os, const SampledSurface& s) {
  os << "u,v,x,y,z\n";
  for (std::size_t j = 0; j < s.grid.nv; ++j) {
    for (std::size_t i = 0; i < s.grid.nu; ++i) {
      const AmbientPoint& p = s.at(i, j);
      os << format_double(s.grid.u(i)) << ',' << format_double(s.grid.v(j)) << ','
         << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.z) << '\n';
    }
  }
}

inline void write_obj(std::ostream& os, const SampledSurface& s) {
  os << "# " << s.grid.nu << " x " << s.grid.nv << " grid\n";
  for (const AmbientPoint& p : s.points) {
    os << "v " << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z)
       << '\n';
  }
  for (std::size_t j = 0; j + 1 < s.grid.nv; ++j) {
    for (std::size_t i = 0; i + 1 < s.grid.nu; ++i) {
      const std::size_t a = s.grid.index(i, j) + 1, b = s.grid.index(i + 1, j) + 1;
      const std::size_t c = s.grid.index(i + 1, j + 1) + 1, d = s.grid.index(i, j + 1) + 1;
      os << "f " << a << ' ' << b << ' ' << c << '\n';
      os << "f " << a << ' ' << c << ' ' << d << '\n';
    }
  }
}

/// Reads a grid written by write_csv. The grid shape is recovered from the
/// (u, v) columns, which must form a uniform u-fastest lattice.
inline SampledSurface read_csv(std::istream& is, const AmbientParams& params) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("u,v,x,y,z", 0) != 0) {
    throw GeometryError(ErrorKind::kPrecondition, "grid file must start with the header u,v,x,y,z");
  }
  std::vector<std::array<double, 5>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    std::array<double, 5> r{};
    std::istringstream ls(line);
    std::string cell;
    for (int k = 0; k < 5; ++k) {
      if (!std::getline(ls, cell, ',')) {
        throw GeometryError(ErrorKind::kPrecondition, "grid file row has fewer than 5 columns");
      }
      try {
        r[k] = std::stod(cell);
      } catch (const std::exception&) {
        throw GeometryError(ErrorKind::kPrecondition, "grid file cell '" + cell + "' is not a number");
      }
    }
    rows.push_back(r);
  }
  std::size_t nu = 0;
  while (nu < rows.size() && rows[nu][1] == rows[0][1]) ++nu;
  if (nu < 2 || rows.size() % nu != 0 || rows.size() / nu < 2) {
    throw GeometryError(ErrorKind::kPrecondition, "grid file does not hold an N x M grid with N, M >= 2");
  }
  GridSpec g;
  g.nu = nu;
  g.nv = rows.size() / nu;
  g.domain = {rows.front()[0], rows[nu - 1][0], rows.front()[1], rows.back()[1]};
  g.validate();
  SampledSurface s{g, params, {}};
  for (std::size_t j = 0; j < g.nv; ++j) {
    for (std::size_t i = 0; i < g.nu; ++i) {
      const auto& r = rows[g.index(i, j)];
      const double tol = 1e-9 * (1.0 + std::abs(r[0]) + std::abs(r[1]));
      if (std::abs(r[0] - g.u(i)) > tol || std::abs(r[1] - g.v(j)) > tol) {
        throw GeometryError(ErrorKind::kPrecondition, "grid file (u, v) columns are not a uniform lattice");
      }
      s.points.push_back({r[2], r[3], r[4]});
    }
  }
  return s;
}

}  // namespace casurf
