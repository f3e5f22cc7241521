#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace casurf {

/// Shortest-round-trip-safe text for a double: 17 significant digits,
/// independent of the locale.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

struct CheckEntry {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::size_t samples = 0;
};

/// Named residual checks plus the parameters that produced them.
class CheckReport {
 public:
  /// NaN residuals count as failures.
  void add(std::string name, double max_residual, double tolerance, std::size_t samples) {
    const bool pass = max_residual < tolerance;
    checks_.push_back({std::move(name), max_residual, tolerance, pass, samples});
  }
  void add_flag(std::string name, bool pass) {
    checks_.push_back({std::move(name), pass ? 0.0 : 1.0, 0.5, pass, 1});
  }
  void note(std::string key, std::string value) {
    provenance_.emplace_back(std::move(key), std::move(value));
  }
  void note(std::string key, double value) { note(std::move(key), format_double(value)); }

  const std::vector<CheckEntry>& checks() const { return checks_; }
  const std::vector<std::pair<std::string, std::string>>& provenance() const {
    return provenance_;
  }

  bool pass() const {
    for (const CheckEntry& c : checks_) {
      if (!c.pass) return false;
    }
    return true;
  }

  std::vector<std::string> failing() const {
    std::vector<std::string> out;
    for (const CheckEntry& c : checks_) {
      if (!c.pass) out.push_back(c.name);
    }
    return out;
  }

  /// Machine-readable form, one `key = value` per line.
  void write_key_value(std::ostream& os) const {
    os << "overall.pass = " << (pass() ? "true" : "false") << '\n';
    os << "checks.count = " << checks_.size() << '\n';
    for (const auto& [k, v] : provenance_) os << "provenance." << k << " = " << v << '\n';
    for (const CheckEntry& c : checks_) {
      const std::string p = "check." + c.name + ".";
      os << p << "max_residual = " << format_double(c.max_residual) << '\n';
      os << p << "tolerance = " << format_double(c.tolerance) << '\n';
      os << p << "pass = " << (c.pass ? "true" : "false") << '\n';
      os << p << "samples = " << c.samples << '\n';
    }
  }

 private:
  std::vector<CheckEntry> checks_;
  std::vector<std::pair<std::string, std::string>> provenance_;
};

}  // namespace casurf
