#pragma once
#include "choquard/functional.hpp"
#include "choquard/grid.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace choquard {

// Declarative experiment configuration: INI text, one section per
// experiment plus shared [problem] and [grid] sections. Keys are addressed
// as "section.key". Overrides (from the command line) replace file values.
class Config {
public:
  Config() = default;
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& ini);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma separated list, or "geom:lo:hi:count" / "lin:lo:hi:count".
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value);
  // "section.key=value"
  void apply_override(const std::string& assignment);

  // Flattened snapshot, sorted by key.
  const std::map<std::string, std::string>& entries() const { return entries_; }
  std::string to_ini() const;

private:
  std::map<std::string, std::string> entries_;
};

std::vector<double> parse_list(const std::string& text);

// [problem]: N, alpha, p, q, mode, lambda, mu, nu, a, critical (hls|sobolev).
ProblemParams problem_from_config(const Config& cfg, const std::string& section = "problem");
// [grid]: n, r_max, grading.
GridPtr grid_from_config(const Config& cfg, int N, const std::string& section = "grid");

} // namespace choquard
