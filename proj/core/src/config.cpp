#include "choquard/config.hpp"

#include "choquard/error.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace choquard {

namespace {

namespace pt = boost::property_tree;

Config from_tree(const pt::ptree& tree) {
  Config c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      c.set(section, body.data());
      continue;
    }
    for (const auto& [key, value] : body) c.set(section + "." + key, value.data());
  }
  return c;
}

template <class T>
T convert(const std::string& key, const std::string& text) {
  try {
    return boost::lexical_cast<T>(boost::trim_copy(text));
  } catch (const boost::bad_lexical_cast&) {
    fail(ErrorKind::InvalidConfiguration, "config key '" + key + "' has malformed value '" + text + "'");
  }
}

} // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file " + path);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::InvalidConfiguration, path + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return from_tree(tree);
}

Config Config::from_string(const std::string& ini) {
  std::istringstream in(ini);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::InvalidConfiguration, e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return from_tree(tree);
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : boost::trim_copy(it->second);
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : convert<double>(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : convert<int>(key, it->second);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string v = boost::to_lower_copy(boost::trim_copy(it->second));
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  fail(ErrorKind::InvalidConfiguration, "config key '" + key + "' is not a boolean");
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return parse_list(it->second);
  } catch (const Error& e) {
    fail(ErrorKind::InvalidConfiguration, "config key '" + key + "': " + e.what());
  }
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    fail(ErrorKind::InvalidConfiguration, "override must look like section.key=value: " + assignment);
  set(boost::trim_copy(assignment.substr(0, eq)), boost::trim_copy(assignment.substr(eq + 1)));
}

std::string Config::to_ini() const {
  pt::ptree tree;
  for (const auto& [k, v] : entries_) tree.put(pt::ptree::path_type(k, '.'), v);
  std::ostringstream os;
  pt::write_ini(os, tree);
  return os.str();
}

std::vector<double> parse_list(const std::string& text) {
  const std::string t = boost::trim_copy(text);
  std::vector<std::string> parts;
  if (boost::starts_with(t, "geom:") || boost::starts_with(t, "lin:")) {
    boost::split(parts, t, boost::is_any_of(":"));
    if (parts.size() != 4) fail(ErrorKind::InvalidConfiguration, "range must be kind:lo:hi:count");
    const double lo = convert<double>("range", parts[1]), hi = convert<double>("range", parts[2]);
    const int n = convert<int>("range", parts[3]);
    if (n < 2) fail(ErrorKind::InvalidConfiguration, "range needs at least two points");
    const bool geom = parts[0] == "geom";
    if (geom && !(lo > 0.0 && hi > 0.0)) fail(ErrorKind::InvalidConfiguration, "geometric range needs positive ends");
    std::vector<double> out;
    for (int k = 0; k < n; ++k) {
      const double s = static_cast<double>(k) / (n - 1);
      out.push_back(geom ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s);
    }
    return out;
  }
  boost::split(parts, t, boost::is_any_of(","), boost::token_compress_on);
  std::vector<double> out;
  for (const auto& s : parts)
    if (!boost::trim_copy(s).empty()) out.push_back(convert<double>("list", s));
  return out;
}

ProblemParams problem_from_config(const Config& cfg, const std::string& s) {
  const int N = cfg.get_int(s + ".N", 3);
  const double alpha = cfg.get_double(s + ".alpha", 1.0);
  const double p = cfg.get_double(s + ".p", 2.0);
  const double q = cfg.get_double(s + ".q", 4.0);
  const Mode mode = mode_from_string(cfg.get_string(s + ".mode", "lambda"));
  const double lambda = cfg.get_double(s + ".lambda", 1.0);
  const double mu = cfg.get_double(s + ".mu", 1.0);
  ProblemParams prm;
  switch (mode) {
  case Mode::Lambda: prm = ProblemParams::lambda_problem(N, alpha, p, q, lambda); break;
  case Mode::Mu: prm = ProblemParams::mu_problem(N, alpha, p, q, mu); break;
  case Mode::General: prm = ProblemParams::general(N, alpha, p, q, mu, lambda); break;
  case Mode::Normalized: {
    const std::string crit = boost::to_lower_copy(cfg.get_string(s + ".critical", "hls"));
    if (crit != "hls" && crit != "sobolev")
      fail(ErrorKind::InvalidConfiguration, s + ".critical must be hls or sobolev");
    const bool hls = crit == "hls";
    prm = ProblemParams::normalized(N, alpha, hls ? q : p, cfg.get_double(s + ".nu", 1.0),
                                    cfg.get_double(s + ".a", 1.0), hls ? CriticalTerm::Hls : CriticalTerm::Sobolev);
    break;
  }
  }
  return prm;
}

GridPtr grid_from_config(const Config& cfg, int N, const std::string& s) {
  return make_grid(N, cfg.get_double(s + ".r_max", 60.0), cfg.get_int(s + ".n", 1000),
                   cfg.get_double(s + ".grading", 2.0));
}

} // namespace choquard
