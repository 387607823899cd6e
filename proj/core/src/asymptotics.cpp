#include "choquard/asymptotics.hpp"

#include "choquard/constants.hpp"
#include "choquard/error.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/statistics/linear_regression.hpp>

#include <algorithm>
#include <cmath>

namespace choquard {

std::string to_string(MapTag t) {
  switch (t) {
  case MapTag::FrequencyLambda: return "frequency-lambda";
  case MapTag::FrequencyMu: return "frequency-mu";
  case MapTag::AmplitudeLambda: return "amplitude-lambda";
  case MapTag::AmplitudeMu: return "amplitude-mu";
  case MapTag::BubbleNormalized: return "bubble-normalized";
  }
  return "?";
}

MapTag map_tag_from_string(const std::string& s) {
  for (auto t : {MapTag::FrequencyLambda, MapTag::FrequencyMu, MapTag::AmplitudeLambda, MapTag::AmplitudeMu,
                 MapTag::BubbleNormalized})
    if (to_string(t) == s) return t;
  fail(ErrorKind::InvalidConfiguration, "unknown map tag '" + s + "'");
}

namespace {

double rel_diff(double a, double b) {
  const double d = std::max(std::abs(a), std::abs(b));
  return d > 0.0 ? std::abs(a - b) / d : 0.0;
}

} // namespace

RescaleRecord rescale_family(const ProblemParams& prm, const RadialField& v, double coupling, MapTag tag,
                             const GridPtr& target) {
  if (v.empty() || v.is_zero()) fail(ErrorKind::DegenerateField, "rescale of a zero field");
  if (!(coupling > 0.0)) fail(ErrorKind::InvalidParameter, "coupling must be positive");
  const int N = v.grid().dim();
  const double ts = two_star(N);
  RescaleRecord rec;
  rec.tag = tag;
  rec.coupling = coupling;
  double A = 1.0, B = 1.0;
  switch (tag) {
  case MapTag::FrequencyLambda:
    A = std::pow(coupling, 1.0 / (prm.q - 2.0));
    B = std::pow(coupling, (ts - 2.0) / (2.0 * (prm.q - 2.0)));
    break;
  case MapTag::FrequencyMu: {
    const double d = (N - 2) * (prm.p - 1.0) - prm.alpha;
    if (!(d > 0.0)) fail(ErrorKind::InvalidParameter, "frequency-mu map needs (N-2)(p-1) > alpha");
    A = std::pow(coupling, (N - 2) / (2.0 * d));
    B = std::pow(coupling, 1.0 / d);
    break;
  }
  case MapTag::AmplitudeLambda: A = std::pow(coupling, 1.0 / (prm.q - 2.0)); break;
  case MapTag::AmplitudeMu: A = std::pow(coupling, 1.0 / (2.0 * (prm.p - 1.0))); break;
  case MapTag::BubbleNormalized:
    rec.xi = concentration_scale(v);
    A = std::pow(rec.xi, 0.5 * (N - 2));
    B = rec.xi;
    break;
  }
  rec.amplitude = A;
  rec.spatial = B;

  ProblemParams pp = prm;
  pp.N = N;
  rec.before = compute_parts(pp, v);
  const RadialField exact = rescale_field(v, A, 1.0 / B);
  if (target) {
    if (target->dim() != N) fail(ErrorKind::IncompatibleGrid, "target grid dimension differs");
    rec.field = RadialField::from_function(target, [&](double r) { return A * v.at(B * r); });
    const double m_exact = mass(exact);
    rec.mass_loss = m_exact > 0.0 ? std::max(0.0, 1.0 - mass(rec.field) / m_exact) : 0.0;
    if (rec.mass_loss > 1e-8)
      rec.warning = "truncation: mapped support exceeds the target grid, relative mass loss " +
                    std::to_string(rec.mass_loss);
  } else {
    rec.field = exact;
  }
  rec.after = compute_parts(pp, rec.field);

  // K ~ A^2 B^{2-N}, M ~ A^2 B^{-N}, P ~ A^q B^{-N}, R ~ A^{2p} B^{-N-alpha}.
  const auto& b = rec.before;
  const auto& a = rec.after;
  auto add = [&](const char* name, double lhs, double rhs) {
    rec.checks.push_back({name, lhs, rhs, rel_diff(lhs, rhs)});
  };
  add("gradient", a.K, A * A * std::pow(B, 2.0 - N) * b.K);
  add("mass", a.M, A * A * std::pow(B, -N) * b.M);
  add("power", a.P, std::pow(A, prm.q) * std::pow(B, -N) * b.P);
  add("riesz", a.R, std::pow(A, 2.0 * prm.p) * std::pow(B, -N - prm.alpha) * b.R);
  for (const auto& c : rec.checks) rec.max_ledger_defect = std::max(rec.max_ledger_defect, c.rel);
  return rec;
}

double concentration_scale(const RadialField& w) {
  if (w.empty() || !(w[0] > 0.0)) fail(ErrorKind::DegenerateField, "concentration scale needs w(0) > 0");
  const int N = w.grid().dim();
  return std::pow(talenti_value(N, 0.0) / w[0], 2.0 / (N - 2));
}

ConcentrationInfo concentration_info(const RadialField& w) {
  ConcentrationInfo c;
  c.xi = concentration_scale(w);
  // Half-maximum radius well inside the domain.
  const double half = 0.5 * w[0];
  double r_half = -1.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] < half) {
      r_half = w.grid().node(i);
      break;
    }
  c.concentrating = r_half > 0.0 && r_half < 0.25 * w.grid().r_max();
  return c;
}

KelvinResult kelvin(const RadialField& u, const GridPtr& target) {
  if (u.empty()) fail(ErrorKind::DegenerateField, "kelvin of an empty field");
  const GridPtr g = target ? target : u.grid_ptr();
  const int N = u.grid().dim();
  if (g->dim() != N) fail(ErrorKind::IncompatibleGrid, "target grid dimension differs");
  KelvinResult res;
  res.r_valid_min = 1.0 / u.grid().r_max();
  res.r_valid_max = g->r_max();
  std::size_t inside = 0;
  for (double r : g->nodes())
    if (r >= res.r_valid_min && r <= res.r_valid_max) ++inside;
  if (res.r_valid_min >= res.r_valid_max || inside < 8)
    fail(ErrorKind::InsufficientOverlap, "target grid barely overlaps the image of the source domain");
  res.field = RadialField::from_function(g, [&](double r) {
    if (r <= 0.0) return 0.0;
    return std::pow(r, 2.0 - N) * u.at(1.0 / r);
  });
  return res;
}

bool RateFit::within(double tol) const { return expected && rel_error <= tol; }

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y, std::size_t first,
                     std::size_t last) {
  if (last >= x.size() || last < first + 2) fail(ErrorKind::InsufficientSpan, "fit window needs 3 points");
  std::vector<double> xs(x.begin() + first, x.begin() + last + 1), ys(y.begin() + first, y.begin() + last + 1);
  using boost::math::statistics::simple_ordinary_least_squares_with_R_squared;
  auto [c0, c1, r2] = simple_ordinary_least_squares_with_R_squared(xs, ys);
  LinearFit f;
  f.intercept = c0;
  f.slope = c1;
  f.r2 = r2;
  f.first = first;
  f.last = last;
  const std::size_t n = xs.size();
  double mx = 0.0;
  for (double v : xs) mx += v;
  mx /= n;
  double sxx = 0.0, sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    const double e = ys[i] - (c0 + c1 * xs[i]);
    sse += e * e;
  }
  f.slope_stderr = sxx > 0.0 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
  boost::math::students_t dist(static_cast<double>(n - 2));
  f.slope_ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * f.slope_stderr;
  return f;
}

namespace {

RateFit window_fit(const RadialField& u, double r1, double r2, bool exponential) {
  if (!(r1 > 0.0) || !(r2 > r1) || r2 > u.grid().r_max())
    fail(ErrorKind::InvalidParameter, "fit window must lie inside (0, r_max)");
  if (r2 / r1 < std::sqrt(10.0)) fail(ErrorKind::InsufficientSpan, "fit window spans less than half a decade");
  const int N = u.grid().dim();
  const int m = 64;
  RateFit rf;
  std::vector<double> fx, fy;
  for (int k = 0; k < m; ++k) {
    const double r = r1 * std::pow(r2 / r1, static_cast<double>(k) / (m - 1));
    const double v = u.at(r);
    if (!(v > 0.0)) fail(ErrorKind::DegenerateField, "field not positive on the fit window");
    rf.x.push_back(r);
    rf.y.push_back(v);
    fx.push_back(exponential ? r : std::log(r));
    fy.push_back(exponential ? std::log(v) + (N - 2) * std::log(r) : std::log(v));
  }
  rf.fit = linear_fit(fx, fy, 0, m - 1);
  return rf;
}

} // namespace

RateFit tail_exponent_fit(const RadialField& u, double r1, double r2) { return window_fit(u, r1, r2, false); }

RateFit exponential_tail_fit(const RadialField& u, double r1, double r2) { return window_fit(u, r1, r2, true); }

RateFit rate_fit(const std::vector<double>& coupling, const std::vector<double>& value, std::optional<double> expected,
                 FitScale scale) {
  if (coupling.size() != value.size()) fail(ErrorKind::InvalidParameter, "series length mismatch");
  if (coupling.size() < 4) fail(ErrorKind::InsufficientSpan, "rate fit needs at least 4 samples");
  const auto [lo, hi] = std::minmax_element(coupling.begin(), coupling.end());
  if (!(*lo > 0.0) || std::log10(*hi / *lo) < 1.5 - 1e-12)
    fail(ErrorKind::InsufficientSpan, "rate fit needs samples over at least 1.5 decades");
  std::vector<std::size_t> order(coupling.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return coupling[a] < coupling[b]; });
  RateFit rf;
  rf.scale = scale;
  rf.expected = expected;
  std::vector<double> fx, fy;
  for (auto i : order) {
    rf.x.push_back(coupling[i]);
    rf.y.push_back(value[i]);
    fx.push_back(std::log(coupling[i]));
    if (scale == FitScale::LogLog) {
      if (!(value[i] > 0.0)) fail(ErrorKind::InvalidParameter, "log-log fit needs positive values");
      fy.push_back(std::log(value[i]));
    } else {
      fy.push_back(value[i]);
    }
  }
  const std::size_t n = fx.size();
  rf.fit = linear_fit(fx, fy, 0, n - 1);
  if (rf.fit.r2 < 0.98 && n >= 5) {
    rf.full = rf.fit;
    rf.fit = linear_fit(fx, fy, 1, n - 2);
  }
  if (expected) rf.rel_error = std::abs(rf.fit.slope - *expected) / std::max(std::abs(*expected), 1e-300);
  return rf;
}

} // namespace choquard
