#include "mindlen/gup.hpp"

#include <algorithm>
#include <cmath>

namespace mindlen::gup {

namespace {

constexpr double kConvexTolerance = 1e-10;
constexpr double kScanDecades = 6;  // scan s over scale * 10^-6 .. scale * 10^6

// f at p in [0, a); +inf on overflow.
double value(const DeformationFunction& f, double p) {
  const auto r = f.evaluate(p);
  if (r.status == expr::EvalStatus::Overflow) return num::infinity;
  if (!r.ok()) throw InvalidDeformation("f cannot be evaluated at p = " + std::to_string(p));
  return r.value;
}

double objective(const DeformationFunction& f, double s) { return value(f, s) / (2 * s); }

// Largest s < a kept on the scan; the limit s -> a is taken separately.
double upper_end(const DeformationFunction& f) {
  return f.bounded() ? static_cast<double>(f.boundary()) * (1 - 1e-9)
                     : f.scale() * std::pow(10.0, kScanDecades);
}

struct Point {
  double u;  // ln s
  double g;
};

Point golden(const DeformationFunction& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto at = [&](double u) { return Point{u, objective(f, std::exp(u))}; };
  Point c = at(hi - inv_phi * (hi - lo)), d = at(lo + inv_phi * (hi - lo));
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    if (c.g <= d.g) {
      hi = d.u;
      d = c;
      c = at(hi - inv_phi * (hi - lo));
    } else {
      lo = c.u;
      c = d;
      d = at(lo + inv_phi * (hi - lo));
    }
  }
  return c.g <= d.g ? c : d;
}

// Aitken limit of a decreasing sequence; 0 for a pure geometric decay.
double aitken(double g0, double g1, double g2) {
  const double d1 = g1 - g0, d2 = g2 - g1, dd = d2 - d1;
  if (dd == 0) return g2;
  return std::clamp(g2 - d2 * d2 / dd, 0.0, g2);
}

}  // namespace

std::string_view to_string(MinimizerKind k) {
  switch (k) {
    case MinimizerKind::Interior: return "interior";
    case MinimizerKind::AtInfinity: return "infinity";
    case MinimizerKind::AtBoundary: return "boundary";
  }
  return "?";
}

ConvexityEvidence check_convexity(const DeformationFunction& f, int samples) {
  ConvexityEvidence ev;
  ev.tolerance = kConvexTolerance;
  const double p_lo = f.scale() * 1e-4;
  const double p_hi = f.bounded() ? upper_end(f) : f.scale() * 1e4;
  ev.s_min = p_lo * p_lo;

  std::vector<double> s, F;
  const double step = std::log(p_hi * p_hi / ev.s_min) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const double si = i + 1 == samples ? p_hi * p_hi : ev.s_min * std::exp(step * i);
    const double v = value(f, std::sqrt(si));
    if (!std::isfinite(v)) break;  // F left the double range; sample what is representable
    s.push_back(si);
    F.push_back(v);
  }
  ev.samples = static_cast<int>(s.size());
  ev.s_max = s.empty() ? ev.s_min : s.back();
  ev.convex = true;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double mag = std::max({std::fabs(F[i - 1]), std::fabs(F[i]), std::fabs(F[i + 1])});
    if (mag == 0) continue;
    const double t = (s[i + 1] - s[i]) / (s[i + 1] - s[i - 1]);
    const double defect = (t * F[i - 1] + (1 - t) * F[i + 1] - F[i]) / mag;
    if (defect < ev.worst_defect || i == 1) {
      ev.worst_defect = defect;
      ev.worst_at = s[i];
    }
    if (defect < -kConvexTolerance) ev.convex = false;
  }
  return ev;
}

GupBound gup_bound(const DeformationFunction& f, const BoundOptions& options) {
  GupBound out;
  out.convexity = check_convexity(f, options.convexity_samples);
  out.convexity_verified = out.convexity.convex;

  const double u_lo = std::log(f.scale()) - kScanDecades * M_LN10;
  const double u_hi = std::log(upper_end(f));
  const int n = std::max(options.scan_points, 3);
  std::vector<Point> scan(n);
  for (int i = 0; i < n; ++i) {
    const double u = i + 1 == n ? u_hi : u_lo + (u_hi - u_lo) * i / (n - 1);
    scan[i] = {u, objective(f, std::exp(u))};
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scan.size(); ++i)
    if (scan[i].g < scan[best].g) best = i;

  double lo, hi;
  if (scan[best].g == 0) {
    // f underflows: the infimum zero is approached as s grows
    out.bound = 0;
    out.minimizer = f.bounded() ? MinimizerKind::AtBoundary : MinimizerKind::AtInfinity;
    out.minimizer_s = f.bounded() ? static_cast<double>(f.boundary()) : num::infinity;
    return out;
  }
  if (best == 0) {
    // f(0) > 0 makes the objective blow up as s -> 0; walk down to a bracket
    double u = scan[0].u, g = scan[0].g;
    for (int k = 0; k < 2000; ++k) {
      const double next = objective(f, std::exp(u - 1));
      if (!(next < g)) break;
      u -= 1;
      g = next;
    }
    lo = u - 1;
    hi = u + 1;
  } else if (best + 1 < scan.size()) {
    lo = scan[best - 1].u;
    hi = scan[best + 1].u;
  } else if (f.bounded()) {
    const quad b = f.boundary();
    const auto r = f.evaluate(b);
    const double fb = r.ok() ? static_cast<double>(r.value)
                             : value(f, static_cast<double>(b * (1 - ldexpq(1, -40))));
    out.bound = std::min(scan.back().g, fb / (2 * static_cast<double>(b)));
    out.minimizer_s = static_cast<double>(b);
    out.minimizer = MinimizerKind::AtBoundary;
    return out;
  } else {
    // still decreasing at the top of the scan: follow it by octaves
    double s = std::exp(scan.back().u);
    std::vector<double> g{scan[n - 3].g, scan[n - 2].g, scan.back().g};
    bool turned = false, plateau = false;
    for (int k = 0; k < 2000 && s < 1e300; ++k) {
      const double next = objective(f, 2 * s);
      plateau = next == g.back();
      if (!(next < g.back())) {
        turned = !plateau;
        break;
      }
      s *= 2;
      g.push_back(next);
    }
    if (!turned) {
      const std::size_t m = g.size();
      const double r1 = g[m - 2] / g[m - 3], r2 = g[m - 1] / g[m - 2];
      if (plateau)
        out.bound = g.back();
      else if (std::fabs(r2 - r1) <= 1e-9 * r2 && r2 < 1)
        out.bound = 0;  // geometric decay: the infimum is zero
      else
        out.bound = aitken(g[m - 3], g[m - 2], g[m - 1]);
      out.minimizer_s = num::infinity;
      out.minimizer = MinimizerKind::AtInfinity;
      return out;
    }
    lo = std::log(s / 2);
    hi = std::log(s * 2);
  }
  const Point p = golden(f, lo, hi, options.s_rel_tol);
  out.bound = p.g;
  out.minimizer_s = std::exp(p.u);
  out.minimizer = MinimizerKind::Interior;
  return out;
}

Comparison compare(const DeformationFunction& f, const IntegrationOptions& options) {
  const auto ml = minimal_length(f, options);
  if (ml.map_case != MapCase::MappedToKempf)
    throw PreconditionError("bound comparison needs a nonzero minimal length");
  Comparison c;
  c.detail = gup_bound(f);
  if (!c.detail.convexity_verified)
    throw PreconditionError("bound comparison needs f convex as a function of p^2");
  c.l0_exact = ml.l0;
  c.gup_bound = c.detail.bound;
  c.ratio = c.gup_bound / c.l0_exact;
  return c;
}

}  // namespace mindlen::gup
