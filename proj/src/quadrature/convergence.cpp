#include "mindlen/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mindlen {

namespace {

constexpr int kInfiniteProbes = 160;  // p_k = L 2^k
constexpr int kFiniteProbes = 80;     // delta_k = a 2^-k
constexpr int kFitWindow = 32;
constexpr int kMinFit = 8;
constexpr double kMargin = 0.05;
constexpr double kWindowTol = 1e-3;
constexpr double kFlatWindows = 1e-9;
constexpr double kWindowDrift = 0.02;  // relative change of the log-ratio across the fit
constexpr double kLogMargin = 0.1;
constexpr double kSuperPolynomial = 40.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class Stop { None, ReciprocalVanished, ReciprocalOverflow };

std::string format_p(quad p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(p));
  return buf;
}

// 1/f at p, or a stop reason when it leaves the extended range.
Stop probe_reciprocal(const DeformationFunction& f, quad p, quad& r) {
  const auto v = f.evaluate(p);
  if (v.status == expr::EvalStatus::Overflow && v.value > 0) return Stop::ReciprocalVanished;
  if (!v.ok())
    throw InvalidDeformation("f fails (" + std::string(expr::describe(v.status)) +
                             ") at p = " + format_p(p) +
                             " inside the detected domain; supply an explicit domain");
  if (!(v.value > 0)) {
    if (v.value == 0 && v.underflow) return Stop::ReciprocalOverflow;
    throw InvalidDeformation("f is not positive at p = " + format_p(p));
  }
  r = 1 / v.value;
  if (isinfq(r)) return Stop::ReciprocalOverflow;
  if (r == 0) return Stop::ReciprocalVanished;
  return Stop::None;
}

struct Position {
  const DeformationFunction& f;
  bool infinite;
  quad b;
  quad point(quad x) const { return infinite ? x : b - x; }
};

std::optional<Classification> finite_if(bool finite, bool divergent) {
  if (finite) return Classification::Finite;
  if (divergent) return Classification::Divergent;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Classification c) {
  return c == Classification::Finite ? "finite" : "divergent";
}

std::string EndpointDiagnostics::summary() const {
  char buf[400];
  const char* where = at_infinity ? "p -> inf" : "p -> a";
  const char* name = at_infinity ? "sigma" : "tau";
  auto v = [](const std::optional<Classification>& c) {
    return c ? std::string(to_string(*c)) : std::string("inconclusive");
  };
  std::snprintf(buf, sizeof buf,
                "%s: %s; %s = %.6g (spread %.2g) -> %s; window log-ratio %.6g (spread %.2g, "
                "log exponent %.4g) -> %s; verdict %s",
                where, method.c_str(), name, exponent + 0.0, exponent_spread,
                v(exponent_verdict).c_str(), window_log_ratio, window_spread, log_exponent,
                v(window_verdict).c_str(), v(verdict).c_str());
  return buf;
}

AmbiguousClassification::AmbiguousClassification(EndpointDiagnostics evidence)
    : std::runtime_error("cannot decide whether int_0^a dp/f converges (" + evidence.summary() +
                         "); rerun with --assume finite or --assume divergent"),
      evidence_(std::move(evidence)) {}

quad reciprocal(const DeformationFunction& f, quad p) {
  quad r = 0;
  switch (probe_reciprocal(f, fabsq(p), r)) {
    case Stop::None: return r;
    case Stop::ReciprocalVanished: return 0;
    case Stop::ReciprocalOverflow: break;
  }
  throw InvalidDeformation("1/f overflows at p = " + format_p(p));
}

EndpointDiagnostics analyze_endpoint(const DeformationFunction& f) {
  EndpointDiagnostics d;
  d.at_infinity = !f.bounded();
  const Position pos{f, d.at_infinity, f.boundary()};
  // the sign turning log-slopes into sigma (a = inf) or tau (finite a)
  const double orient = d.at_infinity ? -1.0 : 1.0;
  const int count = d.at_infinity ? kInfiniteProbes : kFiniteProbes;
  const quad base = d.at_infinity ? quad(f.scale()) : f.boundary();

  std::vector<quad> xs, logs;
  Stop stop = Stop::None;
  for (int k = d.at_infinity ? 0 : 1; k <= count; ++k) {
    const quad x = d.at_infinity ? base * ldexpq(1, k) : base * ldexpq(1, -k);
    quad r = 0;
    stop = probe_reciprocal(f, pos.point(x), r);
    if (stop != Stop::None) break;
    xs.push_back(x);
    logs.push_back(logq(r));
  }
  for (const quad x : xs) d.probes.push_back(static_cast<double>(x));
  for (std::size_t k = 0; k + 1 < logs.size(); ++k)
    d.local_exponents.push_back(orient * static_cast<double>(logs[k + 1] - logs[k]) / M_LN2);

  // integrable side: sigma > 1 at infinity, tau < 1 at a finite end
  auto integrable = [&](double e) { return d.at_infinity ? e > 1.0 : e < 1.0; };
  d.exponent = kNaN;
  d.exponent_spread = kNaN;
  d.window_log_ratio = kNaN;
  d.window_spread = kNaN;
  d.log_exponent = kNaN;

  // super-polynomial behaviour short-circuits the power-law tests
  const auto& e = d.local_exponents;
  const std::size_t n = e.size();
  if (stop != Stop::None) {
    d.method = stop == Stop::ReciprocalVanished ? "super-polynomial decay"
                                                 : "super-polynomial growth";
    d.verdict = stop == Stop::ReciprocalVanished ? Classification::Finite
                                                 : Classification::Divergent;
    if (n) d.exponent = e.back();
    return d;
  }
  if (n >= 3 && std::fabs(e[n - 1]) > kSuperPolynomial &&
      std::fabs(e[n - 1]) > std::fabs(e[n - 2]) && std::fabs(e[n - 2]) > std::fabs(e[n - 3]) &&
      (e[n - 1] > 0) == (e[n - 2] > 0)) {
    const bool decay = integrable(e[n - 1]);
    d.method = decay ? "super-polynomial decay" : "super-polynomial growth";
    d.verdict = decay ? Classification::Finite : Classification::Divergent;
    d.exponent = e.back();
    return d;
  }

  d.method = "power-law";
  if (n < kMinFit) return d;
  const std::size_t m = std::min<std::size_t>(kFitWindow, n);

  // log-log least squares over the last m + 1 probes; abscissa k ln 2
  {
    const std::size_t first = logs.size() - (m + 1);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const quad y0 = logs[first];
    for (std::size_t j = 0; j <= m; ++j) {
      const double x = j * M_LN2;
      const double y = static_cast<double>(logs[first + j] - y0);
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double cnt = m + 1.0;
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    d.exponent = orient * slope;
    double spread = 0;
    for (std::size_t k = n - m; k < n; ++k) spread = std::max(spread, std::fabs(e[k] - d.exponent));
    d.exponent_spread = spread;
    if (spread <= kMargin && std::fabs(d.exponent - 1.0) > kMargin)
      d.exponent_verdict = integrable(d.exponent) ? Classification::Finite
                                                  : Classification::Divergent;
  }

  // window integrals over consecutive probe intervals, taken in ln x
  {
    std::vector<quad> log_windows;
    const std::size_t first = xs.size() - (m + 1);
    try {
      for (std::size_t k = first; k + 1 < xs.size(); ++k) {
        const quad s0 = logq(xs[k]), s1 = logq(xs[k + 1]);
        const quad w = quadrature::gauss_legendre(
            [&](quad s) {
              const quad x = expq(s);
              return x * reciprocal(f, pos.point(x));
            },
            std::min(s0, s1), std::max(s0, s1), 20);
        if (!(w > 0)) throw InvalidDeformation("empty window");
        log_windows.push_back(logq(w));
      }
    } catch (const InvalidDeformation&) {
      log_windows.clear();
    }
    if (log_windows.size() >= 2) {
      std::vector<double> rho;
      for (std::size_t k = 0; k + 1 < log_windows.size(); ++k)
        rho.push_back(static_cast<double>(log_windows[k + 1] - log_windows[k]));
      double mean = 0;
      for (double r : rho) mean += r;
      mean /= rho.size();
      double spread = 0;
      for (double r : rho) spread = std::max(spread, std::fabs(r - mean));
      d.window_log_ratio = mean;
      d.window_spread = spread;
      const std::size_t half = rho.size() / 2;
      double early = 0, late = 0;
      for (std::size_t k = 0; k < half; ++k) early += rho[k] / half;
      for (std::size_t k = rho.size() - half; k < rho.size(); ++k) late += rho[k] / half;
      const bool steady = half == 0 || std::fabs(late - early) <= kWindowDrift * std::fabs(mean);
      if (spread <= kWindowTol) {
        // windows shrinking geometrically: finite; constant or growing: divergent
        const bool flat = std::fabs(mean) <= kFlatWindows;
        d.window_verdict =
            finite_if(mean < -kWindowTol && steady, flat || mean > kWindowTol);
      }
      if (mean < 0 && !steady && std::fabs(late) < std::fabs(early)) {
        // ratio drifting to zero: fit w ~ t^-q against t = |ln x| at the window centres
        std::vector<double> q;
        for (std::size_t k = 0; k + 1 < rho.size(); ++k) {
          const double t0 = std::fabs(static_cast<double>(logq(xs[first + k]) + logq(xs[first + k + 1]))) / 2;
          const double t1 = std::fabs(static_cast<double>(logq(xs[first + k + 1]) + logq(xs[first + k + 2]))) / 2;
          if (!(t0 > 0 && t1 > t0)) {
            q.clear();
            break;
          }
          q.push_back(-rho[k] / std::log(t1 / t0));
        }
        if (q.size() >= 2) {
          double qm = 0;
          for (double v : q) qm += v / q.size();
          double qs = 0;
          for (double v : q) qs = std::max(qs, std::fabs(v - qm));
          d.log_exponent = qm;
          if (qs <= kLogMargin && std::fabs(qm - 1) > kLogMargin)
            d.window_verdict = qm > 1 ? Classification::Finite : Classification::Divergent;
          else
            d.window_verdict.reset();
        }
      }
    }
  }

  if (d.exponent_verdict && d.window_verdict) {
    if (*d.exponent_verdict == *d.window_verdict) d.verdict = d.exponent_verdict;
  } else if (d.exponent_verdict) {
    d.verdict = d.exponent_verdict;
  } else {
    d.verdict = d.window_verdict;
  }
  return d;
}

Classification classify_endpoint(const DeformationFunction& f, EndpointDiagnostics* evidence) {
  EndpointDiagnostics d = analyze_endpoint(f);
  if (!d.verdict) throw AmbiguousClassification(std::move(d));
  const Classification c = *d.verdict;
  if (evidence) *evidence = std::move(d);
  return c;
}

quadrature::Integral integrate_segment(const DeformationFunction& f, quad lo, quad hi,
                                       double rel_tol) {
  quadrature::Options opt;
  opt.rel_tol = rel_tol;
  return quadrature::tanh_sinh([&](quad p) { return reciprocal(f, p); }, lo, hi, opt);
}

namespace {

struct Remainder {
  double value = 0.0;
  double error = 0.0;
};

// int dp/f beyond x1 (distance to a finite end, or p itself at infinity) from
// the local model ln rho = A - c t - q ln t in t = |ln x|, rho = x / f, fitted
// at x1, x1 s, x1 s^2 with s = 1/2 (finite end) or 2 (infinity). Power laws
// give q = 0; logarithmic factors give the q that a power law cannot carry.
// Infinite when the model is not integrable.
std::optional<Remainder> model_remainder(const DeformationFunction& f, const Position& pos,
                                         quad x1) {
  const quad step = pos.infinite ? quad(2) : quad(0.5);
  quad t[4], L[4];
  int have = 0;
  for (quad x = x1; have < 4; x *= step, ++have) {
    quad r = 0;
    if (probe_reciprocal(f, pos.point(x), r) != Stop::None) break;
    t[have] = fabsq(logq(x));
    L[have] = logq(x * r);
  }
  if (have < 3) return std::nullopt;
  if (!(t[0] > 4) || !(t[1] > t[0])) {
    // no usable log scale: pure power law from the first two probes
    const quad c = -(L[1] - L[0]) / (t[1] - t[0]);
    if (!(c > 0)) return Remainder{num::infinity, 0.0};
    const double v = static_cast<double>(expq(L[0]) / c);
    const double drift = static_cast<double>(fabsq((L[2] - L[1]) / (t[2] - t[1]) + c) / c);
    return Remainder{v, v * drift};
  }
  // solve L_i = A - c t_i - q ln t_i from the first three probes
  const quad l0 = logq(t[0]), l1 = logq(t[1]), l2 = logq(t[2]);
  const quad d1 = (L[1] - L[0]) / (t[1] - t[0]), d2 = (L[2] - L[1]) / (t[2] - t[1]);
  const quad e1 = (l1 - l0) / (t[1] - t[0]), e2 = (l2 - l1) / (t[2] - t[1]);
  quad q = -(d2 - d1) / (e2 - e1);
  quad c = -d1 - q * e1;
  // rounding-level slopes belong to the exact power-law or log cases
  if (fabsq(q) < 1e-20q) q = 0;
  if (fabsq(c) < 1e-20q) c = 0;
  if (c < 0 || (c == 0 && !(q > 1))) return Remainder{num::infinity, 0.0};
  quadrature::Options opt;
  opt.rel_tol = 1e-14;
  const quad T = t[0];
  auto model = [&](quad u) { return expq(-c * u - q * logq(1 + u / T)); };
  const auto tail = quadrature::exp_sinh(model, 0, opt);
  const double v = static_cast<double>(expq(L[0])) * tail.value;
  double err = std::fabs(v) * tail.abs_error / std::max(tail.value, 1e-300);
  if (have == 4) {
    const quad predicted = L[0] - c * (t[3] - T) - q * (logq(t[3]) - l0);
    err += std::fabs(v) * std::min(1.0, static_cast<double>(fabsq(L[3] - predicted)));
  }
  return Remainder{v, err};
}

}  // namespace

quadrature::Integral integrate_to_endpoint(const DeformationFunction& f, quad lo,
                                           double rel_tol) {
  quadrature::Options opt;
  opt.rel_tol = rel_tol;
  auto r = [&](quad p) { return reciprocal(f, p); };
  if (!f.bounded()) {
    auto out = quadrature::exp_sinh(r, lo, opt);
    // largest octave 2^k, three octaves inside the range where f still evaluates
    const quad start = std::max(lo, quad(f.scale()));
    int k_ok = static_cast<int>(std::ceil(static_cast<double>(log2q(start))));
    int k_bad = static_cast<int>(std::floor(static_cast<double>(log2q(start + quadrature::exp_sinh_reach()))));
    quad probe = 0;
    if (probe_reciprocal(f, ldexpq(1, k_ok), probe) != Stop::None) return out;
    if (probe_reciprocal(f, ldexpq(1, k_bad), probe) == Stop::None) ++k_bad;
    while (k_bad - k_ok > 1) {
      const int mid = k_ok + (k_bad - k_ok) / 2;
      (probe_reciprocal(f, ldexpq(1, mid), probe) == Stop::None ? k_ok : k_bad) = mid;
    }
    const quad top = ldexpq(1, k_ok - 3);
    if (!(top > 2 * start)) return out;
    quad r_top = 0;
    if (probe_reciprocal(f, top, r_top) != Stop::None) return out;
    // only slowly decaying 1/f leaves mass beyond the evaluable range
    if (static_cast<double>(top * r_top) * 1e4 <= 1e-17 * std::fabs(out.value)) return out;

    const Position pos{f, true, 0};
    const auto rem = model_remainder(f, pos, top);
    if (!rem) return out;
    if (!std::isfinite(rem->value)) {
      out.value = num::infinity;
      out.converged = false;
      return out;
    }
    // redo the resolved part without the cliff where f stops evaluating
    auto near = quadrature::tanh_sinh(r, lo, start * 2, opt);
    auto far = quadrature::tanh_sinh(
        [&](quad s) {
          const quad p = expq(s);
          return p * reciprocal(f, p);
        },
        logq(start * 2), logq(top), opt);
    out.value = near.value + far.value + rem->value;
    out.abs_error = near.abs_error + far.abs_error + rem->error;
    out.levels = std::max(near.levels, far.levels);
    out.evaluations = near.evaluations + far.evaluations;
    out.converged = near.converged && far.converged;
    return out;
  }

  // below the cut, distances to the boundary are no longer resolved by
  // evaluating f at b - delta; the remainder is taken from the local model
  const quad b = f.boundary();
  // floor keeps b - cut / 8 distinct from b in extended precision
  const quad cut = std::min(std::max(std::min(b * ldexpq(1, -kFiniteProbes), (b - lo) * ldexpq(1, -40)),
                                     b * ldexpq(1, -100)),
                            (b - lo) / 2);
  auto out = quadrature::tanh_sinh(r, lo, b - cut, opt);
  const Position pos{f, false, b};
  const auto rem = model_remainder(f, pos, cut);
  if (!rem) return out;
  if (!std::isfinite(rem->value)) {
    out.value = num::infinity;
    out.converged = false;
    return out;
  }
  out.value += rem->value;
  out.abs_error += rem->error;
  return out;
}

ConvergenceReport integrate_reciprocal(const DeformationFunction& f,
                                       const IntegrationOptions& options) {
  ConvergenceReport report;
  if (options.assume == Assumption::None) {
    report.endpoint_diagnostics = analyze_endpoint(f);
    if (!report.endpoint_diagnostics.verdict)
      throw AmbiguousClassification(report.endpoint_diagnostics);
    report.classification = *report.endpoint_diagnostics.verdict;
  } else {
    report.assumed = true;
    report.endpoint_diagnostics.at_infinity = !f.bounded();
    report.endpoint_diagnostics.method = "assumed";
    report.endpoint_diagnostics.exponent = kNaN;
    report.endpoint_diagnostics.exponent_spread = kNaN;
    report.endpoint_diagnostics.window_log_ratio = kNaN;
    report.endpoint_diagnostics.window_spread = kNaN;
    report.endpoint_diagnostics.log_exponent = kNaN;
    report.classification = options.assume == Assumption::Finite ? Classification::Finite
                                                                 : Classification::Divergent;
    report.endpoint_diagnostics.verdict = report.classification;
  }
  if (report.classification == Classification::Divergent) return report;

  const auto integral = integrate_to_endpoint(f, 0, options.rel_tol);
  if (!std::isfinite(integral.value) || !(integral.value > 0))
    throw IntegrationFailure("quadrature of int_0^a dp/f did not produce a finite value");
  report.value = integral.value;
  report.abs_error_estimate = integral.abs_error;
  report.levels = integral.levels;
  report.evaluations = integral.evaluations;
  report.converged = integral.converged;
  return report;
}

}  // namespace mindlen
