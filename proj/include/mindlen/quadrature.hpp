#pragma once

// Double-exponential quadrature on [lo, hi] (tanh-sinh) and [lo, inf)
// (exp-sinh). Abscissae are formed in extended precision so that an
// integrand singular at an endpoint is sampled at its true distance from
// that endpoint; integrands take and return `quad`.

#include "mindlen/extended.hpp"

#include <cmath>
#include <vector>

namespace mindlen::quadrature {

struct Integral {
  double value = 0.0;
  double abs_error = 0.0;
  int levels = 0;
  long evaluations = 0;
  bool converged = false;
};

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int min_level = 3;
  int max_level = 12;
};

template <class G>
Integral tanh_sinh(G&& g, quad lo, quad hi, const Options& opt = {}) {
  Integral out;
  if (!(hi > lo)) return out;
  const quad half = (hi - lo) / 2;
  const double half_d = static_cast<double>(half);
  constexpr double t_max = 4.0;

  auto term = [&](double t) -> quad {
    const double u = M_PI_2 * std::sinh(t);
    const double e2 = std::exp(-2.0 * std::fabs(u));
    // 1 - tanh|u|, relative-accurate even where tanh|u| rounds to 1
    const quad dist = half * quad(2.0 * e2 / (1.0 + e2));
    const quad x = u >= 0 ? hi - dist : lo + dist;
    if (!(x > lo && x < hi)) return 0;
    const double w = half_d * M_PI_2 * std::cosh(t) * 4.0 * e2 / ((1.0 + e2) * (1.0 + e2));
    if (w == 0.0) return 0;
    ++out.evaluations;
    return quad(w) * g(x);
  };

  quad sum = 0;
  for (int j = -4; j <= 4; ++j) sum += term(j);
  quad estimate = sum;
  for (int level = 1; level <= opt.max_level; ++level) {
    const double h = std::ldexp(1.0, -level);
    quad fresh = 0;
    for (long j = 1; j * h <= t_max; j += 2) fresh += term(j * h) + term(-j * h);
    sum += fresh;
    const quad next = sum * quad(h);
    const double err = static_cast<double>(fabsq(next - estimate));
    estimate = next;
    out.levels = level;
    out.abs_error = err;
    if (level >= opt.min_level &&
        err <= std::max(opt.rel_tol * std::fabs(static_cast<double>(next)), opt.abs_tol)) {
      out.converged = true;
      break;
    }
  }
  out.value = static_cast<double>(estimate);
  return out;
}

// e^{pi/2 sinh t} spans (1e-80, 1e4900) for t in [-5.2, 9.5]
inline constexpr double kExpSinhTLow = -5.2, kExpSinhTHigh = 9.5;

/// Largest offset x - lo that exp_sinh samples; the integral beyond it is not seen.
inline quad exp_sinh_reach() { return expq(quad(M_PI_2 * std::sinh(kExpSinhTHigh))); }

template <class G>
Integral exp_sinh(G&& g, quad lo, const Options& opt = {}) {
  Integral out;
  constexpr double t_lo_limit = kExpSinhTLow, t_hi_limit = kExpSinhTHigh;

  auto term = [&](double t) -> quad {
    const double u = M_PI_2 * std::sinh(t);
    const quad eu = expq(quad(u));
    const quad x = lo + eu;
    if (!(x > lo) || !finiteq(x)) return 0;
    ++out.evaluations;
    const quad v = g(x);
    if (v == 0) return 0;
    return quad(M_PI_2 * std::cosh(t)) * eu * v;
  };

  // trim the t-range where the integrand has died out, from a scan finer than
  // the first level so that isolated zeros of g cannot cut the range short
  const double negligible = 1e-40, scan_step = 0.25;
  std::vector<quad> scan;
  quad peak = 0;
  for (double t = t_lo_limit; t <= t_hi_limit; t += scan_step) {
    scan.push_back(fabsq(term(t)));
    peak = std::max(peak, scan.back());
  }
  std::size_t first = 0, last = scan.size() - 1;
  while (first < last && scan[first] <= negligible * peak) ++first;
  while (last > first && scan[last] <= negligible * peak) --last;
  const double t_lo = std::max(t_lo_limit, t_lo_limit + scan_step * first - 1.0);
  const double t_hi = std::min(t_hi_limit, t_lo_limit + scan_step * last + 1.0);

  quad sum = 0;
  for (long j = static_cast<long>(std::ceil(t_lo)); j <= static_cast<long>(std::floor(t_hi)); ++j)
    sum += term(j);
  quad estimate = sum;
  for (int level = 1; level <= opt.max_level; ++level) {
    const double h = std::ldexp(1.0, -level);
    quad fresh = 0;
    const long j_lo = static_cast<long>(std::ceil(t_lo / h));
    const long j_hi = static_cast<long>(std::floor(t_hi / h));
    for (long j = j_lo; j <= j_hi; ++j)
      if (j % 2 != 0) fresh += term(j * h);
    sum += fresh;
    const quad next = sum * quad(h);
    const double err = static_cast<double>(fabsq(next - estimate));
    estimate = next;
    out.levels = level;
    out.abs_error = err;
    if (level >= opt.min_level &&
        err <= std::max(opt.rel_tol * std::fabs(static_cast<double>(next)), opt.abs_tol)) {
      out.converged = true;
      break;
    }
  }
  out.value = static_cast<double>(estimate);
  return out;
}

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points; cached, thread-safe.
const GaussRule& gauss_legendre_rule(int n);

template <class G>
quad gauss_legendre(G&& g, quad lo, quad hi, int n = 20) {
  const GaussRule& rule = gauss_legendre_rule(n);
  const quad half = (hi - lo) / 2, mid = lo + half;
  quad sum = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += quad(rule.weights[i]) * g(mid + half * quad(rule.nodes[i]));
  return sum * half;
}

}  // namespace mindlen::quadrature
