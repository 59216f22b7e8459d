#include "mindlen/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mindlen {

namespace {

using expr::EvalStatus;

// f is usable at p: positive (possibly underflowed) or overflowing upward.
template <class T>
bool admissible(const expr::Program& prog, T p) {
  const auto r = prog.run(p);
  if (r.status == EvalStatus::Overflow) return r.value > T(0);
  if (!r.ok()) return false;
  return r.value > T(0) || (r.value == T(0) && r.underflow);
}

// Shrinks [lo, hi] (lo admissible, hi not) to adjacent representable values.
template <class T>
std::pair<T, T> bisect_boundary(const expr::Program& prog, T lo, T hi) {
  for (int it = 0; it < 400; ++it) {
    const T mid = lo + (hi - lo) / 2;
    if (!(mid > lo && mid < hi)) break;
    if (admissible(prog, mid))
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

double value_or_huge(const expr::Program& prog, double p) {
  const auto r = prog.run(p);
  if (r.status == EvalStatus::Overflow) return r.value;
  return r.ok() ? r.value : std::nan("");
}

// Golden-section minimum of f on [lo, hi]; returns (argmin, min).
std::pair<double, double> golden_minimum(const expr::Program& prog, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = value_or_huge(prog, c), fd = value_or_huge(prog, d);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = value_or_huge(prog, c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = value_or_huge(prog, d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

struct Boundary {
  double a = num::infinity;
  double invalid_side = num::infinity;
  bool touching = false;  // f reaches zero without changing sign
};

Boundary locate_boundary(const expr::Program& prog, double scan_limit) {
  auto f0 = prog.run(0.0);
  if (!admissible(prog, 0.0) || f0.status == EvalStatus::Overflow)
    throw InvalidDeformation("deformation function must be positive and finite at p = 0");
  const double base = f0.value;

  std::vector<double> probes;
  for (int k = -160;; ++k) {
    const double p = std::pow(2.0, k / 4.0);
    if (p >= scan_limit) break;
    probes.push_back(p);
  }
  probes.push_back(scan_limit);

  double prev_p = 0.0;
  double before = base, last = base;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const double p = probes[k];
    if (!admissible(prog, p)) {
      const auto [lo, hi] = bisect_boundary(prog, prev_p, p);
      return {lo, hi, false};
    }
    const double v = value_or_huge(prog, p);
    // a touching zero (e.g. (1-p^2)^2) leaves every probe positive; catch it
    // as a local minimum that collapses onto zero
    if (k >= 2 && last < before && last < v && last > 0 && last < 1e-3 * base) {
      const auto [pm, fm] = golden_minimum(prog, probes[k - 2], p);
      if (!(fm > 1e-12 * base)) {
        // step back onto the strictly positive side of the touching point
        double lo = probes[k - 2], hi = pm;
        if (value_or_huge(prog, hi) > 0) return {hi, std::nextafter(hi, num::infinity), true};
        for (int it = 0; it < 200; ++it) {
          const double mid = lo + (hi - lo) / 2;
          if (!(mid > lo && mid < hi)) break;
          (value_or_huge(prog, mid) > 0 ? lo : hi) = mid;
        }
        return {lo, hi, true};
      }
    }
    before = last;
    last = v;
    prev_p = p;
  }
  return {};
}

double find_scale(const expr::Program& prog, double limit) {
  const double base = prog.run(0.0).value;
  auto departed = [&](double p) {
    const auto r = prog.run(p);
    if (r.status == EvalStatus::Overflow) return true;
    if (!r.ok() || !(r.value > 0)) return true;
    return std::fabs(std::log(r.value / base)) >= std::log(2.0);
  };
  double prev = 0.0;
  for (int k = -80; k <= 80; ++k) {
    const double p = std::pow(2.0, k / 4.0);
    if (p >= limit) break;
    if (departed(p)) {
      double lo = prev, hi = p;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (departed(mid) ? hi : lo) = mid;
      }
      return std::clamp(0.5 * (lo + hi), 1e-6, 1e6);
    }
    prev = p;
  }
  return std::isfinite(limit) ? std::clamp(limit, 1e-6, 1e6) : 1.0;
}

}  // namespace

DeformationFunction::DeformationFunction(expr::Expression e, expr::ParameterMap params,
                                         expr::Program prog)
    : expression_(std::move(e)), params_(std::move(params)), program_(std::move(prog)) {}

DeformationFunction DeformationFunction::create(expr::Expression expression,
                                                expr::ParameterMap params,
                                                const DomainOptions& options) {
  auto prog = expr::Program::compile(expression, params);
  DeformationFunction f(std::move(expression), std::move(params), std::move(prog));

  if (!admissible(f.program_, 0.0))
    throw InvalidDeformation("deformation function must be positive and finite at p = 0");

  if (options.half_width) {
    const double a = *options.half_width;
    if (!(a > 0)) throw InvalidDeformation("domain half-width must be positive");
    f.half_width_ = a;
    f.boundary_ = a;
    f.user_domain_ = true;
    // a supplied root such as 1/l can lie an ulp outside the true one; pull
    // the boundary back onto the admissible side
    if (std::isfinite(a)) {
      const quad qa = a;
      for (int k = 1; k <= 90; ++k) {
        const quad p = qa - qa * ldexpq(1, -k);
        if (admissible(f.program_, p)) continue;
        if (k < 40) {
          std::ostringstream os;
          os << "deformation function is not admissible at p = " << static_cast<double>(p)
             << " inside the supplied domain";
          throw InvalidDeformation(os.str());
        }
        quad lo = qa - qa * ldexpq(1, -39);
        f.boundary_ = bisect_boundary(f.program_, lo, p).first;
        break;
      }
    }
  } else {
    const Boundary b = locate_boundary(f.program_, options.scan_limit);
    f.half_width_ = b.a;
    if (std::isfinite(b.a) && b.touching) {
      f.boundary_ = b.a;
    } else if (std::isfinite(b.a)) {
      // re-resolve the boundary in extended precision; the double bracket can
      // straddle the extended-precision root by a rounding error
      quad lo = b.a, hi = b.invalid_side;
      if (!std::isfinite(b.invalid_side) || hi <= lo) hi = lo * (1 + quad(1e-12));
      for (int it = 0; it < 64 && lo > 0 && !admissible(f.program_, lo); ++it)
        lo *= (1 - quad(1e-12));
      for (int it = 0; it < 64 && admissible(f.program_, hi); ++it) hi *= (1 + quad(1e-12));
      f.boundary_ = bisect_boundary(f.program_, lo, hi).first;
    } else {
      f.boundary_ = 0;
    }
  }
  f.scale_ = find_scale(f.program_, f.half_width_);
  return f;
}

DeformationFunction DeformationFunction::create(std::string_view source, expr::ParameterMap params,
                                                const DomainOptions& options) {
  return create(expr::Expression::parse(source), std::move(params), options);
}

double DeformationFunction::operator()(double p) const {
  const auto r = program_.run(p);
  if (!r.ok())
    throw expr::EvaluationError(std::string(expr::describe(r.status)) + " evaluating f at p = " +
                                    std::to_string(p),
                                r.status);
  return r.value;
}

double detect_domain(const expr::Expression& f, const expr::ParameterMap& params,
                     double scan_limit) {
  const auto prog = expr::Program::compile(f, params);
  return locate_boundary(prog, scan_limit).a;
}

std::string_view describe(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::NotPositive: return "not positive";
    case ViolationKind::NotEven: return "not even";
    case ViolationKind::EvaluationFailure: return "evaluation failure";
  }
  return "?";
}

ValidationReport validate(const DeformationFunction& f, int samples) {
  ValidationReport report;
  report.samples = samples;
  const double a = f.half_width();
  const double scale = f.scale();
  auto record = [&](double p, ViolationKind kind, std::string detail) {
    ++report.violation_count;
    if (report.violations.size() < static_cast<std::size_t>(ValidationReport::kMaxListed))
      report.violations.push_back({p, kind, std::move(detail)});
  };

  for (int j = 1; j <= samples; ++j) {
    const double t = 0.5 * (1.0 - std::cos((2.0 * j - 1.0) * M_PI / (2.0 * samples)));
    const double p = f.bounded() ? a * t : scale * t / (1.0 - t);
    const auto plus = f.evaluate(p);
    const auto minus = f.evaluate(-p);
    if (!plus.ok() && plus.status != EvalStatus::Overflow) {
      record(p, ViolationKind::EvaluationFailure, std::string(expr::describe(plus.status)));
      continue;
    }
    if (!(plus.value > 0) && !(plus.value == 0 && plus.underflow)) {
      std::ostringstream os;
      os << "f(" << p << ") = " << plus.value;
      record(p, ViolationKind::NotPositive, os.str());
      continue;
    }
    if (plus.status == EvalStatus::Overflow && minus.status == EvalStatus::Overflow) continue;
    if (!minus.ok()) {
      record(p, ViolationKind::NotEven,
             "f(-p) failed: " + std::string(expr::describe(minus.status)));
      continue;
    }
    if (std::fabs(plus.value - minus.value) > 1e-10 * (1.0 + std::fabs(plus.value))) {
      std::ostringstream os;
      os.precision(17);
      os << "f(" << p << ") = " << plus.value << ", f(" << -p << ") = " << minus.value;
      record(p, ViolationKind::NotEven, os.str());
    }
  }
  return report;
}

void require_valid(const DeformationFunction& f, int samples) {
  const auto report = validate(f, samples);
  if (report.ok()) return;
  std::ostringstream os;
  os << "deformation function '" << f.expression().source() << "' failed validation ("
     << report.violation_count << " violation(s))";
  for (std::size_t i = 0; i < std::min<std::size_t>(3, report.violations.size()); ++i) {
    const auto& v = report.violations[i];
    os << "; " << describe(v.kind) << " at p = " << v.p << ": " << v.detail;
  }
  throw InvalidDeformation(os.str());
}

}  // namespace mindlen
