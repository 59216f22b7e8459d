// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 on any FAIL.

#include "mindlen/algebra.hpp"
#include "mindlen/convergence.hpp"
#include "mindlen/gup.hpp"
#include "mindlen/spectral.hpp"
#include "oracles/gamma.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace mindlen;

namespace {

DeformationFunction make(const std::string& src, expr::ParameterMap params = {}) {
  auto f = DeformationFunction::create(src, std::move(params));
  require_valid(f);
  return f;
}

double rel(double x, double y) { return std::fabs(x - y) / std::fabs(y); }

struct Criterion {
  bool ok = true;
  std::string worst;  // first failure, or the summary on success
  double metric = 0;  // worst observed error

  void check(bool pass, const std::string& what) {
    if (!pass && ok) {
      ok = false;
      worst = what;
    }
  }
  void track(double err) { metric = std::max(metric, err); }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double spectral_sqrt_lambda(const DeformationFunction& f, const MinimalLengthResult& ml) {
  spectral::VerificationOptions opt;
  opt.intervals = 8192;
  return spectral::verify_minimal_length(f, ml.l0, ml.integral.value, opt).sqrt_lambda;
}

Criterion kempf_benchmark() {
  Criterion c;
  for (double beta : {0.25, 1.0, 4.0}) {
    const auto f = make("1+b*p^2", {{"b", beta}});
    const auto ml = minimal_length(f);
    const double quad_err = rel(ml.l0, std::sqrt(beta));
    const double spec_err = rel(spectral_sqrt_lambda(f, ml), std::sqrt(beta));
    c.track(quad_err);
    c.check(quad_err <= 1e-10, fmt("beta %g: quadrature error %.3g", beta, quad_err));
    c.check(spec_err <= 1e-4, fmt("beta %g: spectral error %.3g", beta, spec_err));
  }
  return c;
}

Criterion gaussian_example() {
  Criterion c;
  for (double l : {0.5, 1.0, 2.0}) {
    const auto f = make("exp(l^2*p^2)", {{"l", l}});
    const auto ml = minimal_length(f);
    const double exact = l * std::sqrt(M_PI);
    const double quad_err = rel(ml.l0, exact);
    const double spec_err = rel(spectral_sqrt_lambda(f, ml), exact);
    c.track(quad_err);
    c.check(quad_err <= 1e-8, fmt("lambda %g: quadrature error %.3g", l, quad_err));
    c.check(spec_err <= 1e-4, fmt("lambda %g: spectral error %.3g", l, spec_err));
  }
  for (double alpha : {0.0, -0.5, -1.0}) {
    const auto ml = minimal_length(make("exp(alpha*l^2*p^2)", {{"alpha", alpha}, {"l", 1.0}}));
    c.check(ml.integral.classification == Classification::Divergent && ml.l0 == 0,
            fmt("alpha %g not divergent", alpha));
  }
  return c;
}

Criterion gaussian_bound() {
  Criterion c;
  for (double l : {0.5, 1.0, 2.0}) {
    const auto cmp = gup::compare(make("exp(l^2*p^2)", {{"l", l}}));
    const double bound_err = rel(cmp.gup_bound, l * std::sqrt(M_E / 2));
    const double ratio_err = rel(cmp.ratio, std::sqrt(M_E / (2 * M_PI)));
    c.track(bound_err);
    c.check(bound_err <= 1e-8, fmt("lambda %g: bound error %.3g", l, bound_err));
    c.check(ratio_err <= 1e-6, fmt("lambda %g: ratio error %.3g", l, ratio_err));
    c.check(cmp.ratio < 1, fmt("lambda %g: ratio %.6g not below 1", l, cmp.ratio));
  }
  return c;
}

Criterion power_plus_sweep() {
  Criterion c;
  for (double alpha : {0.6, 0.75, 1.0, 1.25, 1.5, 2.0}) {
    const auto ml = minimal_length(make("(1+l^2*p^2)^alpha", {{"alpha", alpha}, {"l", 1.0}}));
    const double err = rel(ml.l0, oracle::power_plus_l0(alpha));
    c.track(err);
    c.check(err <= 1e-8, fmt("alpha %g: error %.3g", alpha, err));
  }
  for (double alpha : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    try {
      const auto ml = minimal_length(make("(1+l^2*p^2)^alpha", {{"alpha", alpha}, {"l", 1.0}}));
      c.check(ml.integral.classification == Classification::Divergent && ml.l0 == 0,
              fmt("alpha %g not divergent", alpha));
    } catch (const AmbiguousClassification&) {
      c.check(alpha == 0.5, fmt("alpha %g ambiguous", alpha));
    }
  }
  return c;
}

Criterion power_minus_sweep() {
  Criterion c;
  DomainOptions box;
  box.half_width = 1.0;
  for (double alpha : {-1.0, -0.5, 0.0, 0.25, 0.5, 0.75}) {
    const auto f = DeformationFunction::create("(1-l^2*p^2)^alpha", {{"alpha", alpha}, {"l", 1.0}}, box);
    require_valid(f);
    const auto ml = minimal_length(f);
    const double err = rel(ml.l0, oracle::power_minus_l0(alpha));
    c.track(err);
    c.check(err <= 1e-8, fmt("alpha %g: error %.3g", alpha, err));
  }
  for (double alpha : {1.0, 1.5, 2.0}) {
    const auto ml = minimal_length(make("(1-l^2*p^2)^alpha", {{"alpha", alpha}, {"l", 1.0}}));
    c.check(ml.integral.classification == Classification::Divergent && ml.l0 == 0,
            fmt("alpha %g not divergent", alpha));
  }
  // alpha = 0 is the box |p| < 1 with f = 1
  const auto f = DeformationFunction::create("(1-l^2*p^2)^alpha", {{"alpha", 0.0}, {"l", 1.0}}, box);
  const auto ml = minimal_length(f);
  c.check(rel(ml.l0, M_PI_2) <= 1e-8, fmt("alpha 0: l0 %.15g", ml.l0));
  const auto report = spectral::verify_minimal_length(f, ml.l0, ml.integral.value);
  const double lambda_err = rel(report.lambda_extrapolated, M_PI * M_PI / 4);
  c.check(lambda_err <= 1e-4, fmt("alpha 0: lambda_min error %.3g", lambda_err));
  return c;
}

// c0 + c1 s + ... + cd s^d in s = p^2, optionally exponentiated
std::string random_deformation(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> degree(0, 3);
  std::uniform_real_distribution<double> lead(0.1, 2.0), other(-0.5, 2.0), constant(0.5, 2.0);
  std::bernoulli_distribution exponentiate(0.4);
  const int d = degree(rng);
  const bool ex = d > 0 && exponentiate(rng);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", ex ? 0.0 : constant(rng));
  std::string poly = buf;
  for (int k = 1; k <= d; ++k) {
    std::snprintf(buf, sizeof buf, " + (%.6g)*p^%d", k == d ? lead(rng) : other(rng), 2 * k);
    poly += buf;
  }
  return ex ? "exp(" + poly + ")" : poly;
}

Criterion oracle_equivalence() {
  Criterion c;
  std::mt19937_64 rng(0x6d696e6c656eULL);
  int accepted = 0, finite = 0;
  while (accepted < 25) {
    const std::string src = random_deformation(rng);
    const auto f = DeformationFunction::create(src, {});
    if (!validate(f).ok()) continue;
    ++accepted;
    const auto ml = minimal_length(f);
    const auto report = spectral::verify_minimal_length(f, ml.l0, ml.integral.value);
    if (ml.integral.classification == Classification::Finite) {
      ++finite;
      const double err = rel(report.sqrt_lambda, M_PI_2 / *ml.integral.value);
      c.track(err);
      c.check(err <= 5e-4, src + ": " + fmt("error %.3g", err));
    } else {
      c.check(report.flat && report.passed, src + ": flat sequence fails: " + report.detail);
    }
  }
  c.worst = fmt("%g finite and %g divergent cases", finite, 25 - finite);
  return c;
}

Criterion map_properties() {
  Criterion c;
  std::vector<std::pair<std::string, expr::ParameterMap>> fixtures;
  for (double beta : {0.25, 1.0, 4.0}) fixtures.push_back({"1+b*p^2", {{"b", beta}}});
  for (double l : {0.5, 1.0, 2.0}) fixtures.push_back({"exp(l^2*p^2)", {{"l", l}}});
  for (double alpha : {0.6, 0.75, 1.0, 1.25, 1.5, 2.0})
    fixtures.push_back({"(1+l^2*p^2)^alpha", {{"alpha", alpha}, {"l", 1.0}}});
  for (double alpha : {-1.0, -0.5, 0.0, 0.25, 0.5, 0.75})
    fixtures.push_back({"(1-l^2*p^2)^alpha", {{"alpha", alpha}, {"l", 1.0}}});

  std::mt19937_64 rng(20260301);
  for (const auto& [src, params] : fixtures) {
    DomainOptions opt;
    if (src.rfind("(1-", 0) == 0) opt.half_width = 1.0;
    const auto f = DeformationFunction::create(src, params, opt);
    const auto m = MomentumMap::build(f, minimal_length(f));
    const std::string name = src + fmt(" [%g]", params.begin()->second);
    const double range = f.bounded() ? f.half_width() : 8 * f.scale();
    std::uniform_real_distribution<double> u(-range, range);
    std::vector<double> ps;
    while (ps.size() < 1000) {
      const double p = u(rng);
      if (std::fabs(p) < range) ps.push_back(p);
    }
    std::sort(ps.begin(), ps.end());
    double previous = -HUGE_VAL;
    for (double p : ps) {
      const double q = m.forward(p);
      c.check(q == -m.forward(-p), name + fmt(": not odd at p = %.17g", p));
      c.check(q > previous, name + fmt(": not increasing at p = %.17g", p));
      previous = q;
      const double back = m.inverse(q);
      const double err = std::fabs(back - p) / std::max(std::fabs(p), f.scale());
      c.track(err);
      c.check(err <= 1e-9, name + fmt(": inverse error %.3g at p = %.17g", err, p));
    }
    std::uniform_real_distribution<double> coef(-1, 1), width(0.3, 1.5);
    for (int s = 0; s < 10; ++s) {
      const double c1 = coef(rng), c2 = coef(rng), w = width(rng) * f.scale();
      std::function<double(double)> state;
      if (f.bounded()) {
        const double a = f.half_width();
        state = [=](double p) {
          const double v = 1 - (p / a) * (p / a);
          return v * v * (1 + c1 * p / a + c2 * (p / a) * (p / a));
        };
      } else {
        state = [=](double p) {
          const double z = p / w;
          return std::exp(-z * z / 2) * (1 + c1 * z + c2 * z * z);
        };
      }
      const auto check = verify_norm_preservation(m, state);
      const double dev = check.deviation / check.source_norm;
      c.check(dev <= 1e-7, name + fmt(": norm deviation %.3g", dev));
    }
  }
  return c;
}

Criterion convergence_order() {
  Criterion c;
  DomainOptions box;
  box.half_width = 1.0;
  const auto f = DeformationFunction::create("1", {}, box);
  std::vector<double> errors;
  for (int n : {64, 128, 256, 512}) {
    spectral::GridSpec spec;
    spec.stretch = spectral::Stretch::Uniform;
    spec.intervals = n;
    spec.p_max = 1.0;
    const auto grid = spectral::make_grid(f, spec);
    const double lambda = spectral::lowest_eigenvalue(spectral::build_x_squared(grid), grid).lambda_min;
    errors.push_back(std::fabs(lambda - M_PI * M_PI / 4));
  }
  std::string slopes;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const double slope = std::log2(errors[k] / errors[k + 1]);
    slopes += fmt(k ? ", %.4f" : "%.4f", slope);
    c.check(slope >= 1.8 && slope <= 2.2, fmt("slope %.4f", slope));
  }
  if (c.ok) c.worst = "slopes " + slopes;
  return c;
}

Criterion uncertainty_sanity() {
  Criterion c;
  for (const char* src : {"1", "1+p^2", "exp(p^2)"}) {
    const auto f = make(src);
    spectral::GridSpec spec;
    if (std::string(src) == "1") {
      spec.stretch = spectral::Stretch::Uniform;
      spec.intervals = 1024;
      spec.p_max = 10.0;
    } else {
      spec = spectral::default_grid(f, 1024, integrate_reciprocal(f).value, 1e-9);
    }
    const auto grid = spectral::make_grid(f, spec);
    const auto pen = spectral::build_x_squared(grid);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> coef(-1, 1), width(0.1, 2), centre(-1, 1);
    for (int s = 0; s < 100; ++s) {
      const double w = width(rng), m = centre(rng), c1 = coef(rng), c2 = coef(rng);
      std::vector<double> phi(grid.size());
      for (std::size_t i = 0; i < phi.size(); ++i) {
        const double z = (grid.points[i] - m * f.scale()) / (w * f.scale());
        phi[i] = std::exp(-z * z / 2) * (1 + c1 * z + c2 * z * z);
      }
      phi = spectral::normalized(grid, phi);
      const auto u = spectral::uncertainty_relation(grid, pen, phi);
      const double slack = u.slack / (u.mean_f * u.mean_f / 4);
      c.track(-slack);
      c.check(slack >= -1e-9, std::string(src) + fmt(": state %g slack %.3g", s, slack));
    }
  }
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* title;
    Criterion (*run)();
  };
  const Entry entries[] = {
      {"Kempf benchmark", kempf_benchmark},
      {"Gaussian deformation l0", gaussian_example},
      {"Gaussian convexity bound", gaussian_bound},
      {"(1+p^2)^alpha sweep", power_plus_sweep},
      {"(1-p^2)^alpha sweep", power_minus_sweep},
      {"spectral/quadrature equivalence on random f", oracle_equivalence},
      {"momentum map properties", map_properties},
      {"box convergence order", convergence_order},
      {"uncertainty relation sanity", uncertainty_sanity},
  };
  int failures = 0, index = 0;
  for (const auto& e : entries) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    try {
      c = e.run();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.worst = std::string("exception: ") + ex.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!c.ok) ++failures;
    std::string detail = c.worst;
    if (c.ok && detail.empty()) detail = fmt("worst error %.3g", c.metric);
    std::printf("criterion %d %s: %s (%s; %.1f s)\n", index, c.ok ? "PASS" : "FAIL", e.title,
                detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
