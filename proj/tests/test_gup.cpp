#include "doctest.h"

#include "mindlen/gup.hpp"
#include "mindlen/spectral.hpp"
#include "oracles/gamma.hpp"

#include <cmath>
#include <random>

using namespace mindlen;

namespace {

DeformationFunction make(const char* src, expr::ParameterMap params = {}) {
  return DeformationFunction::create(src, std::move(params));
}

double rel(double x, double y) { return std::fabs(x - y) / std::fabs(y); }

const char* const kConvex[] = {"exp(p^2)", "1+p^2", "(1+p^2)^2", "(1+p^2)^1.5",
                               "cosh(p)",  "(1-p^2)^-1", "1+p^2+p^4", "exp(0.3*p^2)*(1+p^2)"};

}  // namespace

TEST_CASE("convexity examples") {
  CHECK(gup::check_convexity(make("exp(p^2)")).convex);
  CHECK(gup::check_convexity(make("(1+p^2)^1.5")).convex);
  const auto non = gup::check_convexity(make("(1+p^2)^0.75"));
  CHECK_FALSE(non.convex);
  CHECK(non.worst_defect < -non.tolerance);
  CHECK(non.samples > 0);
  CHECK(non.s_min < non.s_max);
  for (const char* src : kConvex) {
    INFO(std::string(src));
    CHECK(gup::check_convexity(make(src)).convex);
  }
  CHECK(gup::check_convexity(make("exp(-p^2)")).convex);
  CHECK_FALSE(gup::check_convexity(make("(1+p^2)^0.3")).convex);
  CHECK_FALSE(gup::check_convexity(make("1+p^2-0.5*p^4+0.1*p^6")).convex);
}

TEST_CASE("bound examples") {
  const auto gauss = gup::gup_bound(make("exp(l^2*p^2)", {{"l", 1}}));
  CHECK(rel(gauss.bound, std::sqrt(M_E / 2)) <= 1e-12);
  CHECK(gauss.minimizer == gup::MinimizerKind::Interior);
  // s^2 = 1 / (2 l^2); a quadratic minimum locates s only to about sqrt(eps)
  CHECK(rel(gauss.minimizer_s, 1 / std::sqrt(2.0)) <= 1e-7);
  CHECK(gauss.convexity_verified);

  const auto kempf = gup::gup_bound(make("1+p^2"));
  CHECK(rel(kempf.bound, 1) <= 1e-12);
  CHECK(rel(kempf.minimizer_s, 1) <= 1e-7);

  const auto flat = gup::gup_bound(make("1"));
  CHECK(flat.bound == 0);
  CHECK(flat.minimizer == gup::MinimizerKind::AtInfinity);
  CHECK(std::isinf(flat.minimizer_s));

  const auto square = gup::gup_bound(make("(1+p^2)^2"));
  CHECK(rel(square.bound, 8 / (3 * std::sqrt(3.0))) <= 1e-12);

  const auto pole = gup::gup_bound(make("(1-p^2)^-1"));
  CHECK(rel(pole.bound, 3 * std::sqrt(3.0) / 4) <= 1e-12);
  CHECK(rel(pole.minimizer_s, 1 / std::sqrt(3.0)) <= 1e-7);
}

TEST_CASE("bounds with a convexity failure are flagged") {
  const auto b = gup::gup_bound(make("(1+p^2)^0.75"));
  CHECK_FALSE(b.convexity_verified);
  CHECK(b.bound >= 0);
}

TEST_CASE("comparison with the exact minimal length") {
  const auto gauss = gup::compare(make("exp(p^2)"));
  CHECK(rel(gauss.ratio, std::sqrt(M_E / 2) / std::sqrt(M_PI)) <= 1e-12);
  CHECK(gauss.ratio == doctest::Approx(0.657745).epsilon(1e-6));
  CHECK(rel(gup::compare(make("1+p^2")).ratio, 1) <= 1e-12);
  const auto square = gup::compare(make("(1+p^2)^2"));
  const double l0 = oracle::power_plus_l0(2.0);
  CHECK(rel(l0, 2) <= 1e-13);
  CHECK(rel(square.l0_exact, l0) <= 1e-12);
  CHECK(rel(square.ratio, 8 / (3 * std::sqrt(3.0)) / 2) <= 1e-12);
  CHECK(square.ratio < 1);
  CHECK_THROWS_AS(gup::compare(make("1")), gup::PreconditionError);
  CHECK_THROWS_AS(gup::compare(make("(1+p^2)^0.75")), gup::PreconditionError);
}

TEST_CASE("bound never exceeds l0 for convex deformations") {
  for (const char* src : kConvex) {
    const auto c = gup::compare(make(src));
    INFO(std::string(src), " bound=", c.gup_bound, " l0=", c.l0_exact);
    CHECK(c.gup_bound <= c.l0_exact + 1e-9);
    CHECK(c.ratio > 0);
  }
}

TEST_CASE("bound does not depend on the scan grid") {
  for (const char* src : {"exp(p^2)", "1+p^2", "(1+p^2)^2", "(1-p^2)^-1", "1"}) {
    gup::BoundOptions coarse, fine;
    coarse.scan_points = 241;
    fine.scan_points = 333;
    const auto a = gup::gup_bound(make(src), coarse);
    const auto b = gup::gup_bound(make(src), fine);
    INFO(std::string(src));
    CHECK(a.minimizer == b.minimizer);
    if (a.bound == 0) {
      CHECK(b.bound == 0);
    } else {
      CHECK(rel(a.bound, b.bound) <= 1e-12);
    }
  }
}

TEST_CASE("Jensen inequality on random grid states") {
  for (const char* src : {"exp(p^2)", "(1+p^2)^2", "cosh(p)"}) {
    const auto f = make(src);
    const auto grid = spectral::make_grid(
        f, spectral::default_grid(f, 512, integrate_reciprocal(f).value, 1e-9));
    const auto fop = spectral::multiplication_operator("f", [&](double p) { return f(p); });
    const auto p2 = spectral::multiplication_operator("P^2", [](double p) { return p * p; });
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> width(0.05, 1.5), centre(-1, 1), coef(-1, 1);
    int violations = 0;
    for (int s = 0; s < 200; ++s) {
      const double w = width(rng), c = centre(rng), c1 = coef(rng), c2 = coef(rng);
      std::vector<double> phi(grid.size());
      for (std::size_t i = 0; i < phi.size(); ++i) {
        const double z = (grid.points[i] - c) / w;
        phi[i] = std::exp(-z * z / 2) * (1 + c1 * z + c2 * z * z);
      }
      phi = spectral::normalized(grid, phi);
      const double mean_f = spectral::expectation(grid, phi, fop).real();
      const double mean_p2 = spectral::expectation(grid, phi, p2).real();
      if (mean_f < f(std::sqrt(mean_p2)) * (1 - 1e-12)) ++violations;
    }
    INFO(std::string(src));
    CHECK(violations == 0);
  }
}
