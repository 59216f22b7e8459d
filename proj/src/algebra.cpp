#include "mindlen/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mindlen {

namespace {

constexpr double kPanelVariation = 1.05;  // max/min of 1/f on a table panel
constexpr int kPanelOrder = 16;
constexpr double kTableReach = 1e8;       // in units of f.scale(), a = inf
constexpr int kBoundaryOctaves = 40;      // table stops at a (1 - 2^-40)

double recip(const DeformationFunction& f, double p) {
  return static_cast<double>(reciprocal(f, p));
}

quad panel(const DeformationFunction& f, double lo, double hi) {
  return quadrature::gauss_legendre([&](quad x) { return reciprocal(f, x); }, lo, hi,
                                    kPanelOrder);
}

bool smooth_panel(const DeformationFunction& f, double lo, double hi) {
  double mn = num::infinity, mx = 0;
  for (int j = 0; j <= 4; ++j) {
    const double r = recip(f, lo + (hi - lo) * j / 4);
    mn = std::min(mn, r);
    mx = std::max(mx, r);
  }
  return mn > 0 && mx <= kPanelVariation * mn;
}

}  // namespace

std::string_view to_string(MapCase c) {
  return c == MapCase::MappedToFlat ? "flat" : "kempf";
}

MinimalLengthResult minimal_length(const DeformationFunction& f,
                                   const IntegrationOptions& options) {
  MinimalLengthResult out;
  out.integral = integrate_reciprocal(f, options);
  if (out.integral.classification == Classification::Divergent) return out;
  out.l0 = M_PI_2 / *out.integral.value;
  out.beta = out.l0 * out.l0;
  out.map_case = MapCase::MappedToKempf;
  return out;
}

MomentumMap::MomentumMap(DeformationFunction f, MapCase c, std::optional<double> beta,
                         double integral)
    : f_(std::move(f)), case_(c), beta_(beta), integral_(integral) {}

MomentumMap MomentumMap::build(const DeformationFunction& f, const MinimalLengthResult& result) {
  const bool kempf = result.map_case == MapCase::MappedToKempf;
  MomentumMap map(f, result.map_case, result.beta,
                  kempf ? *result.integral.value : num::infinity);

  const double scale = f.scale();
  const bool bounded = f.bounded();
  const double b = bounded ? static_cast<double>(f.boundary()) : num::infinity;
  const double stop_gap = bounded ? f.half_width() * std::ldexp(1.0, -kBoundaryOctaves) : 0.0;
  const double reach = scale * kTableReach;

  std::vector<double> nodes{0.0};
  double p = 0.0, h = 0.05 * std::min(scale, bounded ? b : scale);
  while (true) {
    if (bounded) {
      if (b - p <= stop_gap) break;
      h = std::min(h, (b - p) / 2);
    } else {
      if (p >= reach) break;
      // rapidly decaying 1/f: nothing left to tabulate
      if (kempf && p > scale && p * recip(f, p) <= 1e-20 * map.integral_) break;
    }
    int halvings = 0;
    while (!smooth_panel(f, p, p + h) && halvings++ < 60) h /= 2;
    p += h;
    nodes.push_back(p);
    h *= 1.5;
  }

  std::vector<quad> pieces(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) pieces[i] = panel(f, nodes[i], nodes[i + 1]);

  map.table_.resize(nodes.size());
  quad F = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) F += pieces[i - 1];
    map.table_[i] = {nodes[i], static_cast<double>(F), num::infinity};
  }
  if (kempf) {
    quad C = integrate_to_endpoint(f, nodes.back()).value;
    map.table_.back().C = static_cast<double>(C);
    for (std::size_t i = nodes.size() - 1; i-- > 0;) {
      C += pieces[i];
      map.table_[i].C = static_cast<double>(C);
    }
  }
  return map;
}

std::string MomentumMap::target_g() const {
  if (case_ == MapCase::MappedToFlat) return "1";
  char buf[64];
  std::snprintf(buf, sizeof buf, "1 + %.17g*q^2", *beta_);
  return buf;
}

double MomentumMap::target_deformation(double q) const {
  return case_ == MapCase::MappedToFlat ? 1.0 : 1.0 + *beta_ * q * q;
}

MomentumMap::Split MomentumMap::split(double p) const {
  const auto it = std::upper_bound(table_.begin(), table_.end(), p,
                                   [](double x, const Node& n) { return x < n.p; });
  const Node& n = *(it - 1);
  if (it == table_.end()) {
    if (case_ == MapCase::MappedToKempf) {
      const double C = integrate_to_endpoint(f_, p).value;
      return {integral_ - C, C};
    }
    return {n.F + integrate_segment(f_, n.p, p).value, num::infinity};
  }
  const double partial = static_cast<double>(panel(f_, n.p, p));
  return {n.F + partial, n.C - partial};
}

double MomentumMap::cumulative(double p) const {
  const double s = p < 0 ? -1.0 : 1.0;
  p = std::fabs(p);
  if (!(p < f_.half_width())) throw std::out_of_range("momentum outside (-a, a)");
  if (p >= f_.boundary() && f_.bounded()) return s * integral_;
  return s * split(p).F;
}

double MomentumMap::forward(double p) const {
  const double s = p < 0 ? -1.0 : 1.0;
  p = std::fabs(p);
  if (!(p < f_.half_width())) throw std::out_of_range("momentum outside (-a, a)");
  if (p == 0) return 0.0;
  if (f_.bounded() && p >= f_.boundary()) return s * num::infinity;
  const Split v = split(p);
  if (case_ == MapCase::MappedToFlat) return s * v.F;
  const double rb = std::sqrt(*beta_);
  const double theta = rb * v.F;
  if (theta <= M_PI_4) return s * std::tan(theta) / rb;
  return s / (rb * std::tan(rb * v.C));
}

double MomentumMap::inverse(double q) const {
  const double s = q < 0 ? -1.0 : 1.0;
  q = std::fabs(q);
  if (q == 0) return 0.0;
  if (std::isinf(q)) return s * f_.half_width();
  if (case_ == MapCase::MappedToFlat) return s * solve_for(q, false);
  const double rb = std::sqrt(*beta_);
  const double t = rb * q;
  if (t <= 1.0) return s * solve_for(std::atan(t) / rb, false);
  return s * solve_for(std::atan(1.0 / t) / rb, true);
}

// p in [0, a) with F(p) = target, or C(p) = target when from_end.
double MomentumMap::solve_for(double target, bool from_end) const {
  // residual increasing in p, with derivative 1/f
  auto residual = [&](double p) {
    const Split v = split(p);
    return from_end ? target - v.C : v.F - target;
  };

  std::size_t i = 0;
  if (from_end) {
    while (i + 1 < table_.size() && table_[i + 1].C >= target) ++i;
  } else {
    const auto it = std::upper_bound(table_.begin(), table_.end(), target,
                                     [](double x, const Node& n) { return x < n.F; });
    i = static_cast<std::size_t>(it - table_.begin()) - 1;
  }

  double lo = table_[i].p, hi, guess;
  const bool tail = i + 1 == table_.size();
  if (!tail) {
    hi = table_[i + 1].p;
    const double v0 = from_end ? table_[i].C : table_[i].F;
    const double v1 = from_end ? table_[i + 1].C : table_[i + 1].F;
    const double w = (target - v0) / (v1 - v0);
    guess = lo + std::clamp(w, 0.0, 1.0) * (hi - lo);
  } else if (f_.bounded()) {
    hi = static_cast<double>(f_.boundary());
    guess = lo + (hi - lo) / 2;
  } else {
    hi = std::max(2 * lo, f_.scale());
    while (residual(hi) < 0) {
      lo = hi;
      hi *= 2;
      if (!std::isfinite(hi)) throw std::out_of_range("inverse map target out of range");
    }
    guess = lo + (hi - lo) / 2;
  }

  double p = guess;
  for (int it = 0; it < 200; ++it) {
    const double r = residual(p);
    if (r == 0) return p;
    (r < 0 ? lo : hi) = p;
    double next = p - r / recip(f_, p);
    if (!(next > lo && next < hi)) next = lo + (hi - lo) / 2;
    if (std::fabs(next - p) <= 2e-16 * std::max(std::fabs(p), 1e-300) || next == lo ||
        next == hi) {
      return next;
    }
    p = next;
  }
  return p;
}

NormCheck verify_norm_preservation(const MomentumMap& map,
                                   const std::function<double(double)>& state) {
  const DeformationFunction& f = map.source();
  auto density = [&](double p) {
    const double v = state(p);
    return v * v * recip(f, p);
  };

  // cut where the state's weighted mass has died out
  NormCheck out;
  double peak = 0;
  if (!f.bounded()) {
    int quiet = 0;
    for (int k = -40; k <= 400; ++k) {
      const double p = f.scale() * std::pow(2.0, k / 4.0);
      const double m = density(p) * p;
      peak = std::max(peak, m);
      out.p_cut = p;
      quiet = m <= 1e-30 * peak ? quiet + 1 : 0;
      if (quiet >= 8 && k > 0) break;
    }
  } else {
    const double b = static_cast<double>(f.boundary());
    for (int k = 0; k <= 160; ++k) {
      const double p = b * (1 - std::pow(2.0, -(k + 1) / 4.0));
      peak = std::max(peak, density(p) * std::max(p, b - p));
    }
    int quiet = 0;
    for (int k = 1; k <= 160; ++k) {
      const double d = b * std::pow(2.0, -k / 4.0);
      const double m = density(b - d) * d;
      out.p_cut = b - d;
      quiet = m <= 1e-30 * peak ? quiet + 1 : 0;
      if (quiet >= 8) break;
    }
  }

  quadrature::Options opt;
  opt.rel_tol = 1e-13;
  opt.max_level = 14;
  const double p_cut = out.p_cut;
  auto source = [&](quad p) -> quad { return p < p_cut ? density(static_cast<double>(p)) : 0; };
  out.source_norm =
      2 * (f.bounded() ? quadrature::tanh_sinh(source, 0, p_cut, opt).value
                       : quadrature::exp_sinh(source, 0, opt).value);

  const double q_cut = map.forward(p_cut);
  auto target = [&](quad qq) -> quad {
    const double q = static_cast<double>(qq);
    if (!(q < q_cut)) return 0;
    const double v = state(map.inverse(q));
    return v * v / map.target_deformation(q);
  };
  out.target_norm = 2 * quadrature::exp_sinh(target, 0, opt).value;
  out.deviation = std::fabs(out.source_norm - out.target_norm);
  return out;
}

}  // namespace mindlen
