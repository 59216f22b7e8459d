#include "mindlen/spectral.hpp"

#include "mindlen/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>

namespace mindlen::spectral {

namespace {

constexpr double kBisectionTol = 1e-13;
constexpr int kBisectionCap = 400;
constexpr int kInverseSteps = 4;

// Node position for the stretch; `gap` is a - |p| for the tanh stretch.
struct Mapped {
  double p;
  double dp;   // dp/dxi
  double gap;  // tanh stretch only
};

Mapped map_point(Stretch s, double L, double xi) {
  switch (s) {
    case Stretch::Uniform: return {xi, 1.0, 0.0};
    case Stretch::Sinh: return {L * std::sinh(xi), L * std::cosh(xi), 0.0};
    case Stretch::Tanh: {
      const double e2 = std::exp(-2.0 * std::fabs(xi));
      const double gap = L * 2.0 * e2 / (1.0 + e2);
      const double p = std::copysign(L - gap, xi);
      return {xi == 0 ? 0.0 : p, L * 4.0 * e2 / ((1.0 + e2) * (1.0 + e2)), gap};
    }
  }
  return {};
}

double f_at(const DeformationFunction& f, Stretch s, const Mapped& m) {
  // near a finite boundary the distance, not p, carries the information
  const quad p = s == Stretch::Tanh ? f.boundary() - quad(m.gap) : quad(std::fabs(m.p));
  const auto r = f.evaluate(p);
  const double v = static_cast<double>(r.value);
  if (!r.ok() || !(v > 0) || !std::isfinite(v)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "f is not a positive double on the grid at p = %.17g", m.p);
    throw InvalidDeformation(buf);
  }
  return v;
}

double tail(const DeformationFunction& f, quad p) {
  return static_cast<double>(integrate_to_endpoint(f, p, 1e-10).value);
}

// Negative pivots of K - t W in the conductance form of the LDL^T recurrence,
// which avoids the cancellation of the textbook form on graded pencils.
int sturm_count(const std::vector<double>& c, const std::vector<double>& w, double t) {
  const std::size_t n = w.size();
  int negatives = 0;
  double g = c[0] - t * w[0];
  for (std::size_t i = 0;; ++i) {
    double d = c[i + 1] + g;
    if (d == 0) d = -std::numeric_limits<double>::min();
    if (d < 0) ++negatives;
    if (i + 1 == n) break;
    g = c[i + 1] * (g / d) - t * w[i + 1];
  }
  return negatives;
}

}  // namespace

std::string_view to_string(Stretch s) {
  switch (s) {
    case Stretch::Uniform: return "uniform";
    case Stretch::Sinh: return "sinh";
    case Stretch::Tanh: return "tanh";
  }
  return "?";
}

Grid make_grid(const DeformationFunction& f, const GridSpec& spec) {
  if (spec.intervals < 2 || spec.intervals % 2 != 0)
    throw std::invalid_argument("grid needs an even number of intervals >= 2");
  Grid g;
  g.stretch = spec.stretch;
  g.intervals = spec.intervals;
  const int N = spec.intervals;

  switch (spec.stretch) {
    case Stretch::Uniform:
      g.length_scale = 1.0;
      g.p_max = spec.p_max;
      g.xi_max = spec.p_max;
      break;
    case Stretch::Sinh:
      g.length_scale = f.scale();
      g.p_max = spec.p_max;
      g.xi_max = std::asinh(spec.p_max / g.length_scale);
      break;
    case Stretch::Tanh: {
      if (!f.bounded() || !spec.boundary_gap)
        throw std::invalid_argument("tanh stretch needs a finite domain and a boundary gap");
      const double a = static_cast<double>(f.boundary());
      const double r = *spec.boundary_gap / a;
      g.length_scale = a;
      g.boundary_gap = *spec.boundary_gap;
      g.xi_max = 0.5 * std::log((2.0 - r) / r);
      g.p_max = a - *spec.boundary_gap;
      break;
    }
  }
  if (!(g.xi_max > 0)) throw std::invalid_argument("grid truncation must be positive");
  if (f.bounded() && spec.stretch != Stretch::Tanh && !(g.p_max <= static_cast<double>(f.boundary())))
    throw std::invalid_argument("grid truncation exceeds the domain");
  g.spacing = 2.0 * g.xi_max / N;

  // xi_j = (j - N/2) dxi keeps the node set exactly symmetric
  std::vector<Mapped> nodes(N + 1);
  for (int j = 0; j <= N; ++j)
    nodes[j] = map_point(g.stretch, g.length_scale, (j - N / 2) * g.spacing);
  nodes[0].p = -g.p_max;
  nodes[N].p = g.p_max;

  for (int j = 1; j < N; ++j) {
    const double fj = f_at(f, g.stretch, nodes[j]);
    g.points.push_back(nodes[j].p);
    g.jacobian.push_back(nodes[j].dp);
    g.f_nodes.push_back(fj);
    g.weights.push_back(nodes[j].dp / fj);
  }
  for (int e = 0; e < N; ++e) {
    const Mapped half = map_point(g.stretch, g.length_scale, (e - N / 2 + 0.5) * g.spacing);
    double dp = nodes[e + 1].p - nodes[e].p;
    if (g.stretch == Stretch::Tanh) {
      const bool right = e >= N / 2, left = e + 1 <= N / 2;
      const double gap0 = e == 0 ? g.boundary_gap : nodes[e].gap;
      const double gap1 = e + 1 == N ? g.boundary_gap : nodes[e + 1].gap;
      if (right && e != N / 2) dp = gap0 - gap1;
      if (left && e + 1 != N / 2) dp = gap1 - gap0;
    }
    g.edge_dp.push_back(dp);
    g.edge_f.push_back(f_at(f, g.stretch, half));
    g.edge_mid.push_back(0.5 * (nodes[e].p + nodes[e + 1].p));
  }
  return g;
}

GridSpec default_grid(const DeformationFunction& f, int intervals,
                      std::optional<double> integral, double tail_fraction) {
  GridSpec spec;
  spec.intervals = intervals;
  if (!f.bounded()) {
    if (!integral) throw std::invalid_argument("truncating an infinite domain needs I");
    const double target = tail_fraction * *integral;
    spec.stretch = Stretch::Sinh;
    double hi = f.scale();
    while (tail(f, hi) > target) {
      hi *= 2;
      if (!(hi < 1e300)) throw std::runtime_error("tail criterion cannot be met");
    }
    double lo = hi / 2;
    for (int it = 0; it < 40; ++it) {
      const double mid = std::sqrt(lo * hi);
      (tail(f, mid) > target ? lo : hi) = mid;
    }
    spec.p_max = hi;
    return spec;
  }

  const quad b = f.boundary();
  const double a = static_cast<double>(b);
  const quad d = b * ldexpq(1, -40);
  const double tau =
      static_cast<double>(logq(reciprocal(f, b - d / 2) / reciprocal(f, b - d))) / M_LN2;
  if (!(tau > 0.01)) {
    spec.stretch = Stretch::Uniform;
    spec.p_max = a;
    return spec;
  }
  spec.stretch = Stretch::Tanh;
  const double floor_gap = a * std::ldexp(1.0, -80);
  if (!integral) {
    spec.boundary_gap = a * std::ldexp(1.0, -6);
    return spec;
  }
  const double target = tail_fraction * *integral;
  double lo = a / 4;  // gap with too much tail mass beyond it, or the floor
  if (tail(f, b - quad(lo)) <= target) {
    spec.boundary_gap = lo;
    return spec;
  }
  double hi = lo;
  while (hi > floor_gap && tail(f, b - quad(hi)) > target) {
    lo = hi;
    hi /= 2;
  }
  if (hi <= floor_gap) {
    spec.boundary_gap = floor_gap;
    return spec;
  }
  for (int it = 0; it < 40; ++it) {
    const double mid = std::sqrt(lo * hi);
    (tail(f, b - quad(mid)) > target ? hi : lo) = mid;
  }
  spec.boundary_gap = hi;
  return spec;
}

Pencil build_x_squared(const Grid& grid) {
  Pencil pen;
  pen.spacing = grid.spacing;
  const double h2 = grid.spacing * grid.spacing;
  const std::size_t edges = grid.edge_dp.size();
  pen.conductance.resize(edges);
  for (std::size_t e = 0; e < edges; ++e)
    pen.conductance[e] = grid.edge_f[e] * grid.spacing / grid.edge_dp[e];
  const std::size_t n = grid.size();
  pen.diag.resize(n);
  pen.off.resize(n ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    pen.diag[i] = (pen.conductance[i] + pen.conductance[i + 1]) / h2;
    if (i + 1 < n) pen.off[i] = -pen.conductance[i + 1] / h2;
  }
  pen.weight = grid.weights;
  return pen;
}

SpectralResult lowest_eigenvalue(const Pencil& pen, const Grid& grid) {
  const std::size_t n = pen.size();
  if (n == 0) throw EigenError("empty pencil");
  const auto& c = pen.conductance;
  const auto& w = pen.weight;
  const double h2 = pen.spacing * pen.spacing;

  // a constant trial vector only feels the two end edges; its Rayleigh
  // quotient bounds lambda_min from above
  double wsum = 0;
  for (double x : w) wsum += x;
  double lo = 0, hi = (c.front() + c.back()) / wsum;
  if (!(hi > 0) || !std::isfinite(hi) || !std::isfinite(wsum))
    throw EigenError("pencil coefficients are not finite and positive");
  for (int k = 0; sturm_count(c, w, hi) == 0; ++k) {
    if (k > 64) throw EigenError("no upper bracket for the lowest eigenvalue");
    hi *= 2;
  }

  SpectralResult out;
  int steps = 0;
  while (hi - lo > kBisectionTol * hi) {
    if (++steps > kBisectionCap) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "Sturm bisection did not converge in %d steps (bracket [%.17g, %.17g])",
                    kBisectionCap, lo / h2, hi / h2);
      throw EigenError(buf);
    }
    const double mid = lo + (hi - lo) / 2;
    (sturm_count(c, w, mid) >= 1 ? hi : lo) = mid;
  }
  out.bisection_steps = steps;
  out.lambda_min = 0.5 * (lo + hi) / h2;

  // inverse iteration with the shift just below lambda_min: K - lo W is
  // positive definite, so the conductance-form pivots stay positive
  std::vector<double> d(n), phi(n, 1.0), z(n);
  {
    double g = c[0] - lo * w[0];
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = c[i + 1] + g;
      if (!(d[i] > 0)) throw EigenError("inverse iteration shift is not below the spectrum");
      if (i + 1 < n) g = c[i + 1] * (g / d[i]) - lo * w[i + 1];
    }
  }
  for (int it = 0; it < kInverseSteps; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = w[i] * phi[i];
      if (i) z[i] += c[i] / d[i - 1] * z[i - 1];
    }
    for (std::size_t i = n; i-- > 0;) {
      phi[i] = z[i];
      if (i + 1 < n) phi[i] += c[i + 1] * phi[i + 1];
      phi[i] /= d[i];
    }
    // rescale to unit maximum first; graded weights overflow the raw norm
    double mx = 0;
    for (double x : phi) mx = std::max(mx, std::fabs(x));
    double norm = 0;
    for (std::size_t i = 0; i < n; ++i) {
      phi[i] /= mx;
      norm += w[i] * phi[i] * phi[i];
    }
    const double s = 1.0 / std::sqrt(norm * pen.spacing);
    for (double& x : phi) x *= s;
  }
  double sum = 0;
  for (double x : phi) sum += x;
  if (sum < 0)
    for (double& x : phi) x = -x;

  double mx = 0, asym = 0;
  out.nodeless = true;
  for (std::size_t i = 0; i < n; ++i) {
    mx = std::max(mx, std::fabs(phi[i]));
    asym = std::max(asym, std::fabs(phi[i] - phi[n - 1 - i]));
    if (!(phi[i] > 0)) out.nodeless = false;
  }
  out.even = asym <= 1e-8 * mx;
  out.eigenvector = std::move(phi);
  out.grid = grid;
  return out;
}

SpectralResult solve(const DeformationFunction& f, const GridSpec& spec) {
  const Grid grid = make_grid(f, spec);
  return lowest_eigenvalue(build_x_squared(grid), grid);
}

SpectralResult solve_extrapolated(const DeformationFunction& f, const GridSpec& spec) {
  GridSpec fine = spec;
  fine.intervals = 2 * spec.intervals;
  auto coarse = std::async(std::launch::async, [&] { return solve(f, spec); });
  SpectralResult out = solve(f, fine);
  const double lc = coarse.get().lambda_min;
  out.richardson_estimate = (4.0 * out.lambda_min - lc) / 3.0;
  return out;
}

double u_coordinate_eigenvalue(double u_max, int intervals) {
  DomainOptions box;
  box.half_width = u_max;
  const auto flat = DeformationFunction::create("1", {}, box);
  GridSpec spec;
  spec.stretch = Stretch::Uniform;
  spec.intervals = intervals;
  spec.p_max = u_max;
  return *solve_extrapolated(flat, spec).richardson_estimate;
}

VerificationReport verify_minimal_length(const DeformationFunction& f, double l0,
                                         std::optional<double> integral,
                                         const VerificationOptions& options) {
  VerificationReport rep;
  rep.l0 = l0;
  char buf[256];

  if (l0 > 0) {
    const GridSpec spec = default_grid(f, options.intervals, integral, options.tail_fraction);
    GridSpec fine_spec = spec;
    fine_spec.intervals *= 2;
    auto coarse = std::async(std::launch::async, [&] { return solve(f, spec); });
    SpectralResult fine = solve(f, fine_spec);
    rep.lambda_coarse = coarse.get().lambda_min;
    rep.lambda_fine = fine.lambda_min;
    rep.lambda_extrapolated = (4.0 * rep.lambda_fine - rep.lambda_coarse) / 3.0;
    fine.richardson_estimate = rep.lambda_extrapolated;
    rep.sqrt_lambda = std::sqrt(std::max(rep.lambda_extrapolated, 0.0));
    rep.relative_error = std::fabs(rep.sqrt_lambda - l0) / l0;
    rep.even = fine.even;
    rep.nodeless = fine.nodeless;
    rep.passed = rep.relative_error <= options.rel_tol && rep.even && rep.nodeless;
    std::snprintf(buf, sizeof buf,
                  "sqrt(lambda) = %.12g vs l0 = %.12g (relative error %.3g, tolerance %.3g, "
                  "%s stretch, N = %d/%d)",
                  rep.sqrt_lambda, l0, rep.relative_error, options.rel_tol,
                  std::string(to_string(spec.stretch)).c_str(), spec.intervals,
                  fine_spec.intervals);
    rep.detail = buf;
    rep.fine = std::move(fine);
    return rep;
  }

  rep.flat = true;
  GridSpec spec;
  spec.intervals = options.intervals;
  double start_gap = 0;
  if (!f.bounded()) {
    spec.stretch = Stretch::Sinh;
    spec.p_max = 8 * f.scale();
  } else {
    spec = default_grid(f, options.intervals, std::nullopt);
    start_gap = spec.boundary_gap.value_or(0.0);
  }
  bool strictly = true, even = true, nodeless = true;
  for (int k = 0; k < options.max_flat_levels; ++k) {
    if (!f.bounded()) {
      rep.flat_p_max.push_back(spec.p_max);
    } else if (spec.stretch == Stretch::Tanh) {
      spec.boundary_gap = start_gap * std::ldexp(1.0, -2 * k);
      rep.flat_p_max.push_back(*spec.boundary_gap);
    } else {
      // f regular at a finite end keeps I finite; nothing to shrink
      rep.detail = "flat case on a finite domain with a regular endpoint";
      return rep;
    }
    const SpectralResult r = solve(f, spec);
    even = even && r.even;
    nodeless = nodeless && r.nodeless;
    if (!rep.flat_lambda.empty() && !(r.lambda_min < rep.flat_lambda.back())) strictly = false;
    rep.flat_lambda.push_back(r.lambda_min);
    if (!f.bounded()) spec.p_max *= 2;
    if (k >= 1 && r.lambda_min <= 0.5 * rep.flat_lambda.front()) break;
  }
  rep.lambda_fine = rep.flat_lambda.back();
  rep.even = even;
  rep.nodeless = nodeless;
  const double ratio = rep.flat_lambda.back() / rep.flat_lambda.front();
  rep.passed = strictly && ratio <= 0.5 && even && nodeless;
  std::snprintf(buf, sizeof buf,
                "lambda_min %s over %zu truncation levels, last/first = %.6g (need <= 0.5)",
                strictly ? "strictly decreasing" : "NOT monotone", rep.flat_lambda.size(), ratio);
  rep.detail = buf;
  return rep;
}

// ---- expectation values -----------------------------------------------------

double weighted_norm_squared(const Grid& grid, std::span<const double> phi) {
  double s = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += grid.weights[i] * phi[i] * phi[i];
  return s * grid.spacing;
}

std::vector<double> normalized(const Grid& grid, std::vector<double> phi) {
  const double s = 1.0 / std::sqrt(weighted_norm_squared(grid, phi));
  for (double& x : phi) x *= s;
  return phi;
}

Operator identity_operator() {
  return {"I", [](const Grid&, std::span<const double> phi) {
            return std::vector<double>(phi.begin(), phi.end());
          }, {}, false};
}

Operator multiplication_operator(std::string name, std::function<double(double)> g) {
  return {std::move(name),
          [g = std::move(g)](const Grid& grid, std::span<const double> phi) {
            std::vector<double> out(phi.size());
            for (std::size_t i = 0; i < phi.size(); ++i) out[i] = g(grid.points[i]) * phi[i];
            return out;
          },
          {}, false};
}

Operator momentum_operator() {
  return multiplication_operator("P", [](double p) { return p; });
}

Operator position_operator(const Pencil& pencil) {
  Operator op;
  op.name = "X";
  op.imaginary = true;
  op.apply = [](const Grid& grid, std::span<const double> phi) {
    const std::size_t n = phi.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double up = i + 1 < n ? phi[i + 1] : 0.0;
      const double down = i ? phi[i - 1] : 0.0;
      out[i] = (up - down) / (2.0 * grid.spacing * grid.weights[i]);
    }
    return out;
  };
  op.square = [pencil](const Grid&, std::span<const double> phi) {
    double s = 0;
    const std::size_t n = phi.size();
    for (std::size_t i = 0; i < n; ++i) {
      double row = pencil.diag[i] * phi[i];
      if (i) row += pencil.off[i - 1] * phi[i - 1];
      if (i + 1 < n) row += pencil.off[i] * phi[i + 1];
      s += phi[i] * row;
    }
    return s * pencil.spacing;
  };
  return op;
}

std::complex<double> expectation(const Grid& grid, std::span<const double> phi,
                                 const Operator& op) {
  if (phi.size() != grid.size()) throw std::invalid_argument("state does not match the grid");
  const double norm = weighted_norm_squared(grid, phi);
  if (!(std::fabs(norm - 1.0) <= 1e-10))
    throw std::invalid_argument("state is not normalized in the weighted norm");
  const auto v = op.apply(grid, phi);
  double s = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) s += grid.weights[i] * phi[i] * v[i];
  s *= grid.spacing;
  return op.imaginary ? std::complex<double>(0.0, s) : std::complex<double>(s, 0.0);
}

double dispersion(const Grid& grid, std::span<const double> phi, const Operator& op) {
  const std::complex<double> mean = expectation(grid, phi, op);
  double sq = 0;
  if (op.square) {
    sq = op.square(grid, phi);
  } else {
    const auto v = op.apply(grid, phi);
    for (std::size_t i = 0; i < phi.size(); ++i) sq += grid.weights[i] * v[i] * v[i];
    sq *= grid.spacing;
  }
  return sq - std::norm(mean);
}

UncertaintyCheck uncertainty_relation(const Grid& grid, const Pencil& pencil,
                                      std::span<const double> phi) {
  const std::size_t edges = grid.edge_dp.size();
  auto node = [&](std::size_t j) { return j == 0 || j == edges ? 0.0 : phi[j - 1]; };
  UncertaintyCheck out;

  double energy = 0, mass = 0, first = 0, mean_f = 0;
  std::vector<double> rho(edges);
  for (std::size_t e = 0; e < edges; ++e) {
    const double a = node(e), b = node(e + 1);
    const double diff = b - a, sum = a + b;
    energy += pencil.conductance[e] * diff * diff;
    rho[e] = 0.25 * sum * sum * grid.edge_dp[e] / grid.edge_f[e];
    mass += rho[e];
    first += rho[e] * grid.edge_mid[e];
    mean_f += grid.edge_dp[e] * 0.5 * (a * a + b * b);
  }
  const double m = first / mass;
  double var = 0;
  for (std::size_t e = 0; e < edges; ++e) {
    const double d = grid.edge_mid[e] - m;
    var += rho[e] * d * d;
  }
  out.dispersion_x = energy / grid.spacing;
  out.dispersion_p = var;
  out.mean_f = mean_f;
  out.slack = out.dispersion_x * out.dispersion_p - 0.25 * mean_f * mean_f;
  return out;
}

}  // namespace mindlen::spectral
