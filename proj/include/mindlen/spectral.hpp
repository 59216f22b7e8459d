#pragma once

// X^2 = -f d/dp f d/dp on L^2(-a, a; dp/f) with Dirichlet ends, discretized
// as a symmetric tridiagonal pencil A phi = lambda W phi whose lowest
// eigenvalue is the squared minimal length.
//
// Nodes are uniform in a coordinate xi with p = p(xi) a fixed analytic
// stretch (identity, L sinh xi, or a tanh xi) chosen from the domain alone,
// never from the momentum map the pencil is meant to cross-check.

#include "mindlen/deformation.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mindlen::spectral {

enum class Stretch { Uniform, Sinh, Tanh };
std::string_view to_string(Stretch s);

struct Grid {
  Stretch stretch = Stretch::Uniform;
  double length_scale = 1.0;  // L of the sinh stretch, a of the tanh stretch
  int intervals = 0;          // N; interior nodes 1..N-1
  double xi_max = 0.0;
  double spacing = 0.0;       // delta xi
  double p_max = 0.0;         // Dirichlet nodes at +-p_max
  double boundary_gap = 0.0;  // a - p_max for a finite domain (0 otherwise)

  std::vector<double> points;    // interior p_j
  std::vector<double> jacobian;  // dp/dxi at the nodes
  std::vector<double> weights;   // w_j = (dp/dxi) / f(p_j)
  std::vector<double> f_nodes;   // f(p_j)
  // per edge e between nodes e and e+1, e = 0..N-1, end nodes included
  std::vector<double> edge_dp;   // p_{e+1} - p_e
  std::vector<double> edge_f;    // f at the half point p(xi_{e+1/2})
  std::vector<double> edge_mid;  // (p_e + p_{e+1}) / 2

  std::size_t size() const noexcept { return points.size(); }
};

struct GridSpec {
  Stretch stretch = Stretch::Uniform;
  int intervals = 8192;
  double p_max = 0.0;                  // used for Uniform and Sinh
  std::optional<double> boundary_gap;  // used for Tanh: a - p_max
};

Grid make_grid(const DeformationFunction& f, const GridSpec& spec);

/// Stretch and truncation for f: Sinh with the tail int_{P}^inf dp/f <=
/// tail_fraction * I when a = inf, Tanh with the matching gap when f -> 0 at
/// a finite a, Uniform up to a otherwise. `integral` is I (needed only when a
/// tail has to be cut).
GridSpec default_grid(const DeformationFunction& f, int intervals,
                      std::optional<double> integral, double tail_fraction = 1e-6);

struct Pencil {
  std::vector<double> diag;         // A_jj
  std::vector<double> off;          // A_{j,j+1}
  std::vector<double> weight;       // W_jj
  std::vector<double> conductance;  // c_e = f_e dxi / dp_e per edge, e = 0..N-1
  double spacing = 0.0;
  std::size_t size() const noexcept { return diag.size(); }
};

Pencil build_x_squared(const Grid& grid);

class EigenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectralResult {
  double lambda_min = 0.0;
  std::vector<double> eigenvector;  // interior nodes; sum w phi^2 dxi = 1, positive
  Grid grid;
  std::optional<double> richardson_estimate;
  int bisection_steps = 0;
  bool even = false;
  bool nodeless = false;
};

/// Smallest eigenvalue by Sturm-count bisection (relative tolerance 1e-13),
/// eigenvector by inverse iteration.
SpectralResult lowest_eigenvalue(const Pencil& pencil, const Grid& grid);

SpectralResult solve(const DeformationFunction& f, const GridSpec& spec);

/// (4 lambda_{2N} - lambda_N) / 3 from the grids N and 2N of `spec`;
/// returns the fine result with richardson_estimate set.
SpectralResult solve_extrapolated(const DeformationFunction& f, const GridSpec& spec);

/// Lowest eigenvalue of -d^2/du^2 on [-u_max, u_max] (the image of the
/// problem under u = F(p)), Richardson-extrapolated from N and 2N intervals.
double u_coordinate_eigenvalue(double u_max, int intervals);

struct VerificationOptions {
  int intervals = 8192;
  double rel_tol = 1e-4;
  double tail_fraction = 1e-9;
  int max_flat_levels = 12;
};

struct VerificationReport {
  bool passed = false;
  bool flat = false;  // l0 = 0: truncation sequence instead of extrapolation
  double l0 = 0.0;
  double lambda_coarse = 0.0;
  double lambda_fine = 0.0;
  double lambda_extrapolated = 0.0;
  double sqrt_lambda = 0.0;
  double relative_error = 0.0;
  std::vector<double> flat_p_max;   // truncation per level (a - p_max gap for finite a)
  std::vector<double> flat_lambda;  // lambda_min per level
  bool even = false;
  bool nodeless = false;
  std::string detail;
  std::optional<SpectralResult> fine;  // the 2N solve (Kempf case)
};

/// Kempf case (l0 > 0): |sqrt(lambda_extrapolated) - l0| <= rel_tol l0.
/// Flat case (l0 = 0): lambda_min strictly decreasing as the truncation
/// doubles (a = inf) or the boundary gap quarters (finite a), and at least
/// halved overall.
VerificationReport verify_minimal_length(const DeformationFunction& f, double l0,
                                         std::optional<double> integral,
                                         const VerificationOptions& options = {});

// ---- expectation values on grid states -------------------------------------

/// Hermitian operator on real grid states; when `imaginary` the operator is
/// i * apply (apply then real antisymmetric in the weighted product).
struct Operator {
  std::string name;
  std::function<std::vector<double>(const Grid&, std::span<const double>)> apply;
  /// <phi, A^2 phi>; ||A phi||^2 when empty.
  std::function<double(const Grid&, std::span<const double>)> square;
  bool imaginary = false;
};

Operator identity_operator();
Operator momentum_operator();
Operator multiplication_operator(std::string name, std::function<double(double)> g);
/// X = i f d/dp; <X^2> is the pencil's quadratic form.
Operator position_operator(const Pencil& pencil);

double weighted_norm_squared(const Grid& grid, std::span<const double> phi);
std::vector<double> normalized(const Grid& grid, std::vector<double> phi);

/// <phi, A phi>; throws std::invalid_argument when phi is not normalized.
std::complex<double> expectation(const Grid& grid, std::span<const double> phi,
                                 const Operator& op);
/// <A^2> - |<A>|^2.
double dispersion(const Grid& grid, std::span<const double> phi, const Operator& op);

struct UncertaintyCheck {
  double dispersion_x = 0.0;  // Delta^2 X
  double dispersion_p = 0.0;  // Delta^2 P
  double mean_f = 0.0;        // <f(P)>
  double slack = 0.0;         // Delta^2 X Delta^2 P - <f>^2 / 4
};

/// Delta^2 X Delta^2 P >= <f(P)>^2 / 4 evaluated with edge (midpoint) rules
/// matched to the pencil, for which discrete summation by parts makes the
/// inequality exact; the slack is then nonnegative up to rounding.
UncertaintyCheck uncertainty_relation(const Grid& grid, const Pencil& pencil,
                                      std::span<const double> phi);

}  // namespace mindlen::spectral
