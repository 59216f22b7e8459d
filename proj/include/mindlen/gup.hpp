#pragma once

// Lower bound on the minimal length from Delta X Delta P >= <f(P)>/2 when
// f(p) = F(p^2) with F convex: Jensen gives <f(P)> >= F(<P^2>) = f(Delta P)
// for <P> = 0, so Delta X >= inf_s f(s) / (2 s).

#include "mindlen/algebra.hpp"
#include "mindlen/deformation.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mindlen::gup {

struct ConvexityEvidence {
  bool convex = false;
  int samples = 0;
  double s_min = 0.0;  // sampled range of s = p^2
  double s_max = 0.0;
  /// Most negative chord defect F(s_i) - interpolant of its neighbours,
  /// sign flipped so that negative means a concave kink; relative to |F|.
  double worst_defect = 0.0;
  double worst_at = 0.0;  // s of the worst triple's middle point
  double tolerance = 0.0;
};

/// Convexity of F(s) = f(sqrt s) from chord defects on a geometric grid of s.
ConvexityEvidence check_convexity(const DeformationFunction& f, int samples = 400);

enum class MinimizerKind {
  Interior,    // attained at minimizer_s
  AtInfinity,  // infimum approached as s -> inf; bound is the limit
  AtBoundary,  // infimum approached as s -> a for a finite domain
};
std::string_view to_string(MinimizerKind k);

struct GupBound {
  double bound = 0.0;
  double minimizer_s = 0.0;  // Delta P at the infimum; +inf or a for the limits
  MinimizerKind minimizer = MinimizerKind::Interior;
  bool convexity_verified = false;
  ConvexityEvidence convexity;
};

struct BoundOptions {
  int scan_points = 241;    // log-spaced over the scan range
  double s_rel_tol = 1e-10;  // golden-section bracket, relative in s
  int convexity_samples = 400;
};

GupBound gup_bound(const DeformationFunction& f, const BoundOptions& options = {});

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Comparison {
  double l0_exact = 0.0;
  double gup_bound = 0.0;
  double ratio = 0.0;  // gup_bound / l0_exact
  GupBound detail;
};

/// Throws PreconditionError unless f is in the Kempf case and F is convex.
Comparison compare(const DeformationFunction& f, const IntegrationOptions& options = {});

}  // namespace mindlen::gup
