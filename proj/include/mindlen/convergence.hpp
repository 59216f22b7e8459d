#pragma once

// Classification and evaluation of I = int_0^a dp / f(p).

#include "mindlen/deformation.hpp"
#include "mindlen/quadrature.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mindlen {

enum class Classification { Finite, Divergent };
enum class Assumption { None, Finite, Divergent };

std::string_view to_string(Classification c);

/// Evidence gathered on the behaviour of 1/f at the endpoint p -> a.
struct EndpointDiagnostics {
  bool at_infinity = true;
  /// Probe points: p_k (a = inf) or the distances a - p_k (finite a).
  std::vector<double> probes;
  /// Log-log slopes between consecutive probes: sigma_k for 1/f ~ p^-sigma,
  /// tau_k for 1/f ~ (a-p)^-tau.
  std::vector<double> local_exponents;

  /// "power-law", "super-polynomial decay", "super-polynomial growth", "assumed"
  std::string method;
  double exponent = 0.0;         // fitted sigma or tau (NaN when not fitted)
  double exponent_spread = 0.0;  // max deviation of local exponents in the fit range
  std::optional<Classification> exponent_verdict;

  /// Mean log-ratio of consecutive window integrals towards the endpoint.
  double window_log_ratio = 0.0;
  double window_spread = 0.0;
  /// q of windows decaying like |ln x|^-q when the log-ratio drifts to zero
  /// (NaN when the windows shrink geometrically or are not fitted).
  double log_exponent = 0.0;
  std::optional<Classification> window_verdict;

  std::optional<Classification> verdict;  // empty: ambiguous
  std::string summary() const;
};

class AmbiguousClassification : public std::runtime_error {
 public:
  explicit AmbiguousClassification(EndpointDiagnostics evidence);
  const EndpointDiagnostics& evidence() const noexcept { return evidence_; }

 private:
  EndpointDiagnostics evidence_;
};

/// Quadrature of an integral classified (or assumed) finite did not yield a
/// finite positive value.
class IntegrationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConvergenceReport {
  Classification classification = Classification::Divergent;
  std::optional<double> value;  // present iff Finite
  double abs_error_estimate = 0.0;
  EndpointDiagnostics endpoint_diagnostics;
  bool assumed = false;  // classification supplied by the caller
  int levels = 0;
  long evaluations = 0;
  bool converged = false;
};

/// Probes 1/f towards the endpoint and collects evidence; never throws on
/// ambiguity (diagnostics.verdict is then empty).
EndpointDiagnostics analyze_endpoint(const DeformationFunction& f);

/// Throws AmbiguousClassification when the evidence does not decide.
Classification classify_endpoint(const DeformationFunction& f,
                                 EndpointDiagnostics* evidence = nullptr);

struct IntegrationOptions {
  double rel_tol = 1e-12;
  Assumption assume = Assumption::None;
};

ConvergenceReport integrate_reciprocal(const DeformationFunction& f,
                                       const IntegrationOptions& options = {});

/// 1/f(p) in extended precision; throws InvalidDeformation where f fails.
quad reciprocal(const DeformationFunction& f, quad p);

/// int_lo^hi dp/f for 0 <= lo < hi < a.
quadrature::Integral integrate_segment(const DeformationFunction& f, quad lo, quad hi,
                                       double rel_tol = 1e-13);

/// int_lo^a dp/f for 0 <= lo < a, for f whose integral converges; the value
/// is infinite when a finite endpoint turns out non-integrable.
quadrature::Integral integrate_to_endpoint(const DeformationFunction& f, quad lo,
                                           double rel_tol = 1e-13);

}  // namespace mindlen
