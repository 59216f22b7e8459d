#pragma once

#include "mindlen/expr.hpp"
#include "mindlen/extended.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mindlen {

class InvalidDeformation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DomainOptions {
  /// Explicit momentum half-width; skips detection (deliberately truncated domains).
  std::optional<double> half_width;
  double scan_limit = 1e6;
};

/// f(p) bound to its parameters on the momentum interval (-a, a), a <= inf.
/// Immutable; evaluation is thread-safe.
class DeformationFunction {
 public:
  static DeformationFunction create(expr::Expression expression, expr::ParameterMap params,
                                    const DomainOptions& options = {});
  static DeformationFunction create(std::string_view source, expr::ParameterMap params = {},
                                    const DomainOptions& options = {});

  const expr::Expression& expression() const noexcept { return expression_; }
  const expr::ParameterMap& parameters() const noexcept { return params_; }
  const expr::Program& program() const noexcept { return program_; }

  double half_width() const noexcept { return half_width_; }
  bool bounded() const noexcept { return half_width_ != num::infinity; }
  /// The boundary resolved in extended precision; equals half_width() when the
  /// half-width was supplied or the domain is unbounded.
  quad boundary() const noexcept { return boundary_; }
  bool user_domain() const noexcept { return user_domain_; }

  /// Momentum scale at which f departs from f(0) by a factor of two (1 when
  /// f never does on the scan range).
  double scale() const noexcept { return scale_; }

  template <class T>
  expr::Evaluation<T> evaluate(T p) const {
    return program_.run(p);
  }

  /// Throws expr::EvaluationError on failure.
  double operator()(double p) const;

 private:
  DeformationFunction(expr::Expression e, expr::ParameterMap params, expr::Program prog);

  expr::Expression expression_;
  expr::ParameterMap params_;
  expr::Program program_;
  double half_width_ = num::infinity;
  quad boundary_ = 0;
  bool user_domain_ = false;
  double scale_ = 1.0;
};

/// Smallest positive zero or blow-up of f, or +inf when f stays positive and
/// finite on a geometric probe sequence up to scan_limit.
double detect_domain(const expr::Expression& f, const expr::ParameterMap& params,
                     double scan_limit = 1e6);

enum class ViolationKind { NotPositive, NotEven, EvaluationFailure };

struct Violation {
  double p;
  ViolationKind kind;
  std::string detail;
};

struct ValidationReport {
  int samples = 0;
  int violation_count = 0;
  std::vector<Violation> violations;  // the first kMaxListed of them
  bool ok() const noexcept { return violation_count == 0; }

  static constexpr int kMaxListed = 64;
};

/// Positivity and evenness at Chebyshev-distributed points of (0, a).
ValidationReport validate(const DeformationFunction& f, int samples = 10000);

/// Throws InvalidDeformation listing the first violations.
void require_valid(const DeformationFunction& f, int samples = 10000);

std::string_view describe(ViolationKind kind);

}  // namespace mindlen
