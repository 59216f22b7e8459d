#pragma once

// Minimal length l0 = (pi/2) / int_0^a dp/f and the odd increasing momentum
// map q = h(p) onto the matching reference algebra.

#include "mindlen/convergence.hpp"
#include "mindlen/deformation.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mindlen {

enum class MapCase {
  MappedToFlat,   // g = 1, l0 = 0
  MappedToKempf,  // g = 1 + beta q^2, l0 = sqrt(beta)
};

std::string_view to_string(MapCase c);

struct MinimalLengthResult {
  double l0 = 0.0;
  ConvergenceReport integral;
  MapCase map_case = MapCase::MappedToFlat;
  std::optional<double> beta;  // (pi / (2 I))^2, present iff MappedToKempf
};

MinimalLengthResult minimal_length(const DeformationFunction& f,
                                   const IntegrationOptions& options = {});

class MomentumMap {
 public:
  struct Node {
    double p;
    double F;  // int_0^p dp'/f
    double C;  // int_p^a dp'/f; infinite in the flat case
  };

  static MomentumMap build(const DeformationFunction& f, const MinimalLengthResult& result);

  MapCase target() const noexcept { return case_; }
  /// Source text of the target deformation g(q).
  std::string target_g() const;
  std::optional<double> beta() const noexcept { return beta_; }
  double source_half_width() const noexcept { return f_.half_width(); }
  /// Half-width b of the target momentum domain (infinite for both targets).
  double target_half_width() const noexcept { return num::infinity; }

  /// g(q) of the target algebra.
  double target_deformation(double q) const;

  /// F(p) = int_0^p dp'/f, odd in p; F(+-a) = +-I.
  double cumulative(double p) const;
  /// h(p); throws std::out_of_range outside (-a, a).
  double forward(double p) const;
  /// h^-1(q).
  double inverse(double q) const;

  const std::vector<Node>& table() const noexcept { return table_; }
  const DeformationFunction& source() const noexcept { return f_; }

 private:
  MomentumMap(DeformationFunction f, MapCase c, std::optional<double> beta, double integral);

  struct Split {
    double F;
    double C;
  };
  Split split(double p) const;  // p in [0, a)
  double solve_for(double target, bool from_end) const;

  DeformationFunction f_;
  MapCase case_;
  std::optional<double> beta_;
  double integral_;  // I, or +inf in the flat case
  std::vector<Node> table_;
};

struct NormCheck {
  double source_norm = 0.0;  // int phi(p)^2 dp / f(p)
  double target_norm = 0.0;  // int phi~(q)^2 dq / g(q)
  double deviation = 0.0;
  double p_cut = 0.0;  // both integrals are taken over the image of (-p_cut, p_cut)
};

/// Compares the weighted norms of phi and of phi~(q) = phi(h^-1(q)); the two
/// integrals use separate quadratures in p and in q.
NormCheck verify_norm_preservation(const MomentumMap& map,
                                   const std::function<double(double)>& state);

}  // namespace mindlen
