#include "mindlen/cli.hpp"

#include <cmath>

namespace mindlen::cli {

namespace {

double param(const expr::ParameterMap& p, const char* name) {
  const auto it = p.find(name);
  return it == p.end() ? std::nan("") : it->second;
}

}  // namespace

double gauss_l0(double lambda, double alpha) {
  if (!(alpha > 0)) return 0.0;
  return std::fabs(lambda) * std::sqrt(M_PI * alpha);
}

double power_plus_l0(double lambda, double alpha) {
  if (!(alpha > 0.5)) return 0.0;
  return std::fabs(lambda) * std::sqrt(M_PI) * std::tgamma(alpha) / std::tgamma(alpha - 0.5);
}

double power_minus_l0(double lambda, double alpha) {
  if (!(alpha < 1)) return 0.0;
  return std::fabs(lambda) * std::sqrt(M_PI) * std::tgamma(1.5 - alpha) / std::tgamma(1 - alpha);
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all{
      {"gauss",
       "exp(alpha*l^2*p^2)",
       {{"alpha", 1.0}, {"l", 1.0}},
       "exp(alpha l^2 p^2); l0 = l sqrt(pi alpha) for alpha > 0",
       [](const expr::ParameterMap&) -> std::optional<double> { return std::nullopt; },
       [](const expr::ParameterMap& p) { return gauss_l0(param(p, "l"), param(p, "alpha")); }},
      {"power-plus",
       "(1+l^2*p^2)^alpha",
       {{"alpha", 1.0}, {"l", 1.0}},
       "(1 + l^2 p^2)^alpha; l0 = l sqrt(pi) G(alpha)/G(alpha-1/2) for alpha > 1/2",
       [](const expr::ParameterMap&) -> std::optional<double> { return std::nullopt; },
       [](const expr::ParameterMap& p) { return power_plus_l0(param(p, "l"), param(p, "alpha")); }},
      {"power-minus",
       "(1-l^2*p^2)^alpha",
       {{"alpha", 0.5}, {"l", 1.0}},
       "(1 - l^2 p^2)^alpha on |p| < 1/l; l0 = l sqrt(pi) G(3/2-alpha)/G(1-alpha) for alpha < 1",
       [](const expr::ParameterMap& p) -> std::optional<double> {
         return 1.0 / std::fabs(param(p, "l"));
       },
       [](const expr::ParameterMap& p) { return power_minus_l0(param(p, "l"), param(p, "alpha")); }},
  };
  return all;
}

const Preset* find_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace mindlen::cli
