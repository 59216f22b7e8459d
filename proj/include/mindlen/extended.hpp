#pragma once

// Extended-precision scalar used wherever a deformation function must be
// evaluated closer to a domain boundary than double precision can resolve.

#include <quadmath.h>

#include <cmath>
#include <limits>

namespace mindlen {

using quad = __float128;

namespace num {

inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double fabs(double x) { return std::fabs(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double tan(double x) { return std::tan(x); }
inline double sinh(double x) { return std::sinh(x); }
inline double cosh(double x) { return std::cosh(x); }
inline double tanh(double x) { return std::tanh(x); }
inline double pow(double x, double y) { return std::pow(x, y); }
inline double floor(double x) { return std::floor(x); }
inline bool isnan(double x) { return std::isnan(x); }
inline bool isinf(double x) { return std::isinf(x); }
inline bool isfinite(double x) { return std::isfinite(x); }

inline quad exp(quad x) { return expq(x); }
inline quad log(quad x) { return logq(x); }
inline quad sqrt(quad x) { return sqrtq(x); }
inline quad fabs(quad x) { return fabsq(x); }
inline quad sin(quad x) { return sinq(x); }
inline quad cos(quad x) { return cosq(x); }
inline quad tan(quad x) { return tanq(x); }
inline quad sinh(quad x) { return sinhq(x); }
inline quad cosh(quad x) { return coshq(x); }
inline quad tanh(quad x) { return tanhq(x); }
inline quad pow(quad x, quad y) { return powq(x, y); }
inline quad floor(quad x) { return floorq(x); }
inline bool isnan(quad x) { return isnanq(x) != 0; }
inline bool isinf(quad x) { return isinfq(x) != 0; }
inline bool isfinite(quad x) { return finiteq(x) != 0; }

template <class T>
constexpr T pi() {
  if constexpr (std::is_same_v<T, quad>) {
    return M_PIq;
  } else {
    return static_cast<T>(M_PI);
  }
}

template <class T>
constexpr T e() {
  if constexpr (std::is_same_v<T, quad>) {
    return M_Eq;
  } else {
    return static_cast<T>(M_E);
  }
}

constexpr double infinity = std::numeric_limits<double>::infinity();

}  // namespace num
}  // namespace mindlen
