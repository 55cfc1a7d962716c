#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace csched::numeric {

inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kFourLn2 = 4.0 * std::numbers::ln2;

/// Distance to the next representable double above max(|x|, 1).
inline double unit_spacing(double x) {
  const double mag = std::max(std::abs(x), 1.0);
  return std::nextafter(mag, std::numeric_limits<double>::infinity()) - mag;
}

/// Returns the nearest integer when x lies within `ulps` spacings of it,
/// otherwise floor(x).
inline double snapped_floor(double x, int ulps = 4) {
  const double nearest = std::nearbyint(x);
  if (std::abs(x - nearest) <= ulps * unit_spacing(x)) return nearest;
  return std::floor(x);
}

// Standard normal helpers. erfc keeps both tails accurate to ~1e-16 relative.
inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// Inverse of normal_cdf, p in (0,1).
inline double normal_quantile(double p) {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}
/// Inverse of normal_sf, q in (0,1).
inline double normal_isf(double q) {
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

/// Uniform double in the open interval (0,1) from 53 random bits.
inline double open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace csched::numeric
