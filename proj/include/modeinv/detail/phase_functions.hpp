#pragma once

#include <cmath>
#include <complex>

#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/math/special_functions/cos_pi.hpp>

namespace modeinv::detail {

inline constexpr std::complex<double> kI{0.0, 1.0};

/// e^{iπh}, exact at multiples of 1/2.
inline std::complex<double> half_turn_phase(double h) {
  h = std::fmod(h, 2.0);
  if (h > 1.0) h -= 2.0;
  if (h <= -1.0) h += 2.0;
  return {boost::math::cos_pi(h), boost::math::sin_pi(h)};
}

/// φ₁(ix) = (e^{ix} − 1)/(ix) = ∫₀¹ e^{ixu} du. `eix` must equal e^{ix}; it is
/// used only where the closed expression is well conditioned.
inline std::complex<double> phi1(double x, std::complex<double> eix) {
  if (std::abs(x) >= 1.0) return (eix - 1.0) / (kI * x);
  const std::complex<double> z = kI * x;
  std::complex<double> term = 1.0;
  std::complex<double> sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= z / static_cast<double>(k + 1);
    sum += term;
  }
  return sum;
}

/// φ₂(ix) = (e^{ix} − 1 − ix)/(ix)² = ∫₀¹ (1 − u) e^{ixu} du.
inline std::complex<double> phi2(double x, std::complex<double> eix) {
  const std::complex<double> z = kI * x;
  if (std::abs(x) >= 1.0) return (eix - 1.0 - z) / (z * z);
  std::complex<double> term = 0.5;
  std::complex<double> sum = 0.5;
  for (int k = 1; k < 30; ++k) {
    term *= z / static_cast<double>(k + 2);
    sum += term;
  }
  return sum;
}

}  // namespace modeinv::detail
