#pragma once

#include <complex>
#include <string>
#include <vector>

#include "modeinv/model.hpp"
#include "modeinv/quadrature.hpp"
#include "modeinv/series.hpp"

namespace modeinv {

inline constexpr double kDefaultQuadTol = 1e-10;

/// ∫₀¹ e^{iθτ} sin(bτ) dτ for the drive's (b, θ). Switches to a removable-
/// singularity form when |b² − θ²| < guard·b².
std::complex<double> transit_profile(const ModeDrive& drive, double guard);

/// First-order amplitude X±,β = ∫₀ᵀ e^{i(ω_β ± Ω)t} sin(k_β v t)/√(k_β L) dt.
std::complex<double> x_closed(const ProbeSetup& setup, int beta, Sign sign,
                              double resonance_guard = 1e-6);

struct QuadratureEstimate {
  std::complex<double> value;
  double error = 0.0;
  int intervals = 0;
};

/// The same integral by adaptive Gauss-Kronrod quadrature.
QuadratureEstimate x_quadrature(const ProbeSetup& setup, int beta, Sign sign,
                                double quad_tol = kDefaultQuadTol);

/// |X±,β|².
double x_mod_squared(const ProbeSetup& setup, int beta, Sign sign, double resonance_guard = 1e-6);

/// Leading small-δ behaviour of X₋,α for even α when Ω = ω_α − δ:
/// −iL²δ/(v²(απ)^{3/2}).
std::complex<double> x_detuned_leading(const ProbeSetup& setup, int alpha, double detuning);

struct ModeAmplitude {
  int beta = 0;
  std::complex<double> plus;
  std::complex<double> minus;
};

struct FirstOrderAmplitudes {
  std::vector<ModeAmplitude> per_mode;  // β = 1..truncation_report.last_mode
  /// Σ_{β≠α} |X₊,β|², the vacuum-fluctuation sum.
  double vacuum_sum = 0.0;
  TruncationReport truncation_report;
  std::vector<std::string> warnings;
};

FirstOrderAmplitudes first_order_amplitudes(const ProbeSetup& setup, const FieldPreparation& prep,
                                            const TruncationPolicy& policy);

}  // namespace modeinv
