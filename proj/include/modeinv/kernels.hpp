#pragma once

#include <complex>
#include <string>
#include <vector>

#include "modeinv/amplitudes.hpp"
#include "modeinv/model.hpp"
#include "modeinv/series.hpp"

namespace modeinv {

/// ∫₀¹dτ ∫₀^τ dτ' e^{iθ(τ−τ')} sin(bτ) sin(bτ') for the drive's (b, θ).
/// Uses a removable-singularity form when |b² − θ²| < guard·b².
std::complex<double> kernel_profile(const ModeDrive& drive, double guard);

/// The closed form loses about |b² − θ²|⁻² relative accuracy near the
/// singular point, so the kernel switches branches at √ε_res instead of ε_res.
double kernel_guard(double resonance_guard);

/// C±,β = ∫₀ᵀdt ∫₀ᵗdt' e^{i(ω_β ± Ω)(t − t')} sin(k_β v t) sin(k_β v t').
/// Where it enters η it is divided by k_β L = βπ.
std::complex<double> c_closed(const ProbeSetup& setup, int beta, Sign sign,
                              double resonance_guard = 1e-6);

enum class InnerIntegral {
  numeric,        // adaptive quadrature for the inner integral too
  antiderivative  // closed antiderivative of the inner integrand (off resonance only)
};

/// Nested quadrature of the same double integral.
QuadratureEstimate c_quadrature(const ProbeSetup& setup, int beta, Sign sign,
                                double quad_tol = kDefaultQuadTol,
                                InnerIntegral inner = InnerIntegral::numeric);

/// Small-v/c value of C₊,α for even α at resonance: iL²/(4παcv).
std::complex<double> c_resonant_nonrel(const ProbeSetup& setup, int alpha);

struct ModeSum {
  std::complex<double> value;  // Σ_{β≠α} C*₊,β/(βπ)
  TruncationReport report;
  std::vector<std::string> warnings;
};

/// Σ_{β≠α} C*₊,β/(k_β L). The slowly decaying non-oscillating part of each
/// term is summed analytically beyond the cutoff.
ModeSum mode_sum_offres(const ProbeSetup& setup, const FieldPreparation& prep,
                        const TruncationPolicy& policy);

struct ModeKernel {
  int beta = 0;
  std::complex<double> plus;
  std::complex<double> minus;
};

struct SecondOrderKernels {
  std::vector<ModeKernel> per_mode;  // β = 1..max(α, mode_sum.report.last_mode)
  ModeSum mode_sum;
};

SecondOrderKernels second_order_kernels(const ProbeSetup& setup, const FieldPreparation& prep,
                                        const TruncationPolicy& policy);

}  // namespace modeinv
