#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modeinv/amplitudes.hpp"
#include "modeinv/kernels.hpp"
#include "modeinv/model.hpp"

namespace modeinv {

inline constexpr double kPerturbativeProbabilityLimit = 1e-4;
inline constexpr double kDefaultResolutionFloor = 1e-4;

/// P = λ²[n|X₋,α|² + (n+1)|X₊,α|² + Σ_{β≠α}|X₊,β|²], split into its three terms.
struct TransitionProbability {
  double rotating = 0.0;          // λ²n|X₋,α|²
  double counter_rotating = 0.0;  // λ²(n+1)|X₊,α|²
  double vacuum = 0.0;            // λ²Σ_{β≠α}|X₊,β|²
  double total = 0.0;
  TruncationReport truncation;
  std::vector<std::string> warnings;
};

TransitionProbability transition_probability(const ProbeSetup& setup, const FieldPreparation& prep,
                                             const TruncationPolicy& policy);

/// η = −i Ln A with A = 1 − λ²[nC₋,α/(απ) + Σ_{β≠α}C*₊,β/(βπ) + (n+1)C*₊,α/(απ)].
struct EtaPhase {
  std::complex<double> eta;
  std::complex<double> bracket;  // λ²[...], so that A = 1 − bracket
  double gamma = 0.0;            // Re η = arg A
  double visibility = 1.0;       // exp(−|Im η|)
  TruncationReport truncation;
  std::vector<std::string> warnings;
};

/// Principal branch. Throws BranchError when Re A ≤ 0 and warns once |η| > π/2.
EtaPhase eta_phase(const ProbeSetup& setup, const FieldPreparation& prep,
                   const TruncationPolicy& policy);

/// γ to first order in λ²: −Im(λ²[...]).
double gamma_linearized(const EtaPhase& eta);

enum class ValidityClass { ok, marginal, invalid };
std::string_view validity_name(ValidityClass c) noexcept;

struct Validity {
  double value = 0.0;  // (λ/Ω)·n·(L/v), L/v in the setup's own time unit
  ValidityClass level = ValidityClass::ok;
};

Validity validity(const ProbeSetup& setup, const FieldPreparation& prep);

/// Everything a single arm of the interferometer produces.
struct ProbeOutcome {
  double p_excite = 0.0;
  std::complex<double> eta;
  double gamma = 0.0;
  double visibility = 1.0;
  Validity validity;
  TransitionProbability probability;
  TruncationReport eta_truncation;
  std::vector<std::string> warnings;
};

ProbeOutcome probe_outcome(const ProbeSetup& setup, const FieldPreparation& prep,
                           const TruncationPolicy& policy);

/// γ(n+m) − γ(n), from the single ratio A(n+m)/A(n) = 1 − λ²m(C₋,α + C*₊,α)/(απ·A(n)).
double delta_gamma_exact(const ProbeSetup& setup, int alpha, int n, int m,
                         const TruncationPolicy& policy);

/// λ²L²m/(4π²α²cv), the small-n, small-v/c limit for even α.
double delta_gamma_linear(const ProbeSetup& setup, int alpha, int m);

struct ResolutionRow {
  int n = 0;
  int m = 0;
  double delta_gamma = 0.0;
  std::string status = "ok";
};

struct ResolutionCurve {
  std::vector<ResolutionRow> rows;  // ordered by m, then n
  /// Largest n with Δ₁γ(n) ≥ floor within the scanned range; empty if none.
  std::optional<int> threshold_n;
  double resolution_floor = kDefaultResolutionFloor;
};

ResolutionCurve resolution_curve(const ProbeSetup& setup, int alpha, const std::vector<int>& m_list,
                                 int n_first, int n_last, const TruncationPolicy& policy,
                                 double resolution_floor = kDefaultResolutionFloor);

/// Output ports of a balanced interferometer: P± = ½(1 ± V cos(Δγ + φ)).
struct FringeResult {
  double p_plus = 0.5;
  double p_minus = 0.5;
  double delta_gamma = 0.0;  // γ(unknown) − γ(known)
  double visibility = 1.0;   // product of the two arms
};

FringeResult fringe_probabilities(double delta_gamma, double visibility, double phi);

/// Both arms must pass the validity estimator, otherwise ValidityError.
FringeResult fringe(const ProbeSetup& setup, const FieldPreparation& known,
                    const FieldPreparation& unknown, double phi, const TruncationPolicy& policy);

}  // namespace modeinv
