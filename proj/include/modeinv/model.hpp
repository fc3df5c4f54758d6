#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modeinv {

enum class UnitSystem { si, natural };

/// Selects the counter-rotating (ω_β + Ω) or rotating (ω_β − Ω) exponent.
enum class Sign : int { minus = -1, plus = 1 };

constexpr int sign_value(Sign s) noexcept { return static_cast<int>(s); }
char sign_symbol(Sign s) noexcept;
Sign parse_sign(std::string_view text);

std::string_view unit_name(UnitSystem units) noexcept;
UnitSystem parse_units(std::string_view text);

/// How the atomic gap is fixed: either an explicit angular frequency, or
/// resonance with a cavity mode shifted by a detuning (Ω = ω_m − δ).
/// The second form keeps exact resonance exact in floating point.
struct GapSpec {
  std::optional<double> gap;
  std::optional<int> resonant_mode;
  double detuning = 0.0;
};

/// Raw, unvalidated parameters. Natural units require c = 1.
struct SetupParameters {
  double cavity_length = 1.0;
  double light_speed = 1.0;
  double atom_speed = 1e-3;
  double coupling_ratio = 1e-4;  // λ/Ω
  GapSpec gap{std::nullopt, 2, 0.0};
  UnitSystem units = UnitSystem::natural;
};

/// Everything the transit integrals need for one (β, sign) pair, expressed in
/// the dimensionless transit time τ = t/T ∈ [0, 1].
struct ModeDrive {
  int beta = 1;
  Sign sign = Sign::plus;
  double spatial = 0.0;   // k_β L = βπ
  double temporal = 0.0;  // (ω_β ± Ω) T
  /// (−1)^β e^{i·temporal}, reduced modulo 2π before exponentiation so that
  /// integer multiples of π come out exact.
  std::complex<double> endpoint{1.0, 0.0};
};

class ProbeSetup;
ProbeSetup build_setup(const SetupParameters& raw);

/// Validated cavity/atom parameter record. Immutable after construction.
class ProbeSetup {
 public:
  double cavity_length() const noexcept { return raw_.cavity_length; }
  double light_speed() const noexcept { return raw_.light_speed; }
  double atom_speed() const noexcept { return raw_.atom_speed; }
  double coupling_ratio() const noexcept { return raw_.coupling_ratio; }
  UnitSystem units() const noexcept { return raw_.units; }
  const SetupParameters& parameters() const noexcept { return raw_; }

  /// Atomic gap Ω.
  double gap() const noexcept;
  /// Coupling λ = (λ/Ω)·Ω.
  double coupling() const noexcept { return raw_.coupling_ratio * gap(); }
  /// T = L/v.
  double crossing_time() const noexcept { return raw_.cavity_length / raw_.atom_speed; }
  /// v/c.
  double speed_ratio() const noexcept { return raw_.atom_speed / raw_.light_speed; }
  /// ΩL/(πc); equals m at resonance with mode m.
  double gap_number() const noexcept { return static_cast<double>(gap_mode_) - gap_offset_; }
  /// λT, the only place the coupling enters the transit integrals.
  double transit_coupling() const noexcept;

  double mode_frequency(int beta) const;  // ω_β = βπc/L
  double wavenumber(int beta) const;      // k_β = βπ/L
  /// ω_α − Ω.
  double detuning(int alpha) const;
  /// True only when the gap was declared resonant with `alpha` at zero detuning.
  bool resonant_with(int alpha) const noexcept {
    return gap_mode_ == alpha && gap_offset_ == 0.0;
  }

  ModeDrive drive(int beta, Sign sign) const;

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  friend ProbeSetup build_setup(const SetupParameters& raw);
  ProbeSetup() = default;

  SetupParameters raw_;
  int gap_mode_ = 0;          // integer part m of the gap number
  double gap_offset_ = 0.0;   // gap number = m − offset
  std::vector<std::string> warnings_;
};

/// ω_α = απc/L.
double resonant_gap(const ProbeSetup& setup, int alpha);

/// Fock state n in cavity mode α, every other mode in vacuum.
struct FieldPreparation {
  int mode = 2;
  int photons = 0;
};

void validate(const FieldPreparation& prep);

/// Controls the infinite mode sums.
struct TruncationPolicy {
  int max_mode = 10000;
  double tail_tol = 1e-10;
  double resonance_guard = 1e-6;
  /// Sum exactly β = 1..max_mode with no early stop and no analytic tail.
  /// Used when comparing against a finite-mode simulation.
  bool fixed_cutoff = false;
};

void validate(const TruncationPolicy& policy, int alpha);

/// Lower and upper bound of the coupling ratios considered typical.
inline constexpr double kTypicalCouplingLow = 1e-6;
inline constexpr double kTypicalCouplingHigh = 1e-4;

}  // namespace modeinv
