#include "modeinv/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "modeinv/detail/phase_functions.hpp"
#include "modeinv/errors.hpp"

namespace modeinv {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

char sign_symbol(Sign s) noexcept { return s == Sign::plus ? '+' : '-'; }

Sign parse_sign(std::string_view text) {
  if (text == "+" || text == "plus") return Sign::plus;
  if (text == "-" || text == "minus") return Sign::minus;
  throw ConfigError("sign must be '+' or '-', got '" + std::string(text) + "'");
}

std::string_view unit_name(UnitSystem units) noexcept {
  return units == UnitSystem::si ? "si" : "natural";
}

UnitSystem parse_units(std::string_view text) {
  if (text == "si" || text == "SI") return UnitSystem::si;
  if (text == "natural") return UnitSystem::natural;
  throw ConfigError("units must be 'si' or 'natural', got '" + std::string(text) + "'");
}

ProbeSetup build_setup(const SetupParameters& raw) {
  require(finite(raw.cavity_length) && finite(raw.light_speed) && finite(raw.atom_speed) &&
              finite(raw.coupling_ratio) && finite(raw.gap.detuning),
          "setup parameters must be finite");
  require(raw.cavity_length > 0.0, "cavity length must be positive");
  require(raw.light_speed > 0.0, "light speed must be positive");
  require(raw.units == UnitSystem::si || raw.light_speed == 1.0,
          "natural units require c = 1");
  require(raw.atom_speed > 0.0, "atom speed must be positive");
  require(raw.atom_speed < raw.light_speed, "atom speed must be below the light speed");
  require(raw.coupling_ratio >= 0.0, "coupling must be non-negative");

  ProbeSetup setup;
  setup.raw_ = raw;

  const auto& gap = raw.gap;
  require(gap.gap.has_value() != gap.resonant_mode.has_value(),
          "exactly one of the explicit gap and the resonant mode must be given");
  const double fundamental = std::numbers::pi * raw.light_speed / raw.cavity_length;
  if (gap.gap) {
    require(finite(*gap.gap) && *gap.gap > 0.0, "atomic gap must be positive");
    require(gap.detuning == 0.0, "detuning applies only to a gap resonant with a mode");
    setup.gap_mode_ = 0;
    setup.gap_offset_ = -*gap.gap / fundamental;
  } else {
    require(*gap.resonant_mode >= 1, "resonant mode index must be at least 1");
    setup.gap_mode_ = *gap.resonant_mode;
    setup.gap_offset_ = gap.detuning / fundamental;
    require(setup.gap_number() > 0.0, "detuning leaves a non-positive atomic gap");
  }

  const double ratio = raw.coupling_ratio;
  if (ratio < kTypicalCouplingLow || ratio > kTypicalCouplingHigh) {
    std::ostringstream msg;
    msg << "coupling ratio lambda/Omega = " << ratio << " lies outside the typical range ["
        << kTypicalCouplingLow << ", " << kTypicalCouplingHigh << "]";
    setup.warnings_.push_back(msg.str());
  }
  return setup;
}

double ProbeSetup::gap() const noexcept {
  return gap_number() * std::numbers::pi * raw_.light_speed / raw_.cavity_length;
}

double ProbeSetup::transit_coupling() const noexcept {
  // λT = (λ/Ω)·(ΩL/c)·(c/v), formed from dimensionless groups.
  return raw_.coupling_ratio * gap_number() * std::numbers::pi / speed_ratio();
}

double ProbeSetup::mode_frequency(int beta) const {
  require(beta >= 1, "mode index must be at least 1");
  return beta * std::numbers::pi * raw_.light_speed / raw_.cavity_length;
}

double ProbeSetup::wavenumber(int beta) const {
  require(beta >= 1, "mode index must be at least 1");
  return beta * std::numbers::pi / raw_.cavity_length;
}

double ProbeSetup::detuning(int alpha) const {
  require(alpha >= 1, "mode index must be at least 1");
  const double fundamental = std::numbers::pi * raw_.light_speed / raw_.cavity_length;
  return (static_cast<double>(alpha - gap_mode_) + gap_offset_) * fundamental;
}

ModeDrive ProbeSetup::drive(int beta, Sign sign) const {
  require(beta >= 1, "mode index must be at least 1");
  const int s = sign_value(sign);
  const double cv = raw_.light_speed / raw_.atom_speed;
  // (ω_β ± Ω)T / π = (β ± m)·c/v ∓ offset·c/v; each piece is reduced on its own.
  const double integral_part = static_cast<double>(beta + s * gap_mode_) * cv;
  const double offset_part = gap_offset_ * cv;

  ModeDrive d;
  d.beta = beta;
  d.sign = sign;
  d.spatial = beta * std::numbers::pi;
  d.temporal = std::numbers::pi * (integral_part - s * offset_part);
  const double half_turns = static_cast<double>(beta % 2) + std::fmod(integral_part, 2.0) -
                            s * std::fmod(offset_part, 2.0);
  d.endpoint = detail::half_turn_phase(half_turns);
  return d;
}

double resonant_gap(const ProbeSetup& setup, int alpha) {
  require(alpha >= 1, "mode index must be at least 1");
  return setup.mode_frequency(alpha);
}

void validate(const FieldPreparation& prep) {
  require(prep.mode >= 1, "probed mode index must be at least 1");
  require(prep.photons >= 0, "photon number must be non-negative");
}

void validate(const TruncationPolicy& policy, int alpha) {
  require(policy.max_mode >= alpha + 1, "truncation max_mode must exceed the probed mode");
  require(policy.tail_tol > 0.0, "tail tolerance must be positive");
  require(policy.resonance_guard > 0.0, "resonance guard must be positive");
}

}  // namespace modeinv
