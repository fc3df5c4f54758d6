#include "modeinv/observables.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "modeinv/errors.hpp"

namespace modeinv {

namespace {

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

// λ²[nC₋,α/(απ) + (n+1)C*₊,α/(απ)], the part of the bracket carried by mode α.
std::complex<double> probed_bracket(const ProbeSetup& setup, int alpha, int n, double guard) {
  const double lam = setup.coupling();
  const double ka = alpha * std::numbers::pi;
  const std::complex<double> cm = c_closed(setup, alpha, Sign::minus, guard);
  const std::complex<double> cp = c_closed(setup, alpha, Sign::plus, guard);
  return lam * lam * (static_cast<double>(n) * cm + static_cast<double>(n + 1) * std::conj(cp)) / ka;
}

}  // namespace

TransitionProbability transition_probability(const ProbeSetup& setup, const FieldPreparation& prep,
                                             const TruncationPolicy& policy) {
  const FirstOrderAmplitudes amps = first_order_amplitudes(setup, prep, policy);
  const ModeAmplitude& probed = amps.per_mode.at(prep.mode - 1);
  const double lam2 = setup.coupling() * setup.coupling();
  TransitionProbability p;
  p.rotating = lam2 * prep.photons * std::norm(probed.minus);
  p.counter_rotating = lam2 * (prep.photons + 1) * std::norm(probed.plus);
  p.vacuum = lam2 * amps.vacuum_sum;
  p.total = p.rotating + p.counter_rotating + p.vacuum;
  p.truncation = amps.truncation_report;
  p.warnings = amps.warnings;
  return p;
}

EtaPhase eta_phase(const ProbeSetup& setup, const FieldPreparation& prep,
                   const TruncationPolicy& policy) {
  const ModeSum sum = mode_sum_offres(setup, prep, policy);
  const double lam = setup.coupling();
  EtaPhase out;
  out.bracket = probed_bracket(setup, prep.mode, prep.photons, policy.resonance_guard) +
                lam * lam * sum.value;
  out.truncation = sum.report;
  out.warnings = sum.warnings;

  const std::complex<double> z = out.bracket;
  const double re_a = 1.0 - z.real();
  if (!(re_a > 0.0)) {
    std::ostringstream msg;
    msg << "logarithm argument 1 - lambda^2[...] has non-positive real part (" << re_a << ")";
    throw BranchError(msg.str());
  }
  // ln|A| and arg A without forming 1 − z where it would cancel.
  const double log_mod = 0.5 * std::log1p(-2.0 * z.real() + std::norm(z));
  const double arg = std::atan2(-z.imag(), re_a);
  out.eta = {arg, -log_mod};
  out.gamma = arg;
  out.visibility = std::exp(-std::abs(log_mod));
  if (std::abs(out.eta) > 0.5 * std::numbers::pi) {
    std::ostringstream msg;
    msg << "|eta| = " << std::abs(out.eta) << " exceeds pi/2; principal branch may be ambiguous";
    out.warnings.push_back(msg.str());
  }
  return out;
}

double gamma_linearized(const EtaPhase& eta) { return -eta.bracket.imag(); }

std::string_view validity_name(ValidityClass c) noexcept {
  switch (c) {
    case ValidityClass::ok: return "ok";
    case ValidityClass::marginal: return "marginal";
    case ValidityClass::invalid: return "invalid";
  }
  return "invalid";
}

Validity validity(const ProbeSetup& setup, const FieldPreparation& prep) {
  Validity v;
  v.value = setup.coupling_ratio() * prep.photons * setup.crossing_time();
  v.level = v.value < 0.1 ? ValidityClass::ok
            : v.value < 1.0 ? ValidityClass::marginal
                            : ValidityClass::invalid;
  return v;
}

ProbeOutcome probe_outcome(const ProbeSetup& setup, const FieldPreparation& prep,
                           const TruncationPolicy& policy) {
  ProbeOutcome out;
  out.probability = transition_probability(setup, prep, policy);
  const EtaPhase eta = eta_phase(setup, prep, policy);
  out.p_excite = out.probability.total;
  out.eta = eta.eta;
  out.gamma = eta.gamma;
  out.visibility = eta.visibility;
  out.eta_truncation = eta.truncation;
  out.validity = validity(setup, prep);
  append(out.warnings, setup.warnings());
  append(out.warnings, out.probability.warnings);
  append(out.warnings, eta.warnings);
  if (out.p_excite > kPerturbativeProbabilityLimit) {
    std::ostringstream msg;
    msg << "transition probability " << out.p_excite << " exceeds "
        << kPerturbativeProbabilityLimit << "; perturbative regime doubtful";
    out.warnings.push_back(msg.str());
  }
  if (out.validity.level != ValidityClass::ok) {
    std::ostringstream msg;
    msg << "validity estimator " << out.validity.value << " is "
        << validity_name(out.validity.level);
    out.warnings.push_back(msg.str());
  }
  return out;
}

double delta_gamma_exact(const ProbeSetup& setup, int alpha, int n, int m,
                         const TruncationPolicy& policy) {
  if (n < 0 || n + m < 0) throw ConfigError("photon numbers must stay non-negative");
  if (m == 0) return 0.0;
  const FieldPreparation prep{alpha, n};
  const EtaPhase base = eta_phase(setup, prep, policy);
  const std::complex<double> a = 1.0 - base.bracket;
  const double lam = setup.coupling();
  const std::complex<double> cm = c_closed(setup, alpha, Sign::minus, policy.resonance_guard);
  const std::complex<double> cp = c_closed(setup, alpha, Sign::plus, policy.resonance_guard);
  const std::complex<double> step =
      lam * lam * static_cast<double>(m) * (cm + std::conj(cp)) / (alpha * std::numbers::pi);
  const std::complex<double> ratio = 1.0 - step / a;
  if (!(ratio.real() > 0.0) || !(1.0 - base.bracket.real() - step.real() > 0.0)) {
    throw BranchError("phase difference leaves the principal branch");
  }
  return std::atan2(ratio.imag(), ratio.real());
}

double delta_gamma_linear(const ProbeSetup& setup, int alpha, int m) {
  if (alpha < 1 || alpha % 2 != 0) throw ConfigError("the linear estimate needs an even mode index");
  const double lam = setup.coupling();
  const double L = setup.cavity_length();
  const double pi = std::numbers::pi;
  return lam * lam * L * L * m /
         (4.0 * pi * pi * alpha * alpha * setup.light_speed() * setup.atom_speed());
}

ResolutionCurve resolution_curve(const ProbeSetup& setup, int alpha, const std::vector<int>& m_list,
                                 int n_first, int n_last, const TruncationPolicy& policy,
                                 double resolution_floor) {
  if (n_first < 0 || n_last < n_first) throw ConfigError("photon range must be non-empty");
  if (m_list.empty()) throw ConfigError("list of photon differences must be non-empty");
  ResolutionCurve curve;
  curve.resolution_floor = resolution_floor;
  for (int m : m_list) {
    for (int n = n_first; n <= n_last; ++n) {
      ResolutionRow row{n, m, 0.0, "ok"};
      try {
        row.delta_gamma = delta_gamma_exact(setup, alpha, n, m, policy);
      } catch (const NumericalError& e) {
        row.delta_gamma = std::nan("");
        row.status = "branch_error";
      }
      curve.rows.push_back(row);
    }
  }
  for (int n = n_first; n <= n_last; ++n) {
    try {
      if (delta_gamma_exact(setup, alpha, n, 1, policy) >= resolution_floor) curve.threshold_n = n;
    } catch (const NumericalError&) {
    }
  }
  return curve;
}

FringeResult fringe_probabilities(double delta_gamma, double visibility, double phi) {
  FringeResult f;
  f.delta_gamma = delta_gamma;
  f.visibility = visibility;
  const double c = visibility * std::cos(delta_gamma + phi);
  f.p_plus = 0.5 * (1.0 + c);
  f.p_minus = 0.5 * (1.0 - c);
  return f;
}

FringeResult fringe(const ProbeSetup& setup, const FieldPreparation& known,
                    const FieldPreparation& unknown, double phi, const TruncationPolicy& policy) {
  for (const FieldPreparation* arm : {&known, &unknown}) {
    const Validity v = validity(setup, *arm);
    if (v.level == ValidityClass::invalid) {
      std::ostringstream msg;
      msg << "validity estimator " << v.value << " rejects the arm with n = " << arm->photons;
      throw ValidityError(msg.str());
    }
  }
  const EtaPhase a = eta_phase(setup, known, policy);
  const EtaPhase b = eta_phase(setup, unknown, policy);
  double dg = b.gamma - a.gamma;
  if (known.mode == unknown.mode) {
    dg = delta_gamma_exact(setup, known.mode, known.photons, unknown.photons - known.photons, policy);
  }
  return fringe_probabilities(dg, a.visibility * b.visibility, phi);
}

}  // namespace modeinv
