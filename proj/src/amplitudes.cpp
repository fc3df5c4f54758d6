#include "modeinv/amplitudes.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "modeinv/detail/phase_functions.hpp"
#include "modeinv/errors.hpp"

namespace modeinv {

using detail::kI;

std::complex<double> transit_profile(const ModeDrive& drive, double guard) {
  const double b = drive.spatial;
  const double theta = drive.temporal;
  const double denom = (b - theta) * (b + theta);
  if (std::abs(denom) >= guard * b * b) return b * (1.0 - drive.endpoint) / denom;
  // sin(bτ) = (e^{ibτ} − e^{−ibτ})/2i, and e^{i(θ ± b)} both equal the endpoint.
  return (detail::phi1(theta + b, drive.endpoint) - detail::phi1(theta - b, drive.endpoint)) /
         (2.0 * kI);
}

std::complex<double> x_closed(const ProbeSetup& setup, int beta, Sign sign,
                              double resonance_guard) {
  const ModeDrive d = setup.drive(beta, sign);
  return setup.crossing_time() / std::sqrt(d.spatial) * transit_profile(d, resonance_guard);
}

QuadratureEstimate x_quadrature(const ProbeSetup& setup, int beta, Sign sign, double quad_tol) {
  if (!(quad_tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
  const ModeDrive d = setup.drive(beta, sign);
  auto f = [&](double tau) { return std::polar(std::sin(d.spatial * tau), d.temporal * tau); };
  QuadratureOptions opts;
  opts.rel_tol = quad_tol;
  const int panels = oscillation_panels(std::abs(d.temporal) + d.spatial, std::numbers::pi);
  const QuadratureResult r = integrate(f, 0.0, 1.0, panels, opts);
  const double scale = setup.crossing_time() / std::sqrt(d.spatial);
  return {scale * r.value, scale * r.error, r.intervals};
}

double x_mod_squared(const ProbeSetup& setup, int beta, Sign sign, double resonance_guard) {
  return std::norm(x_closed(setup, beta, sign, resonance_guard));
}

std::complex<double> x_detuned_leading(const ProbeSetup& setup, int alpha, double detuning) {
  if (alpha < 1 || alpha % 2 != 0) throw ConfigError("detuning expansion needs an even mode index");
  const double L = setup.cavity_length();
  const double v = setup.atom_speed();
  const double b = alpha * std::numbers::pi;
  return -kI * (L * L * detuning / (v * v * b * std::sqrt(b)));
}

FirstOrderAmplitudes first_order_amplitudes(const ProbeSetup& setup, const FieldPreparation& prep,
                                            const TruncationPolicy& policy) {
  validate(prep);
  validate(policy, prep.mode);
  const double guard = policy.resonance_guard;
  const double T = setup.crossing_time();

  FirstOrderAmplitudes out;
  auto term = [&](int beta) {
    const ModeAmplitude a{beta, x_closed(setup, beta, Sign::plus, guard),
                          x_closed(setup, beta, Sign::minus, guard)};
    out.per_mode.push_back(a);
    return std::norm(a.plus);
  };
  // |X₊,β|² ≤ T²·4b/(θ² − b²)², which falls as β⁻³ once θ ≫ b.
  auto envelope = [&](int beta) {
    const ModeDrive d = setup.drive(beta, Sign::plus);
    const double denom = (d.temporal - d.spatial) * (d.temporal + d.spatial);
    return T * T * 4.0 * d.spatial / (denom * denom);
  };
  auto residual = [](int, double t) { return t; };
  auto no_tail = [](int) { return 0.0; };
  auto bound = [&](int last) { return 0.5 * last * envelope(last + 1); };

  const auto sum = sum_modes(policy, prep.mode, term, residual, no_tail, bound);
  // The probed mode itself is not part of the vacuum sum but its amplitudes are reported.
  if (prep.mode > sum.report.last_mode) {
    out.per_mode.push_back({prep.mode, x_closed(setup, prep.mode, Sign::plus, guard),
                            x_closed(setup, prep.mode, Sign::minus, guard)});
  } else {
    out.per_mode.insert(out.per_mode.begin() + (prep.mode - 1),
                        {prep.mode, x_closed(setup, prep.mode, Sign::plus, guard),
                         x_closed(setup, prep.mode, Sign::minus, guard)});
  }
  out.vacuum_sum = sum.value;
  out.truncation_report = sum.report;
  if (!sum.report.converged) {
    std::ostringstream msg;
    msg << "first-order mode sum reached max_mode=" << policy.max_mode
        << " before meeting tail_tol=" << policy.tail_tol << " (" << describe(sum.report) << ")";
    out.warnings.push_back(msg.str());
  }
  return out;
}

}  // namespace modeinv
