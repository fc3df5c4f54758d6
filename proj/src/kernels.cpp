#include "modeinv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/digamma.hpp>

#include "modeinv/detail/phase_functions.hpp"
#include "modeinv/errors.hpp"

namespace modeinv {

using detail::kI;

double kernel_guard(double resonance_guard) { return std::sqrt(resonance_guard); }

std::complex<double> kernel_profile(const ModeDrive& drive, double guard) {
  const double b = drive.spatial;
  const double theta = drive.temporal;
  const std::complex<double> e = drive.endpoint;
  const double denom = (b - theta) * (b + theta);
  if (std::abs(denom) >= guard * b * b) {
    return -kI * theta / (2.0 * denom) + b * b * (1.0 - e) / (denom * denom);
  }
  // Expand both sines into exponentials; every e^{i(θ ± b)} equals the endpoint.
  // Each G term is a difference quotient written so that it never divides by
  // the small one of θ + sb and sb − θ.
  auto g = [&](double s) -> std::complex<double> {
    const double x = theta + s * b;
    const double y = s * b - theta;
    if (std::abs(x) >= std::abs(y)) return detail::phi1(-y, e) / (kI * x);
    return -detail::phi1(x, e) / (kI * y);
  };
  return -0.25 * (g(1.0) + g(-1.0) - detail::phi2(theta + b, e) - detail::phi2(theta - b, e));
}

std::complex<double> c_closed(const ProbeSetup& setup, int beta, Sign sign,
                              double resonance_guard) {
  const ModeDrive d = setup.drive(beta, sign);
  const double T = setup.crossing_time();
  return T * T * kernel_profile(d, kernel_guard(resonance_guard));
}

QuadratureEstimate c_quadrature(const ProbeSetup& setup, int beta, Sign sign, double quad_tol,
                                InnerIntegral inner) {
  if (!(quad_tol > 0.0)) throw ConfigError("quadrature tolerance must be positive");
  const ModeDrive d = setup.drive(beta, sign);
  const double b = d.spatial;
  const double theta = d.temporal;
  const double denom = (b - theta) * (b + theta);
  if (inner == InnerIntegral::antiderivative && std::abs(denom) < 1e-3 * b * b) {
    inner = InnerIntegral::numeric;
  }

  auto inner_f = [&](double u) { return std::polar(std::sin(b * u), -theta * u); };
  const int panels = oscillation_panels(std::abs(theta) + b, std::numbers::pi);
  const double width = 1.0 / panels;

  // Running values of ∫₀^{a_k} at the panel edges a_k = k/N.
  std::vector<std::complex<double>> cumulative;
  if (inner == InnerIntegral::numeric) {
    QuadratureOptions tight;
    tight.rel_tol = 1e-14;
    cumulative.resize(panels + 1);
    for (int k = 0; k < panels; ++k) {
      const double lo = k * width;
      const double hi = (k + 1 == panels) ? 1.0 : (k + 1) * width;
      cumulative[k + 1] = cumulative[k] + integrate(inner_f, lo, hi, 1, tight).value;
    }
  }

  auto inner_integral = [&](double tau) -> std::complex<double> {
    if (inner == InnerIntegral::antiderivative) {
      const std::complex<double> osc = std::polar(1.0, -theta * tau);
      return (b - osc * (b * std::cos(b * tau) + kI * theta * std::sin(b * tau))) / denom;
    }
    const int k = std::clamp(static_cast<int>(tau * panels), 0, panels - 1);
    const double lo = k * width;
    if (tau <= lo) return cumulative[k];
    return cumulative[k] + detail::gauss_kronrod_15(inner_f, lo, tau).value;
  };
  auto outer = [&](double tau) {
    return std::polar(std::sin(b * tau), theta * tau) * inner_integral(tau);
  };

  QuadratureOptions opts;
  opts.rel_tol = quad_tol;
  const QuadratureResult r = integrate(outer, 0.0, 1.0, panels, opts);
  const double T2 = setup.crossing_time() * setup.crossing_time();
  return {T2 * r.value, T2 * r.error, r.intervals};
}

std::complex<double> c_resonant_nonrel(const ProbeSetup& setup, int alpha) {
  if (alpha < 1 || alpha % 2 != 0) {
    throw ConfigError("the small-speed kernel limit needs an even mode index");
  }
  const double L = setup.cavity_length();
  return kI * (L * L / (4.0 * std::numbers::pi * alpha * setup.light_speed() * setup.atom_speed()));
}

ModeSum mode_sum_offres(const ProbeSetup& setup, const FieldPreparation& prep,
                        const TruncationPolicy& policy) {
  validate(prep);
  validate(policy, prep.mode);
  const double pi = std::numbers::pi;
  const double T2 = setup.crossing_time() * setup.crossing_time();
  const double r = setup.speed_ratio();
  // θ₊ = pβ + h and b = πβ, so b² − θ₊² = −(uβ + h)(wβ + h).
  const double p = pi / r;
  const double h = pi * setup.gap_number() / r;
  const double u = p - pi;
  const double w = p + pi;
  const double guard = policy.resonance_guard;

  auto term = [&](int beta) {
    return std::conj(c_closed(setup, beta, Sign::plus, guard)) / (beta * pi);
  };
  // Conjugated non-oscillating part −iθ/(2(b² − θ²)) of each term, over βπ.
  auto smooth = [&](int beta) {
    const double bt = beta;
    return -kI * (T2 / (4.0 * pi * bt)) * (1.0 / (u * bt + h) + 1.0 / (w * bt + h));
  };
  auto residual = [&](int beta, std::complex<double> t) { return std::abs(t - smooth(beta)); };
  auto tail = [&](int last) -> std::complex<double> {
    using boost::math::digamma;
    const double x = last + 1.0;
    const double psi = digamma(x);
    const double sum = ((digamma(x + h / u) - psi) + (digamma(x + h / w) - psi)) / (2.0 * h);
    std::complex<double> t = -kI * (T2 / (2.0 * pi)) * sum;
    if (prep.mode > last) t -= smooth(prep.mode);
    return t;
  };
  // The oscillating remainder is bounded by 2b²/(b² − θ²)²/(βπ) and falls as β⁻³.
  auto bound = [&](int last) {
    const ModeDrive d = setup.drive(last + 1, Sign::plus);
    const double denom = (d.temporal - d.spatial) * (d.temporal + d.spatial);
    return 0.5 * last * T2 * 2.0 * d.spatial / (denom * denom);
  };

  const auto sum = sum_modes(policy, prep.mode, term, residual, tail, bound);
  ModeSum out;
  out.value = sum.value;
  out.report = sum.report;
  if (!sum.report.converged) {
    std::ostringstream msg;
    msg << "second-order mode sum reached max_mode=" << policy.max_mode
        << " before meeting tail_tol=" << policy.tail_tol << " (" << describe(sum.report) << ")";
    out.warnings.push_back(msg.str());
  }
  return out;
}

SecondOrderKernels second_order_kernels(const ProbeSetup& setup, const FieldPreparation& prep,
                                        const TruncationPolicy& policy) {
  SecondOrderKernels out;
  out.mode_sum = mode_sum_offres(setup, prep, policy);
  const int last = std::max(prep.mode, out.mode_sum.report.last_mode);
  out.per_mode.reserve(last);
  for (int beta = 1; beta <= last; ++beta) {
    out.per_mode.push_back({beta, c_closed(setup, beta, Sign::plus, policy.resonance_guard),
                            c_closed(setup, beta, Sign::minus, policy.resonance_guard)});
  }
  return out;
}

}  // namespace modeinv
