#include "modeinv/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "modeinv/detail/parallel.hpp"
#include "modeinv/detail/phase_functions.hpp"
#include "modeinv/errors.hpp"
#include "modeinv/observables.hpp"

namespace modeinv {

using detail::kI;
using State = std::vector<std::complex<double>>;

std::size_t HilbertTruncation::dimension() const {
  std::size_t dim = 2;
  for (const auto& m : modes) {
    dim *= static_cast<std::size_t>(m.max_photons) + 1;
    if (dim > (std::size_t{1} << 40)) break;
  }
  return dim;
}

HilbertTruncation default_truncation(const FieldPreparation& prep, int headroom, int extra_modes,
                                     int others) {
  validate(prep);
  if (headroom < 2) throw ConfigError("probed-mode headroom must be at least 2");
  if (extra_modes < 0 || others < 1) throw ConfigError("invalid spectator truncation");
  HilbertTruncation t;
  t.probed_headroom = headroom;
  for (int beta = 1; beta <= prep.mode + extra_modes; ++beta) {
    t.modes.push_back({beta, beta == prep.mode ? prep.photons + headroom : others});
  }
  return t;
}

void validate(const HilbertTruncation& trunc, const FieldPreparation& prep) {
  validate(prep);
  bool probed = false;
  for (std::size_t i = 0; i < trunc.modes.size(); ++i) {
    const auto& m = trunc.modes[i];
    if (m.beta < 1 || m.max_photons < 1) throw ConfigError("invalid mode cutoff in truncation");
    for (std::size_t j = 0; j < i; ++j) {
      if (trunc.modes[j].beta == m.beta) throw ConfigError("mode listed twice in truncation");
    }
    if (m.beta == prep.mode) {
      probed = true;
      if (m.max_photons < prep.photons + 2) {
        throw ConfigError("probed mode needs room for at least n + 2 photons");
      }
    }
  }
  if (!probed) throw ConfigError("probed mode missing from truncation");
  if (trunc.dimension() > trunc.dimension_cap) {
    std::ostringstream msg;
    msg << "truncated dimension " << trunc.dimension() << " exceeds the cap "
        << trunc.dimension_cap;
    throw ConfigError(msg.str());
  }
}

namespace {

struct Link {
  std::uint32_t ground;
  std::uint32_t excited;
  double amplitude;
};

// σ⁺a†_β and σ⁺a_β matrix elements of one mode; the remaining terms are
// their Hermitian conjugates.
struct ModeLadder {
  double spatial = 0.0;
  double scale = 0.0;      // λT/√(k_β L)
  double theta_plus = 0.0;
  double theta_minus = 0.0;
  std::vector<Link> create;
  std::vector<Link> annihilate;
};

struct Ladders {
  std::size_t field_dim = 1;
  std::vector<ModeLadder> modes;
};

Ladders build_ladders(const ProbeSetup& setup, const HilbertTruncation& trunc) {
  Ladders out;
  std::vector<std::size_t> stride(trunc.modes.size());
  for (std::size_t j = trunc.modes.size(); j-- > 0;) {
    stride[j] = out.field_dim;
    out.field_dim *= static_cast<std::size_t>(trunc.modes[j].max_photons) + 1;
  }
  const double lt = setup.transit_coupling();
  for (std::size_t j = 0; j < trunc.modes.size(); ++j) {
    const int beta = trunc.modes[j].beta;
    const int cap = trunc.modes[j].max_photons;
    ModeLadder m;
    const ModeDrive plus = setup.drive(beta, Sign::plus);
    m.spatial = plus.spatial;
    m.scale = lt / std::sqrt(plus.spatial);
    m.theta_plus = plus.temporal;
    m.theta_minus = setup.drive(beta, Sign::minus).temporal;
    for (std::size_t f = 0; f < out.field_dim; ++f) {
      const int k = static_cast<int>((f / stride[j]) % (cap + 1));
      const auto g = static_cast<std::uint32_t>(f);
      if (k < cap) {
        m.create.push_back({g, static_cast<std::uint32_t>(out.field_dim + f + stride[j]),
                            std::sqrt(k + 1.0)});
      }
      if (k > 0) {
        m.annihilate.push_back({g, static_cast<std::uint32_t>(out.field_dim + f - stride[j]),
                                std::sqrt(static_cast<double>(k))});
      }
    }
    out.modes.push_back(std::move(m));
  }
  return out;
}

// Mode factors at dimensionless time τ: coefficients of σ⁺a† and σ⁺a.
void mode_factors(const ModeLadder& m, double tau, std::complex<double>& up,
                  std::complex<double>& down) {
  const double s = m.scale * std::sin(m.spatial * tau);
  up = std::polar(s, m.theta_plus * tau);
  down = std::polar(s, -m.theta_minus * tau);
}

}  // namespace

std::size_t basis_index(const HilbertTruncation& trunc, int atom, const std::vector<int>& photons) {
  if (photons.size() != trunc.modes.size()) throw ConfigError("photon list does not match modes");
  std::size_t index = 0;
  for (std::size_t j = 0; j < trunc.modes.size(); ++j) {
    if (photons[j] < 0 || photons[j] > trunc.modes[j].max_photons) {
      throw ConfigError("photon number outside the truncation");
    }
    index = index * (trunc.modes[j].max_photons + 1) + photons[j];
  }
  const std::size_t field_dim = trunc.dimension() / 2;
  return (atom ? field_dim : 0) + index;
}

Eigen::SparseMatrix<std::complex<double>> build_hamiltonian(const ProbeSetup& setup,
                                                            const HilbertTruncation& trunc,
                                                            double t) {
  const double T = setup.crossing_time();
  if (!(t >= 0.0 && t <= T)) throw ConfigError("time must lie within the transit");
  if (trunc.dimension() > trunc.dimension_cap) throw ConfigError("truncated dimension exceeds the cap");
  const Ladders ladders = build_ladders(setup, trunc);
  const double tau = t / T;
  std::vector<Eigen::Triplet<std::complex<double>>> entries;
  for (const auto& m : ladders.modes) {
    std::complex<double> up;
    std::complex<double> down;
    mode_factors(m, tau, up, down);
    // Ladder factors carry λT; divide by T for rad/s.
    up /= T;
    down /= T;
    for (const Link& l : m.create) {
      entries.emplace_back(l.excited, l.ground, up * l.amplitude);
      entries.emplace_back(l.ground, l.excited, std::conj(up) * l.amplitude);
    }
    for (const Link& l : m.annihilate) {
      entries.emplace_back(l.excited, l.ground, down * l.amplitude);
      entries.emplace_back(l.ground, l.excited, std::conj(down) * l.amplitude);
    }
  }
  const auto dim = static_cast<Eigen::Index>(2 * ladders.field_dim);
  Eigen::SparseMatrix<std::complex<double>> h(dim, dim);
  h.setFromTriplets(entries.begin(), entries.end());
  h.prune(std::complex<double>(0.0, 0.0));
  return h;
}

OracleResult evolve(const ProbeSetup& setup, const FieldPreparation& prep,
                    const HilbertTruncation& trunc, const OracleOptions& options) {
  validate(trunc, prep);
  if (!(options.integ_tol > 0.0)) throw ConfigError("integration tolerance must be positive");
  if (options.enforce_validity) {
    const Validity v = validity(setup, prep);
    if (v.level == ValidityClass::invalid) {
      std::ostringstream msg;
      msg << "validity estimator " << v.value << " >= 1; refusing to compare against perturbation";
      throw ValidityError(msg.str());
    }
  }

  const Ladders ladders = build_ladders(setup, trunc);
  const std::size_t dim = 2 * ladders.field_dim;
  std::vector<int> photons(trunc.modes.size(), 0);
  for (std::size_t j = 0; j < trunc.modes.size(); ++j) {
    if (trunc.modes[j].beta == prep.mode) photons[j] = prep.photons;
  }
  const std::size_t start = basis_index(trunc, 0, photons);

  State psi(dim, {0.0, 0.0});
  psi[start] = 1.0;

  // dψ/dτ = −i (T·H_I) ψ.
  auto rhs = [&ladders](const State& x, State& dxdt, double tau) {
    std::fill(dxdt.begin(), dxdt.end(), std::complex<double>(0.0, 0.0));
    for (const auto& m : ladders.modes) {
      std::complex<double> up;
      std::complex<double> down;
      mode_factors(m, tau, up, down);
      const std::complex<double> up_c = std::conj(up);
      const std::complex<double> down_c = std::conj(down);
      for (const Link& l : m.create) {
        dxdt[l.excited] += up * (l.amplitude * x[l.ground]);
        dxdt[l.ground] += up_c * (l.amplitude * x[l.excited]);
      }
      for (const Link& l : m.annihilate) {
        dxdt[l.excited] += down * (l.amplitude * x[l.ground]);
        dxdt[l.ground] += down_c * (l.amplitude * x[l.excited]);
      }
    }
    for (auto& v : dxdt) v *= -kI;
  };

  namespace ode = boost::numeric::odeint;
  double max_rate = 0.0;
  for (const auto& m : ladders.modes) {
    max_rate = std::max({max_rate, std::abs(m.theta_plus), std::abs(m.theta_minus), m.spatial});
  }
  // The embedded error estimate cannot see oscillations a step skips over
  // entirely, so no step may advance the fastest phase by more than a bound.
  const double max_dt = options.max_phase_step / std::max(1.0, max_rate);
  auto stepper = ode::make_controlled(options.integ_tol, options.integ_tol, max_dt,
                                      ode::runge_kutta_fehlberg78<State>());
  const double dt0 = 0.1 * max_dt;
  std::size_t steps = 0;
  try {
    steps = ode::integrate_adaptive(stepper, rhs, psi, 0.0, 1.0, dt0);
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("time integration failed: ") + e.what());
  }

  OracleResult r;
  double norm2 = 0.0;
  double excited = 0.0;
  double edge = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double p = std::norm(psi[i]);
    norm2 += p;
    if (i >= ladders.field_dim) excited += p;
    // Any mode at its cutoff: probability that has reached the truncation wall.
    std::size_t f = i % ladders.field_dim;
    for (std::size_t j = trunc.modes.size(); j-- > 0;) {
      const auto levels = static_cast<std::size_t>(trunc.modes[j].max_photons) + 1;
      if (f % levels == levels - 1) {
        edge += p;
        break;
      }
      f /= levels;
    }
  }
  r.overlap = psi[start];
  r.eta_numeric = {std::arg(r.overlap), -std::log(std::abs(r.overlap))};
  r.p_excite_numeric = excited;
  r.norm_drift = std::abs(std::sqrt(norm2) - 1.0);
  r.edge_population = edge;
  r.step_report = {steps, options.integ_tol, dim};
  for (const auto& v : psi) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw IntegrationError("time integration produced a non-finite state");
    }
  }
  return r;
}

double survival_margin(const OracleResult& r) {
  return std::norm(r.overlap) - (1.0 - 2.0 * r.p_excite_numeric - r.edge_population);
}

OracleComparison compare_with_oracle(const ProbeSetup& setup, const FieldPreparation& prep,
                                     const HilbertTruncation& trunc, const OracleOptions& options) {
  int top = 0;
  for (const auto& m : trunc.modes) top = std::max(top, m.beta);
  if (static_cast<int>(trunc.modes.size()) != top) {
    throw ConfigError("comparison needs the contiguous mode set 1..B in the truncation");
  }
  TruncationPolicy policy;
  policy.fixed_cutoff = true;
  policy.max_mode = top;
  OracleComparison c;
  c.coupling_ratio = setup.coupling_ratio();
  c.oracle = evolve(setup, prep, trunc, options);
  c.p_perturbative = transition_probability(setup, prep, policy).total;
  const EtaPhase eta = eta_phase(setup, prep, policy);
  c.gamma_perturbative = eta.gamma;
  c.im_eta_perturbative = eta.eta.imag();
  return c;
}

HalvingStudy halving_study(const SetupParameters& params, const FieldPreparation& prep,
                           const HilbertTruncation& trunc, const OracleOptions& options, int levels,
                           int threads) {
  if (levels < 2) throw ConfigError("a halving study needs at least two couplings");
  HalvingStudy study;
  study.levels.resize(levels);
  detail::parallel_for(static_cast<std::size_t>(levels), threads, [&](std::size_t i) {
    SetupParameters p = params;
    p.coupling_ratio = params.coupling_ratio * std::pow(0.5, static_cast<double>(i));
    study.levels[i] = compare_with_oracle(build_setup(p), prep, trunc, options);
  });
  for (int i = 1; i < levels; ++i) {
    const auto& a = study.levels[i - 1];
    const auto& b = study.levels[i];
    const double ga = std::abs(a.oracle.eta_numeric.real() - a.gamma_perturbative);
    const double gb = std::abs(b.oracle.eta_numeric.real() - b.gamma_perturbative);
    const double pa = std::abs(a.oracle.p_excite_numeric - a.p_perturbative);
    const double pb = std::abs(b.oracle.p_excite_numeric - b.p_perturbative);
    study.gamma_ratios.push_back(ga / gb);
    study.p_ratios.push_back(pa / pb);
  }
  return study;
}

std::string_view axis_name(ScanAxis axis) noexcept {
  switch (axis) {
    case ScanAxis::modes: return "modes";
    case ScanAxis::headroom: return "headroom";
    case ScanAxis::integ_tol: return "integ_tol";
  }
  return "modes";
}

ScanAxis parse_axis(std::string_view text) {
  if (text == "modes") return ScanAxis::modes;
  if (text == "headroom") return ScanAxis::headroom;
  if (text == "integ_tol" || text == "tol") return ScanAxis::integ_tol;
  throw ConfigError("scan axis must be modes, headroom or integ_tol");
}

ScanTable convergence_scan(const ProbeSetup& setup, const FieldPreparation& prep,
                           const HilbertTruncation& start, const OracleOptions& options,
                           ScanAxis axis, int steps, int threads) {
  if (steps < 2) throw ConfigError("a convergence scan needs at least two points");
  validate(start, prep);
  std::vector<HilbertTruncation> truncs;
  std::vector<OracleOptions> opts;
  std::vector<double> params;
  for (int s = 0; s < steps; ++s) {
    HilbertTruncation t = start;
    OracleOptions o = options;
    switch (axis) {
      case ScanAxis::modes: {
        int top = 0;
        for (const auto& m : t.modes) top = std::max(top, m.beta);
        for (int k = 1; k <= s; ++k) t.modes.push_back({top + k, 2});
        params.push_back(static_cast<double>(t.modes.size()));
        break;
      }
      case ScanAxis::headroom:
        for (auto& m : t.modes) {
          if (m.beta == prep.mode) m.max_photons += 2 * s;
        }
        t.probed_headroom += 2 * s;
        params.push_back(t.probed_headroom);
        break;
      case ScanAxis::integ_tol:
        o.integ_tol = options.integ_tol * std::pow(0.1, s);
        params.push_back(o.integ_tol);
        break;
    }
    truncs.push_back(t);
    opts.push_back(o);
  }

  ScanTable table;
  table.axis = axis;
  table.rows.resize(steps);
  detail::parallel_for(static_cast<std::size_t>(steps), threads, [&](std::size_t i) {
    table.rows[i].parameter = params[i];
    table.rows[i].result = evolve(setup, prep, truncs[i], opts[i]);
  });
  auto rel = [](double now, double before) {
    const double scale = std::max(std::abs(now), std::abs(before));
    return scale == 0.0 ? 0.0 : std::abs(now - before) / scale;
  };
  for (int s = 1; s < steps; ++s) {
    auto& row = table.rows[s];
    const auto& prev = table.rows[s - 1].result;
    row.gamma_change = rel(row.result.eta_numeric.real(), prev.eta_numeric.real());
    row.p_change = rel(row.result.p_excite_numeric, prev.p_excite_numeric);
    row.converged = row.gamma_change < table.threshold && row.p_change < table.threshold;
  }
  table.converged = table.rows.back().converged;
  return table;
}

}  // namespace modeinv
