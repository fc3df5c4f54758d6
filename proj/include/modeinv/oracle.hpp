#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "modeinv/model.hpp"

namespace modeinv {

struct ModeCutoff {
  int beta = 1;
  int max_photons = 2;
};

/// Truncated multimode Fock space; the atom doubles the dimension.
struct HilbertTruncation {
  std::vector<ModeCutoff> modes;
  int probed_headroom = 4;
  std::size_t dimension_cap = 200000;

  std::size_t dimension() const;
};

/// Modes 1..α+extra_modes, mode α holding n + headroom photons, the others `others`.
HilbertTruncation default_truncation(const FieldPreparation& prep, int headroom = 4,
                                     int extra_modes = 1, int others = 2);

/// Checks the probed mode is present with room for n + 2 photons and the
/// dimension stays within the cap.
void validate(const HilbertTruncation& trunc, const FieldPreparation& prep);

/// Interaction-picture Hamiltonian at time t ∈ [0, T], in rad/s:
/// λ(σ⁺e^{iΩt} + σ⁻e^{−iΩt}) Σ_β (a†_β e^{iω_β t} + a_β e^{−iω_β t}) sin(k_β v t)/√(k_β L).
/// Basis order: atom (g = 0, e = 1) slowest, then modes in listed order, the
/// last listed mode fastest.
Eigen::SparseMatrix<std::complex<double>> build_hamiltonian(const ProbeSetup& setup,
                                                            const HilbertTruncation& trunc,
                                                            double t);

/// Basis index of |atom, photon numbers⟩ in the layout above.
std::size_t basis_index(const HilbertTruncation& trunc, int atom, const std::vector<int>& photons);

struct OracleOptions {
  double integ_tol = 1e-12;
  /// Largest phase advance (radians) of the fastest mode factor per step.
  double max_phase_step = 0.5;
  /// Refuse to run when the validity estimator is ≥ 1.
  bool enforce_validity = true;
};

struct StepReport {
  std::size_t steps = 0;
  double tolerance = 0.0;
  std::size_t dimension = 0;
};

struct OracleResult {
  std::complex<double> overlap;      // ⟨ψ(0)|ψ(T)⟩
  std::complex<double> eta_numeric;  // −i Ln(overlap)
  double p_excite_numeric = 0.0;
  double norm_drift = 0.0;           // |‖ψ(T)‖ − 1|
  double edge_population = 0.0;      // weight on states with some mode at its cutoff
  StepReport step_report;
};

/// Integrates i dψ/dt = H_I(t)ψ over the transit from |g, n_α⟩.
OracleResult evolve(const ProbeSetup& setup, const FieldPreparation& prep,
                    const HilbertTruncation& trunc, const OracleOptions& options = {});

/// |⟨ψ(0)|ψ(T)⟩|² − (1 − 2·p_excite − ε_trunc), with ε_trunc the population
/// on the truncation edge. Non-negative when the survival hypothesis holds.
double survival_margin(const OracleResult& r);

/// Oracle run next to the perturbative prediction for the same finite mode set.
struct OracleComparison {
  double coupling_ratio = 0.0;
  double p_perturbative = 0.0;
  double gamma_perturbative = 0.0;
  double im_eta_perturbative = 0.0;
  OracleResult oracle;
};

/// The truncation must list modes 1..B; the perturbative sums are cut at B too.
OracleComparison compare_with_oracle(const ProbeSetup& setup, const FieldPreparation& prep,
                                     const HilbertTruncation& trunc, const OracleOptions& options);

/// Repeats the comparison with λ/Ω halved `levels − 1` times. Ratios are the
/// factor by which |oracle − perturbative| shrank at each halving.
struct HalvingStudy {
  std::vector<OracleComparison> levels;
  std::vector<double> gamma_ratios;
  std::vector<double> p_ratios;
};

HalvingStudy halving_study(const SetupParameters& params, const FieldPreparation& prep,
                           const HilbertTruncation& trunc, const OracleOptions& options,
                           int levels = 3, int threads = 1);

enum class ScanAxis { modes, headroom, integ_tol };
std::string_view axis_name(ScanAxis axis) noexcept;
ScanAxis parse_axis(std::string_view text);

struct ScanRow {
  double parameter = 0.0;  // mode count, headroom, or tolerance
  OracleResult result;
  double gamma_change = 0.0;  // relative change against the previous row
  double p_change = 0.0;
  bool converged = false;
};

struct ScanTable {
  ScanAxis axis = ScanAxis::modes;
  std::vector<ScanRow> rows;
  bool converged = false;  // last step changed both observables by < threshold
  double threshold = 1e-3;
};

/// Re-runs the oracle while enlarging one truncation parameter: one more mode,
/// two more photons of headroom, or a tenfold tighter tolerance per step.
/// Rows run in parallel with at most `threads` workers.
ScanTable convergence_scan(const ProbeSetup& setup, const FieldPreparation& prep,
                           const HilbertTruncation& start, const OracleOptions& options,
                           ScanAxis axis, int steps = 3, int threads = 1);

}  // namespace modeinv
