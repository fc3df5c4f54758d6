#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <type_traits>

#include "modeinv/model.hpp"

namespace modeinv {

/// What a truncated mode sum actually did.
struct TruncationReport {
  int modes_used = 0;       // number of explicit terms summed
  int last_mode = 0;        // largest β summed explicitly
  double tail_estimate = 0.0;  // magnitude of the neglected remainder
  bool converged = false;      // stopping rule met before the cap
  bool fixed_cutoff = false;
};

/// Number of consecutive small relative increments that ends an adaptive sum.
inline constexpr int kConsecutiveSmallIncrements = 10;

template <class T>
struct SeriesResult {
  T value{};
  TruncationReport report;
};

/// Sums term(β) for β = 1..policy.max_mode, β ≠ excluded, in ascending order.
///
/// Adaptive mode stops once `kConsecutiveSmallIncrements` successive modes
/// each have residual(β) below tail_tol relative to the running total, then
/// adds analytic_tail(B), the closed-form remainder β > B of whatever part of
/// the terms is summed analytically (residual is what that part misses).
/// tail_bound(B) estimates the magnitude still missing after mode B.
template <class Term, class Residual, class Tail, class Bound>
auto sum_modes(const TruncationPolicy& policy, int excluded, Term&& term, Residual&& residual,
               Tail&& analytic_tail, Bound&& tail_bound) {
  using T = std::decay_t<decltype(term(1))>;
  SeriesResult<T> out;
  out.report.fixed_cutoff = policy.fixed_cutoff;
  T acc{};
  int small = 0;
  int last = 0;
  for (int beta = 1; beta <= policy.max_mode; ++beta) {
    if (beta == excluded) continue;
    const T t = term(beta);
    acc += t;
    last = beta;
    ++out.report.modes_used;
    if (policy.fixed_cutoff) continue;
    const double scale = std::abs(acc);
    const double increment = residual(beta, t);
    const bool is_small = increment == 0.0 || (scale > 0.0 && increment < policy.tail_tol * scale);
    small = is_small ? small + 1 : 0;
    if (small >= kConsecutiveSmallIncrements && beta > excluded) {
      out.report.converged = true;
      break;
    }
  }
  out.report.last_mode = last;
  if (policy.fixed_cutoff) {
    out.report.tail_estimate = std::abs(analytic_tail(last)) + tail_bound(last);
    out.report.converged = true;
  } else {
    acc += analytic_tail(last);
    out.report.tail_estimate = tail_bound(last);
  }
  out.value = acc;
  return out;
}

inline std::string describe(const TruncationReport& report) {
  std::ostringstream os;
  os << "modes_used=" << report.modes_used << " last_mode=" << report.last_mode
     << " tail_estimate=" << report.tail_estimate
     << (report.fixed_cutoff ? " fixed_cutoff" : (report.converged ? " converged" : " capped"));
  return os.str();
}

}  // namespace modeinv
