#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for complex integrands.
// Oscillatory integrands are handled by pre-partitioning the interval into
// panels that each hold a bounded number of oscillations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "modeinv/errors.hpp"

namespace modeinv {

struct QuadratureResult {
  std::complex<double> value;
  double error = 0.0;  // estimated absolute error
  double l1 = 0.0;     // estimate of ∫|f|
  int intervals = 0;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_intervals = 1 << 21;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::complex<double> value;
  double error = 0.0;
  double l1 = 0.0;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::complex<double> fv1[7];
  std::complex<double> fv2[7];
  const std::complex<double> fc = f(centre);
  std::complex<double> gauss = fc * kWg[3];
  std::complex<double> kronrod = fc * kWgk[7];
  double abs_sum = std::abs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const std::complex<double> f1 = f(centre - dx);
    const std::complex<double> f2 = f(centre + dx);
    fv1[j] = f1;
    fv2[j] = f2;
    kronrod += kWgk[j] * (f1 + f2);
    abs_sum += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const std::complex<double> mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));

  const double width = std::abs(half);
  Panel p;
  p.a = a;
  p.b = b;
  p.value = kronrod * half;
  p.l1 = abs_sum * width;
  asc *= width;
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  p.error = std::max(50.0 * eps * p.l1, err);
  return p;
}

}  // namespace detail

/// Integrates f over [a, b], starting from `panels` equal sub-intervals and
/// bisecting the worst panel until the error target is met. The target is
/// max(abs_tol, rel_tol·|I|), floored at the roundoff level of ∫|f| so that
/// integrals cancelling to zero still terminate.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, int panels,
                           const QuadratureOptions& options = {}) {
  panels = std::max(panels, 1);
  std::priority_queue<detail::Panel> heap;
  std::complex<double> total;
  double total_error = 0.0;
  double total_l1 = 0.0;
  const double width = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * width;
    const double hi = (k + 1 == panels) ? b : a + (k + 1) * width;
    detail::Panel p = detail::gauss_kronrod_15(f, lo, hi);
    total += p.value;
    total_error += p.error;
    total_l1 += p.l1;
    heap.push(p);
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto target = [&] {
    return std::max({options.abs_tol, options.rel_tol * std::abs(total), 200.0 * eps * total_l1});
  };
  int count = panels;
  while (total_error > target()) {
    if (count >= options.max_intervals) {
      std::ostringstream msg;
      msg << "quadrature did not converge within " << options.max_intervals
          << " intervals (achieved error " << total_error << ")";
      throw QuadratureError(msg.str(), total_error);
    }
    const detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const detail::Panel left = detail::gauss_kronrod_15(f, worst.a, mid);
    const detail::Panel right = detail::gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    total_l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
    ++count;
  }

  // Re-sum in interval order so the result does not depend on refinement history.
  std::vector<detail::Panel> done;
  done.reserve(heap.size());
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  std::sort(done.begin(), done.end(),
            [](const detail::Panel& x, const detail::Panel& y) { return x.a < y.a; });
  QuadratureResult result;
  for (const auto& p : done) {
    result.value += p.value;
    result.error += p.error;
    result.l1 += p.l1;
  }
  result.intervals = count;
  return result;
}

/// Number of equal panels over a unit interval such that e^{iωτ} advances by
/// at most `radians_per_panel` on each (never fewer than `minimum`).
inline int oscillation_panels(double angular_span, double radians_per_panel = 1.5707963267948966,
                              int minimum = 4) {
  const double n = std::ceil(std::abs(angular_span) / radians_per_panel);
  if (n > 1e8) return 100000000;
  return std::max(minimum, static_cast<int>(n));
}

}  // namespace modeinv
