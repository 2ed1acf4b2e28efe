#pragma once

// skglass: adaptive Gauss-Kronrod quadrature for moment and expectation
// integrals of smooth densities on finite (possibly truncated) intervals.
//
// Global adaptive scheme: the interval starts as a handful of panels and the
// panel with the largest Kronrod-Gauss error estimate is bisected until the
// summed estimate meets the tolerance or the panel budget runs out.

#include <cmath>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "skglass/errors.hpp"

namespace skglass::quad {

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15
// abscissae/weights, positive half; node 7 is the origin).
inline constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
inline constexpr double kWeightsK15[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
// Gauss weights for nodes 1, 3, 5, 7.
inline constexpr double kWeightsG7[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

template <class F>
std::pair<double, double> kronrod15(F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double k15 = kWeightsK15[7] * f(mid);
  double g7 = kWeightsG7[3] * f(mid);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double pair_sum = f(mid - dx) + f(mid + dx);
    k15 += kWeightsK15[i] * pair_sum;
    if (i % 2 == 1) g7 += kWeightsG7[i / 2] * pair_sum;
  }
  k15 *= half;
  g7 *= half;
  return {k15, std::abs(k15 - g7)};
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

}  // namespace detail

// Integrates f over [a, b] to absolute tolerance abs_tol. Throws
// numerical_error reporting the achieved error estimate when the panel
// budget is exhausted above tolerance.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                 int max_panels = 2048) {
  if (!(b >= a)) throw validation_error("quadrature: empty interval, b < a");
  if (a == b) return 0.0;

  std::priority_queue<detail::Panel> panels;
  double total_value = 0.0;
  double total_error = 0.0;
  const int initial = 8;
  for (int i = 0; i < initial; ++i) {
    const double lo = a + (b - a) * i / initial;
    const double hi = i + 1 == initial ? b : a + (b - a) * (i + 1) / initial;
    auto [v, e] = detail::kronrod15(f, lo, hi);
    panels.push({lo, hi, v, e});
    total_value += v;
    total_error += e;
  }

  int used = initial;
  while (total_error > abs_tol && used < max_panels) {
    const detail::Panel worst = panels.top();
    panels.pop();
    total_value -= worst.value;
    total_error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // interval no longer splittable in double precision
      total_value += worst.value;
      total_error += worst.error;
      break;
    }
    auto [lv, le] = detail::kronrod15(f, worst.a, mid);
    auto [rv, re] = detail::kronrod15(f, mid, worst.b);
    panels.push({worst.a, mid, lv, le});
    panels.push({mid, worst.b, rv, re});
    total_value += lv + rv;
    total_error += le + re;
    ++used;
  }

  if (total_error > 10.0 * abs_tol) {
    throw numerical_error(
        "quadrature did not converge: achieved error estimate " +
        std::to_string(total_error) + " above tolerance " +
        std::to_string(abs_tol));
  }
  return total_value;
}

}  // namespace skglass::quad
