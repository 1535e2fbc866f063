#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace eulerblow::quad {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod abscissae with the embedded 7-point Gauss rule on the odd slots.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class Fn>
Segment gauss_kronrod_15(const Fn& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * pair;
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Splits the interval with the largest error estimate until the summed
/// estimate falls below max(abs_tol, rel_tol*|I|). Endpoints are never sampled.
template <class Fn>
QuadResult integrate(const Fn& f, double a, double b, double rel_tol = 1e-12,
                     double abs_tol = 0.0, std::size_t max_intervals = 4000) {
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gauss_kronrod_15(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);

  QuadResult out;
  while (true) {
    const double target = std::max(abs_tol, rel_tol * std::abs(total));
    if (total_err <= target) {
      out.converged = true;
      break;
    }
    if (heap.size() >= max_intervals) break;
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);  // interval exhausted at machine resolution
      break;
    }
    auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the leaves to shed the drift accumulated by incremental updates.
  out.intervals = heap.size();
  double sum = 0.0, err = 0.0;
  std::vector<detail::Segment> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  std::sort(leaves.begin(), leaves.end(),
            [](const auto& l, const auto& r) { return l.a < r.a; });
  for (const auto& s : leaves) {
    sum += s.value;
    err += s.error;
  }
  out.value = sum;
  out.error = err;
  return out;
}

/// Fixed 5-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree 9.
template <class Fn>
double gauss_legendre_5(const Fn& f, double a, double b) {
  static constexpr std::array<double, 3> x = {0.0, 0.538469310105683091036314420700,
                                              0.906179845938663992797626878299};
  static constexpr std::array<double, 3> w = {0.568888888888888888888888888889,
                                              0.478628670499366468041291514836,
                                              0.236926885056189087514264040720};
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = w[0] * f(c);
  for (std::size_t j = 1; j < 3; ++j) s += w[j] * (f(c - h * x[j]) + f(c + h * x[j]));
  return s * h;
}

}  // namespace eulerblow::quad
