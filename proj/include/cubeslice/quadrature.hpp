#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

namespace cubeslice {

template <class T>
struct Quadrature {
  T value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
};

template <class T, class F>
Segment<T> gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const T sum = f(center - dx) + f(center + dx);
    kronrod += sum * kKronrodWeights[j];
    if (j % 2 == 1) gauss += sum * kGaussWeights[j / 2];
  }
  Segment<T> s{a, b, kronrod * half, 0.0};
  s.error = std::abs(kronrod * half - gauss * half);
  return s;
}

}  // namespace detail

/// Adaptive Gauss–Kronrod quadrature of f over [a, b]. Subdivides the
/// segment with the largest error estimate until the summed estimate falls
/// below max(abs_tol, rel_tol*|I|) or the segment budget is spent.
template <class F>
auto integrate(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
               std::size_t max_segments = 2000) {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  using Seg = detail::Segment<T>;
  Quadrature<T> out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  auto by_error = [](const Seg& x, const Seg& y) { return x.error < y.error; };
  std::vector<Seg> heap;
  heap.push_back(detail::gauss_kronrod_15<T>(f, a, b));
  out.evaluations = 15;
  double total_error = heap.front().error;
  T total = heap.front().value;
  while (heap.size() < max_segments) {
    if (total_error <= std::max(abs_tol, rel_tol * std::abs(total))) break;
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Seg worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      break;
    }
    Seg left = detail::gauss_kronrod_15<T>(f, worst.a, mid);
    Seg right = detail::gauss_kronrod_15<T>(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
  // Re-sum in interval order so the result carries no drift from the
  // incremental updates.
  std::sort(heap.begin(), heap.end(), [](const Seg& x, const Seg& y) { return x.a < y.a; });
  out.value = T{};
  out.error = 0.0;
  for (const Seg& s : heap) {
    out.value += s.value;
    out.error += s.error;
  }
  out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(out.value));
  return out;
}

/// Integral over [a, inf) through the map t = a + s/(1-s), s in [0, 1).
template <class F>
auto integrate_to_infinity(F&& f, double a, double abs_tol, double rel_tol = 0.0,
                           std::size_t max_segments = 2000) {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  auto mapped = [&](double s) -> T {
    const double one_minus = 1.0 - s;
    if (one_minus <= 0.0) return T{};
    const double t = a + s / one_minus;
    return f(t) * (1.0 / (one_minus * one_minus));
  };
  return integrate(mapped, 0.0, 1.0, abs_tol, rel_tol, max_segments);
}

/// Integral over the whole real line, split at zero.
template <class F>
auto integrate_real_line(F&& f, double abs_tol, double rel_tol = 0.0,
                         std::size_t max_segments = 2000) {
  auto right = integrate_to_infinity(f, 0.0, 0.5 * abs_tol, rel_tol, max_segments);
  auto reflected = [&](double t) { return f(-t); };
  auto left = integrate_to_infinity(reflected, 0.0, 0.5 * abs_tol, rel_tol, max_segments);
  right.value += left.value;
  right.error += left.error;
  right.evaluations += left.evaluations;
  right.converged = right.converged && left.converged;
  return right;
}

}  // namespace cubeslice
