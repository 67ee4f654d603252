#pragma once

// Faddeeva function w(z) = exp(-z^2) erfc(-iz).
// Weideman's rational series inside |z| < 8, Laplace continued fraction outside.

#include <array>
#include <cmath>

#include "utm/common.hpp"

namespace utm {

namespace detail {

inline constexpr int weideman_n = 40;

struct WeidemanTable {
  std::array<double, weideman_n> a{};
  double L = 0.0;
  WeidemanTable() {
    const int N = weideman_n, M = 2 * N;
    const long double Ll = std::sqrt(static_cast<long double>(N) / std::sqrt(2.0L));
    L = static_cast<double>(Ll);
    const long double pil = 3.141592653589793238462643383279502884L;
    for (int n = 1; n <= N; ++n) {
      long double s = 0.0L;
      for (int k = -M + 1; k <= M - 1; ++k) {
        long double th = k * pil / M;
        long double t = Ll * std::tan(th / 2);
        s += std::exp(-t * t) * (Ll * Ll + t * t) * std::cos(n * th);
      }
      a[n - 1] = static_cast<double>(s / (2 * M));
    }
  }
};

inline const WeidemanTable& weideman() {
  static const WeidemanTable t;
  return t;
}

inline cplx faddeeva_cf(cplx z) {
  // Laplace continued fraction, Im z >= 0
  cplx r = 0.0;
  for (int n = 60; n >= 1; --n) r = (0.5 * n) / (z - r);
  return I / std::sqrt(pi) / (z - r);
}

inline cplx faddeeva_upper(cplx z) {
  if (std::abs(z) >= 8.0) return faddeeva_cf(z);
  const auto& tb = weideman();
  cplx den = tb.L - I * z;
  cplx Z = (tb.L + I * z) / den;
  cplx p = 0.0;
  for (int n = weideman_n; n >= 1; --n) p = p * Z + tb.a[n - 1];
  return 2.0 * p / (den * den) + 1.0 / (std::sqrt(pi) * den);
}

}  // namespace detail

inline cplx faddeeva(cplx z) {
  if (z.imag() >= 0.0) return detail::faddeeva_upper(z);
  return 2.0 * std::exp(-z * z) - detail::faddeeva_upper(-z);
}

// erfc(z) = exp(-z^2) w(iz)
inline cplx erfc_c(cplx z) {
  if (z.real() >= 0.0) return std::exp(-z * z) * faddeeva(I * z);
  return 2.0 - std::exp(-z * z) * faddeeva(-I * z);
}

}  // namespace utm
