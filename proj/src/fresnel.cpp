// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>
#include <limits>

#include "ldma/correlation.hpp"

namespace ldma {

namespace {

constexpr double kSeriesLimit = 1.6;

FresnelPair fresnel_series(double x) {
  // Terms t_k = x (pi x^2 / 2)^k / k!; even k feed C, odd k feed S.
  const double z = 0.5 * kPi * x * x;
  double term = x;
  double c = 0.0;
  double s = 0.0;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      term *= z / k;
    }
    const double contrib = term / (2 * k + 1);
    const bool negative = (k / 2) % 2 == 1;
    if (k % 2 == 0) {
      c += negative ? -contrib : contrib;
    } else {
      s += negative ? -contrib : contrib;
    }
    if (k > 4 && term < 1e-18) {
      break;
    }
  }
  return {c, s};
}

// Modified Lentz evaluation of the continued fraction for the complementary
// error function along the diagonal, which yields the auxiliary functions.
FresnelPair fresnel_continued_fraction(double x) {
  using cd = std::complex<double>;
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double pix2 = kPi * x * x;
  cd b(1.0, -pix2);
  cd cc = 1.0 / kTiny;
  cd d = 1.0 / b;
  cd h = d;
  int n = -1;
  for (int k = 2; k < 1000; ++k) {
    n += 2;
    const double a = -static_cast<double>(n) * (n + 1);
    b += 4.0;
    d = 1.0 / (a * d + b);
    cc = b + a / cc;
    const cd del = cc * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps) {
      break;
    }
  }
  h *= cd(x, -x);
  const cd cs = cd(0.5, 0.5) * (1.0 - cd(std::cos(0.5 * pix2), std::sin(0.5 * pix2)) * h);
  return {cs.real(), cs.imag()};
}

}  // namespace

FresnelPair fresnel(double x) {
  const double ax = std::abs(x);
  FresnelPair out;
  if (ax == 0.0) {
    return out;
  }
  if (std::isinf(ax)) {
    out = {0.5, 0.5};
  } else if (ax <= kSeriesLimit) {
    out = fresnel_series(ax);
  } else {
    out = fresnel_continued_fraction(ax);
  }
  if (x < 0.0) {
    out.C = -out.C;
    out.S = -out.S;
  }
  return out;
}

}  // namespace ldma
