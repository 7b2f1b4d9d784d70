#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qsum/errors.hpp"
#include "qsum/types.hpp"

namespace qsum {

template <class S>
ZPoly<S> zpoly_zero(int mz) {
  return zeros<ZPoly<S>>(mz + 1);
}

template <class S>
ZPoly<S> zpoly_constant(int mz, const S& c) {
  ZPoly<S> r = zeros<ZPoly<S>>(mz + 1);
  r(0) = c;
  return r;
}

// Product truncated at the common degree Mz.
template <class S>
ZPoly<S> zpoly_mul(const ZPoly<S>& a, const ZPoly<S>& b) {
  if (a.size() != b.size()) throw TruncationMismatch("ZPoly sizes differ");
  const Eigen::Index n = a.size();
  ZPoly<S> r = zeros<ZPoly<S>>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (is_exact_zero(a(i))) continue;
    for (Eigen::Index k = 0; i + k < n; ++k) r(i + k) += a(i) * b(k);
  }
  return r;
}

template <class S>
ZPoly<S> zpoly_reciprocal(const ZPoly<S>& a) {
  if (is_exact_zero(a(0))) throw NumericError("ZPoly reciprocal needs a nonzero constant term");
  const Eigen::Index n = a.size();
  ZPoly<S> r = zeros<ZPoly<S>>(n);
  S inv = S(1) / a(0);
  r(0) = inv;
  for (Eigen::Index k = 1; k < n; ++k) {
    S s(0);
    for (Eigen::Index i = 1; i <= k; ++i) s += a(i) * r(k - i);
    r(k) = -s * inv;
  }
  return r;
}

// Power-series division at z = 0.
template <class S>
ZPoly<S> zpoly_div(const ZPoly<S>& num, const ZPoly<S>& den) {
  if (num.size() != den.size()) throw TruncationMismatch("ZPoly sizes differ");
  if (is_exact_zero(den(0))) throw NumericError("ZPoly division by a series vanishing at z = 0");
  const Eigen::Index n = num.size();
  ZPoly<S> r(n);
  S inv = S(1) / den(0);
  for (Eigen::Index k = 0; k < n; ++k) {
    S s = num(k);
    for (Eigen::Index i = 1; i <= k; ++i) s -= den(i) * r(k - i);
    r(k) = s * inv;
  }
  return r;
}

template <class S>
ZPoly<S> zpoly_derivative(const ZPoly<S>& a, int order = 1) {
  const Eigen::Index n = a.size();
  ZPoly<S> r = zeros<ZPoly<S>>(n);
  for (Eigen::Index k = order; k < n; ++k) {
    S f(1);
    for (int i = 0; i < order; ++i) f *= S(k - i);
    r(k - order) = f * a(k);
  }
  return r;
}

template <class S, class X>
auto zpoly_eval(const ZPoly<S>& a, const X& z) {
  using R = decltype(S() * X());
  R r(0);
  for (Eigen::Index k = a.size() - 1; k >= 0; --k) r = r * z + R(a(k));
  return r;
}

// Largest coefficient modulus.
template <class S>
double zpoly_norm(const ZPoly<S>& a) {
  double r = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) r = std::max(r, magnitude(a(k)));
  return r;
}

// Sup over n_samples equispaced points of |z| = rho.
inline double sup_norm(const ZPolyc& a, double rho, int n_samples = 64) {
  double r = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    cplx z = std::polar(rho, 2.0 * std::numbers::pi * s / n_samples);
    r = std::max(r, std::abs(zpoly_eval(a, z)));
  }
  return r;
}

}  // namespace qsum
