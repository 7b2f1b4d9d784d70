#include "qsum/qcore.hpp"

#include <limits>

namespace qsum {

double log_qfactorial(int n, const QParamd& q) {
  double s = 0.0;
  for (int k = 1; k <= n; ++k) s += std::log(qnum(k, q));
  return s;
}

namespace {

// Runs prod_{m>=0} (1 + sign q^{-m-1}(q-1) x) until the geometric tail of deviations is below tol.
template <class OnFactor>
cplx q_product(cplx x, const QParamd& q, double tol, double sign, OnFactor on_factor) {
  cplx r(1.0);
  double scale = q.p * (q.q - 1.0);
  for (int m = 0; m < 100000; ++m) {
    cplx dev = sign * scale * x;
    cplx factor = 1.0 + dev;
    on_factor(factor);
    r *= factor;
    if (std::abs(dev) < tol * (1.0 - q.p)) break;
    scale *= q.p;
  }
  return r;
}

}  // namespace

cplx exp_q(cplx x, const QParamd& q, double tol) {
  return q_product(x, q, tol, 1.0, [](cplx) {});
}

cplx Exp_q(cplx x, const QParamd& q, double tol, double pole_guard) {
  cplx d = q_product(x, q, tol, -1.0, [&](cplx factor) {
    if (std::abs(factor) < pole_guard) throw PoleProximity("Exp_q argument near a pole");
  });
  return 1.0 / d;
}

cplx exp_q_series(cplx x, const QParamd& q, int terms) {
  cplx sum(0.0), term(1.0);
  for (int n = 0; n < terms; ++n) {
    sum += term;
    term *= x / qnum(n + 1, q);
  }
  return sum;
}

// Exp_q(x) = sum q^{n(n-1)/2} x^n / [n]_q!, convergent for |x| < q/(q-1).
cplx Exp_q_series(cplx x, const QParamd& q, int terms) {
  cplx sum(0.0), term(1.0);
  for (int n = 0; n < terms; ++n) {
    sum += term;
    term *= x * std::pow(q.q, n) / qnum(n + 1, q);
  }
  return sum;
}

double phi(const PhiSpec& spec, double x, const QParamd& q) {
  if (x < 0.0) throw SpecError("phi needs x >= 0");
  if (!(spec.h > 0.0) || !(spec.tail_eps > 0.0)) throw SpecError("phi needs h > 0 and tail_eps > 0");
  if (x == 0.0) return spec.m == 0 ? 1.0 : 0.0;
  // log-domain start avoids overflow of x^m for large m
  double term = std::exp(spec.m * std::log(x) - log_qfactorial(spec.m, q));
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    sum += term;
    double ratio = spec.h * x / qnum(spec.m + i + 1, q);
    double next = term * ratio;
    if (ratio < 1.0) {
      double next_ratio = spec.h * x / qnum(spec.m + i + 2, q);
      double tail = next / (1.0 - next_ratio);
      if (next_ratio < 1.0 && tail <= spec.tail_eps * sum) {
        sum += next;
        break;
      }
    }
    term = next;
  }
  return sum;
}

}  // namespace qsum
