#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "qsum/errors.hpp"
#include "qsum/types.hpp"

namespace qsum {

template <class Real>
struct QParam {
  Real q;
  Real p;
};

template <class Real>
QParam<Real> make_qparam(const Real& q) {
  if (!(q > Real(1))) throw SpecError("q must exceed 1");
  return {q, Real(1) / q};
}

using QParamd = QParam<double>;
using QParamr = QParam<Rational>;

// [n]_q accumulated as 1 + q + ... + q^(n-1); exact for rational q.
template <class Real>
Real qnum(int n, const QParam<Real>& q) {
  Real r(0);
  for (int k = 0; k < n; ++k) r = r * q.q + Real(1);
  return r;
}

template <class Real>
Real qfactorial(int n, const QParam<Real>& q) {
  Real r(1);
  Real qn(0);
  for (int k = 1; k <= n; ++k) {
    qn = qn * q.q + Real(1);
    r *= qn;
    if constexpr (std::is_floating_point_v<Real>) {
      if (!std::isfinite(r)) throw QOverflow("[" + std::to_string(n) + "]_q! exceeds double range");
    }
  }
  return r;
}

double log_qfactorial(int n, const QParamd& q);

template <class Real>
Real qpow(const Real& x, int n) {
  Real r(1);
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

// Cached [n]_q and [n]_q! for n = 0..n_cap.
template <class Real>
class QTable {
 public:
  QTable(const QParam<Real>& q, int n_cap) : q_(q), num_(n_cap + 1), fact_(n_cap + 1) {
    num_[0] = Real(0);
    fact_[0] = Real(1);
    for (int n = 1; n <= n_cap; ++n) {
      num_[n] = num_[n - 1] * q.q + Real(1);
      fact_[n] = fact_[n - 1] * num_[n];
    }
    if constexpr (std::is_floating_point_v<Real>) {
      if (!std::isfinite(fact_[n_cap])) throw QOverflow("q-factorial table exceeds double range");
    }
  }
  const QParam<Real>& param() const { return q_; }
  int cap() const { return static_cast<int>(num_.size()) - 1; }
  const Real& num(int n) const { return num_[n]; }
  const Real& fact(int n) const { return fact_[n]; }

 private:
  QParam<Real> q_;
  std::vector<Real> num_;
  std::vector<Real> fact_;
};

inline constexpr double kProductTol = 1e-14;
inline constexpr double kPoleGuard = 1e-8;

cplx exp_q(cplx x, const QParamd& q, double tol = kProductTol);
cplx Exp_q(cplx x, const QParamd& q, double tol = kProductTol, double pole_guard = kPoleGuard);

// Partial sums of the defining series, used as oracles.
cplx exp_q_series(cplx x, const QParamd& q, int terms);
cplx Exp_q_series(cplx x, const QParamd& q, int terms);

struct PhiSpec {
  int m = 0;
  double h = 1.0;
  double tail_eps = 1e-15;
};

double phi(const PhiSpec& spec, double x, const QParamd& q);

// (xi - p y)(xi - p^2 y) ... (xi - p^k y)
template <class S, class Real>
S qshift_product(const S& xi, const S& y, int k, const QParam<Real>& q) {
  S r(1);
  Real pk(1);
  for (int i = 1; i <= k; ++i) {
    pk *= q.p;
    r *= xi - S(pk) * y;
  }
  return r;
}

// Both sides of [m]_{q^n} = (1/[n]_q) sum_{i<n} ((q-1)[m]_q + 1)^i [m]_q.
template <class Real>
std::pair<Real, Real> qnum_base_identity(int m, int n, const QParam<Real>& q) {
  if (n < 1) throw SpecError("qnum_base_identity needs n >= 1");
  QParam<Real> qn{qpow(q.q, n), Real(1) / qpow(q.q, n)};
  Real lhs = qnum(m, qn);
  Real mq = qnum(m, q);
  Real base = (q.q - Real(1)) * mq + Real(1);
  Real sum(0);
  Real pw(1);
  for (int i = 0; i < n; ++i) {
    sum += pw * mq;
    pw *= base;
  }
  return {lhs, sum / qnum(n, q)};
}

}  // namespace qsum
