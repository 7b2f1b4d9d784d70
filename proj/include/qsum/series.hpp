#pragma once

#include <algorithm>

#include "qsum/errors.hpp"
#include "qsum/qcore.hpp"
#include "qsum/types.hpp"
#include "qsum/zpoly.hpp"

namespace qsum {

struct TVar {};
struct XiVar {};

// Mass pushed past Mt by an operation; a warning, not an error.
struct TruncationLoss {
  bool lost = false;
  double magnitude = 0.0;
  void note(double mag) {
    if (mag > 0.0) {
      lost = true;
      magnitude = std::max(magnitude, mag);
    }
  }
};

// Truncated series sum_n c_n(z) v^n. Column n of the coefficient matrix is the ZPoly c_n.
template <class S, class Var>
class Series {
 public:
  using Scalar = S;
  using Coeffs = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

  Series() : Series(Truncation{0, 0}) {}
  explicit Series(Truncation tr) : c_(zeros<Coeffs>(tr.mz + 1, tr.mt + 1)) {}
  explicit Series(Coeffs c) : c_(std::move(c)) {}

  static Series monomial(Truncation tr, int n, const S& c = S(1), int zk = 0) {
    Series s(tr);
    if (n <= tr.mt && zk <= tr.mz) s.c_(zk, n) = c;
    return s;
  }

  Truncation trunc() const { return {mt(), mz()}; }
  int mt() const { return static_cast<int>(c_.cols()) - 1; }
  int mz() const { return static_cast<int>(c_.rows()) - 1; }

  ZPoly<S> coeff(int n) const { return c_.col(n); }
  void set_coeff(int n, const ZPoly<S>& v) { c_.col(n) = v; }
  S& operator()(int n, int k) { return c_(k, n); }
  const S& operator()(int n, int k) const { return c_(k, n); }

  const Coeffs& coeffs() const { return c_; }
  Coeffs& coeffs() { return c_; }

  Series& operator+=(const Series& o) {
    check_same(o);
    c_ += o.c_;
    return *this;
  }
  Series& operator-=(const Series& o) {
    check_same(o);
    c_ -= o.c_;
    return *this;
  }
  Series& operator*=(const S& s) {
    c_ *= s;
    return *this;
  }
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator-(Series a) {
    a.c_ = -a.c_;
    return a;
  }
  friend Series operator*(const S& s, Series a) { return a *= s; }
  friend Series operator*(Series a, const S& s) { return a *= s; }
  friend bool operator==(const Series& a, const Series& b) {
    if (!(a.trunc() == b.trunc())) return false;
    for (Eigen::Index j = 0; j < a.c_.cols(); ++j)
      for (Eigen::Index i = 0; i < a.c_.rows(); ++i)
        if (a.c_(i, j) != b.c_(i, j)) return false;
    return true;
  }

  void check_same(const Series& o) const {
    if (!(trunc() == o.trunc())) throw TruncationMismatch("series truncations differ");
  }

 private:
  Coeffs c_;
};

template <class S = cplx>
using TSeries = Series<S, TVar>;
template <class S = cplx>
using XiSeries = Series<S, XiVar>;

template <class S, class V>
double max_abs(const Series<S, V>& s) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < s.coeffs().size(); ++i) r = std::max(r, magnitude(s.coeffs().data()[i]));
  return r;
}

template <class S, class V>
Series<S, V> tdq_apply(const Series<S, V>& s, const QParam<real_t<S>>& q) {
  Series<S, V> r = s;
  real_t<S> qn(0);
  for (int n = 0; n <= s.mt(); ++n) {
    r.coeffs().col(n) *= S(qn);
    qn = qn * q.q + real_t<S>(1);
  }
  return r;
}

// (t^2 D_q) t^n = [n]_q t^{n+1}
template <class S>
TSeries<S> t2dq_apply(const TSeries<S>& s, const QParam<real_t<S>>& q, TruncationLoss* loss = nullptr) {
  TSeries<S> r(s.trunc());
  real_t<S> qn(0);
  for (int n = 0; n < s.mt(); ++n) {
    r.coeffs().col(n + 1) = s.coeffs().col(n) * S(qn);
    qn = qn * q.q + real_t<S>(1);
  }
  if (loss) loss->note(zpoly_norm<S>(s.coeff(s.mt())) * magnitude(S(qn)));
  return r;
}

template <class S, class V>
Series<S, V> dz_apply(const Series<S, V>& s, int order) {
  Series<S, V> r(s.trunc());
  for (int n = 0; n <= s.mt(); ++n) r.set_coeff(n, zpoly_derivative<S>(s.coeff(n), order));
  return r;
}

// Multiplication by v^k; k < 0 divides and requires the dropped coefficients to be zero.
template <class S, class V>
Series<S, V> shift(const Series<S, V>& s, int k, TruncationLoss* loss = nullptr, double zero_tol = 0.0) {
  Series<S, V> r(s.trunc());
  const int mt = s.mt();
  for (int n = 0; n <= mt; ++n) {
    int d = n + k;
    if (d < 0) {
      if (zpoly_norm<S>(s.coeff(n)) > zero_tol) throw OrderViolation("division by a power of the variable is not exact");
    } else if (d > mt) {
      if (loss) loss->note(zpoly_norm<S>(s.coeff(n)));
    } else {
      r.coeffs().col(d) = s.coeffs().col(n);
    }
  }
  return r;
}

// Cauchy product in the series variable with ZPoly products truncated at Mz.
template <class S, class V>
Series<S, V> mul(const Series<S, V>& a, const Series<S, V>& b) {
  a.check_same(b);
  Series<S, V> r(a.trunc());
  const int mt = a.mt();
  for (int i = 0; i <= mt; ++i) {
    ZPoly<S> ai = a.coeff(i);
    if (zpoly_norm<S>(ai) == 0.0) continue;
    for (int k = 0; i + k <= mt; ++k) r.coeffs().col(i + k) += zpoly_mul<S>(ai, b.coeff(k));
  }
  return r;
}

// Evaluation at a value of the series variable, giving a ZPoly in z.
template <class S, class V, class X>
auto evaluate(const Series<S, V>& s, const X& x) {
  using R = decltype(S() * X());
  ZPoly<R> r = zeros<ZPoly<R>>(s.mz() + 1);
  for (int n = s.mt(); n >= 0; --n) r = r * x + s.coeffs().col(n).template cast<R>();
  return r;
}

// sum a_n t^{n+1}  ->  sum a_n xi^n / [n]_q!
template <class S>
XiSeries<S> formal_borel(const TSeries<S>& s, const QParam<real_t<S>>& q, double zero_tol = 0.0) {
  if (zpoly_norm<S>(s.coeff(0)) > zero_tol) throw NonzeroConstantTerm("formal Borel transform of a series with nonzero constant term");
  XiSeries<S> r(s.trunc());
  QTable<real_t<S>> tab(q, s.mt());
  for (int n = 0; n < s.mt(); ++n) r.coeffs().col(n) = s.coeffs().col(n + 1) / S(tab.fact(n));
  return r;
}

// c_n xi^n  ->  c_n [n]_q! t^{n+1}
template <class S>
TSeries<S> formal_laplace(const XiSeries<S>& u, const QParam<real_t<S>>& q, TruncationLoss* loss = nullptr) {
  TSeries<S> r(u.trunc());
  QTable<real_t<S>> tab(q, u.mt());
  for (int n = 0; n < u.mt(); ++n) r.coeffs().col(n + 1) = u.coeffs().col(n) * S(tab.fact(n));
  if (loss) loss->note(zpoly_norm<S>(u.coeff(u.mt())) * magnitude(S(tab.fact(u.mt()))));
  return r;
}

// (a *_q f)_{n+1} = sum_{k+i=n} a_k f_i [k]_q! [i]_q! / [n+1]_q!
template <class S>
XiSeries<S> formal_qconv(const XiSeries<S>& a, const XiSeries<S>& f, const QParam<real_t<S>>& q) {
  a.check_same(f);
  const int mt = a.mt();
  XiSeries<S> r(a.trunc());
  QTable<real_t<S>> tab(q, mt);
  for (int k = 0; k < mt; ++k) {
    ZPoly<S> ak = a.coeff(k);
    if (zpoly_norm<S>(ak) == 0.0) continue;
    for (int i = 0; k + i + 1 <= mt; ++i) {
      ZPoly<S> fi = f.coeff(i);
      if (zpoly_norm<S>(fi) == 0.0) continue;
      S w(tab.fact(k) * tab.fact(i) / tab.fact(k + i + 1));
      r.coeffs().col(k + i + 1) += zpoly_mul<S>(ak, fi) * w;
    }
  }
  return r;
}

}  // namespace qsum
