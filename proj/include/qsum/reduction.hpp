#pragma once

#include <utility>
#include <vector>

#include "qsum/equation.hpp"
#include "qsum/formal_solver.hpp"

namespace qsum {

// H_{n,i} of t^n (tD_q)^n = q^{-n(n-1)/2} sum_i H_{n,i} t^{n-i} (t^2 D_q)^i, with H_{0,0} = 1.
template <class Real>
class HTable {
 public:
  HTable(int n_cap, const QParam<Real>& q) : h_(n_cap + 1, std::vector<Real>(n_cap + 1, Real(0))) {
    h_[0][0] = Real(1);
    for (int n = 1; n <= n_cap; ++n) {
      Real qn1 = qnum(n - 1, q);
      for (int i = 1; i <= n; ++i) {
        Real v = qpow(q.q, n - i) * h_[n - 1][i - 1];
        if (i <= n - 1) v += (qnum(n - 1 - i, q) - qn1) * h_[n - 1][i];
        h_[n][i] = v;
      }
    }
  }
  int cap() const { return static_cast<int>(h_.size()) - 1; }
  const Real& operator()(int n, int i) const { return h_[n][i]; }

 private:
  std::vector<std::vector<Real>> h_;
};

template <class Real>
HTable<Real> h_table(int n_cap, const QParam<Real>& q) {
  return HTable<Real>(n_cap, q);
}

enum class OpIdentity {
  ShiftTdq,      // t^n (tD_q) = q^{-n} (tD_q - [n]_q) t^n
  CommuteT2dq,   // (t^2 D_q) t^{n-i} = q^{n-i} t^{n-i} (t^2 D_q) + [n-i]_q t^{n-i+1}
  HExpansion,    // t^n (tD_q)^n = q^{-n(n-1)/2} sum_i H_{n,i} t^{n-i} (t^2 D_q)^i
  BaseChange,    // tD_{q^n} = (q-1)/(q^n-1) sum_{i<n} ((q-1) tD_q + 1)^i (tD_q)
};

// Both sides of the selected identity applied to t^k; i is used by CommuteT2dq only.
template <class Real>
std::pair<TSeries<Real>, TSeries<Real>> op_identity_lhs_rhs(OpIdentity id, int n, int i, int k, const QParam<Real>& q,
                                                            int mt) {
  Truncation tr{mt, 0};
  TSeries<Real> tk = TSeries<Real>::monomial(tr, k);
  TruncationLoss loss;
  auto t2 = [&](const TSeries<Real>& s) { return t2dq_apply(s, q, &loss); };
  auto tdq = [&](const TSeries<Real>& s) { return tdq_apply(s, q); };
  auto tpow = [&](const TSeries<Real>& s, int e) { return shift(s, e, &loss); };
  switch (id) {
    case OpIdentity::ShiftTdq: {
      TSeries<Real> lhs = tpow(tdq(tk), n);
      TSeries<Real> tnk = tpow(tk, n);
      TSeries<Real> rhs = (tdq(tnk) - qnum(n, q) * tnk) * (Real(1) / qpow(q.q, n));
      return {lhs, rhs};
    }
    case OpIdentity::CommuteT2dq: {
      TSeries<Real> lhs = t2(tpow(tk, n - i));
      TSeries<Real> rhs = qpow(q.q, n - i) * tpow(t2(tk), n - i) + qnum(n - i, q) * tpow(tk, n - i + 1);
      return {lhs, rhs};
    }
    case OpIdentity::HExpansion: {
      TSeries<Real> lhs = tk;
      for (int r = 0; r < n; ++r) lhs = tdq(lhs);
      lhs = tpow(lhs, n);
      HTable<Real> h(n, q);
      TSeries<Real> rhs(tr);
      TSeries<Real> acc = tk;
      for (int r = 1; r <= n; ++r) {
        acc = t2(acc);
        rhs += h(n, r) * tpow(acc, n - r);
      }
      rhs *= Real(1) / qpow(q.q, n * (n - 1) / 2);
      return {lhs, rhs};
    }
    case OpIdentity::BaseChange: {
      QParam<Real> qn{qpow(q.q, n), Real(1) / qpow(q.q, n)};
      TSeries<Real> lhs = tdq_apply(tk, qn);
      TSeries<Real> inner = tdq(tk);
      TSeries<Real> rhs(tr);
      for (int r = 0; r < n; ++r) {
        rhs += inner;
        inner = (q.q - Real(1)) * tdq(inner) + inner;
      }
      rhs *= (q.q - Real(1)) / (qpow(q.q, n) - Real(1));
      return {lhs, rhs};
    }
  }
  throw SpecError("unknown identity");
}

// sum_{i,alpha} A_{i,alpha}(t,z) (t^2 D_q)^i d_z^alpha X0 = t^{m0} F0(t,z)
struct ReducedEquation {
  QParamd q{2.0, 0.5};
  double sigma = 1.0;
  int m = 1;
  int m0 = 0;
  int mu = 0;
  Truncation trunc;
  std::vector<Term> terms;  // Term::j holds the power i of (t^2 D_q)
  TSeries<> rhs;            // t^{m0} F0
  TruncationLoss loss;
};

// Head sum_{n<=mu} X_n t^n of a formal solution.
TSeries<> formal_head(const FormalSolution& sol, int mu);

// u0 = B[X - head] = sum_{n>=mu} X_{n+1} xi^n / [n]_q!
XiSeries<> borel_tail(const FormalSolution& sol, int mu, const QParamd& q);

ReducedEquation reduce(const Equation& eq, int mu, const TSeries<>& sol_head, double zero_tol = kZeroTol);

// Applies the reduced operator to a series.
TSeries<> apply_reduced(const ReducedEquation& red, const TSeries<>& x);

struct ConvTerm {
  int i = 0;
  int alpha = 0;
  XiSeries<> c;
  bool nested = false;  // wrapped as c *_q (1 *_q (xi^i d_z^alpha u))
};

// P(xi,z) u + sum c_{i,0} *_q (xi^i u) + sum c_{i,alpha} *_q (1 *_q (xi^i d_z^alpha u)) = f
struct ConvEquation {
  LambdaPoly P;  // coefficient i of xi^i
  std::vector<ConvTerm> conv_terms;
  XiSeries<> f;
  int m0 = 0;
  int m = 1;
  double sigma = 1.0;
  QParamd q{2.0, 0.5};
  Truncation trunc;
};

ConvEquation to_conv_equation(const ReducedEquation& red, double zero_tol = kZeroTol);

// Left side minus right side of the convolution equation at series level; columns 0..Mt-1 are meaningful.
XiSeries<> conv_residual_formal(const ConvEquation& ceq, const XiSeries<>& u);

// Transformed equation in tau = t^{1/2} over q1 = q^{1/4}, written in (tau D_{q1})^J normal form.
struct HalvedEquation {
  Equation tau_eq;
  QParamd q1{2.0, 0.5};
  AssumptionReport report;
};

// Coefficients of b(theta)^j where b(theta) = ((q1-1) theta^2 + 2 theta)/[4]_{q1}.
std::vector<double> halving_operator_power(int j, const QParamd& q1);

// Applies b(tau D_{q1})^j to a series in tau.
TSeries<> halving_apply(const TSeries<>& s, int j, const QParamd& q1);

// a(t) -> a(tau^2) with doubled truncation in tau.
TSeries<> spread_even(const TSeries<>& s);

HalvedEquation halve_variable(const Equation& eq);

}  // namespace qsum
