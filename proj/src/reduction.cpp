#include "qsum/reduction.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace qsum {

TSeries<> formal_head(const FormalSolution& sol, int mu) {
  TSeries<> head(sol.series.trunc());
  for (int n = 0; n <= std::min(mu, sol.n_max); ++n) head.set_coeff(n, sol.series.coeff(n));
  return head;
}

XiSeries<> borel_tail(const FormalSolution& sol, int mu, const QParamd& q) {
  TSeries<> tail = sol.series - formal_head(sol, mu);
  return formal_borel(tail, q);
}

ReducedEquation reduce(const Equation& eq, int mu, const TSeries<>& sol_head, double zero_tol) {
  AssumptionReport rep = check_assumptions(eq, zero_tol);
  if (!rep.all()) {
    std::string msg = "reduction needs A1-A3 and cond_2_2";
    for (const auto& v : rep.violations) msg += "; " + v;
    throw AssumptionViolated(msg);
  }
  if (mu < 0) throw SpecError("mu must be nonnegative");
  ReducedEquation red;
  red.q = eq.q;
  red.sigma = eq.sigma;
  red.m = eq.m;
  red.m0 = *rep.m0;
  red.mu = mu;
  red.trunc = eq.trunc;
  const int m0 = red.m0;

  TSeries<> f0 = eq.rhs - apply_operator(eq, sol_head);
  red.rhs = shift(f0, m0, &red.loss);

  HTable<double> h(eq.m, eq.q);
  std::map<int, bool> alphas;
  for (const auto& t : eq.terms) alphas[t.alpha] = true;
  for (auto [alpha, unused] : alphas) {
    for (int i = 0; i <= eq.m; ++i) {
      TSeries<> s(eq.trunc);
      bool any = false;
      for (int j = i; j <= eq.m; ++j) {
        const Term* t = eq.find(j, alpha);
        if (!t || h(j, i) == 0.0) continue;
        s += (h(j, i) / std::pow(eq.q.q, 0.5 * j * (j - 1))) * t->coeff;
        any = true;
      }
      if (!any || ord_t(s, zero_tol) == kOrdInfinity) continue;
      TSeries<> a;
      try {
        a = shift(s, m0 - i, &red.loss, zero_tol);
      } catch (const OrderViolation&) {
        throw OrderViolation("A_{" + std::to_string(i) + "," + std::to_string(alpha) + "} is not divisible by t^" +
                             std::to_string(i - m0));
      }
      red.terms.push_back({i, alpha, a});
    }
  }

  // order claims of the reduction lemma
  LambdaPoly p0 = p0_polynomial(eq, zero_tol);
  for (const auto& t : red.terms) {
    int o = ord_t(t.coeff, zero_tol);
    int need = 0;
    if (t.j < m0) need = t.alpha == 0 ? m0 - t.j : m0 - t.j + 1;
    else if (t.alpha > 0) need = 2;
    if (o < need)
      throw OrderViolation("ord_t A_{" + std::to_string(t.j) + "," + std::to_string(t.alpha) + "} = " + std::to_string(o) +
                           " below " + std::to_string(need));
    if (t.alpha == 0 && t.j >= m0) {
      double diff = zpoly_norm(ZPolyc(t.coeff.coeff(0) - p0[t.j - m0]));
      if (diff > 1e-12 * (1.0 + zpoly_norm(p0[t.j - m0])))
        throw OrderViolation("A_{i,0}(0,z) differs from b_{i,0}(0,z)/q^{i(i-1)/2}");
    }
  }
  return red;
}

TSeries<> apply_reduced(const ReducedEquation& red, const TSeries<>& x) {
  TSeries<> r(x.trunc());
  for (const auto& t : red.terms) {
    TSeries<> y = dz_apply(x, t.alpha);
    for (int k = 0; k < t.j; ++k) y = t2dq_apply(y, red.q);
    r += mul(t.coeff, y);
  }
  return r;
}

ConvEquation to_conv_equation(const ReducedEquation& red, double zero_tol) {
  ConvEquation ceq;
  ceq.m0 = red.m0;
  ceq.m = red.m;
  ceq.sigma = red.sigma;
  ceq.q = red.q;
  ceq.trunc = red.trunc;
  ceq.P.assign(red.m + 1, zpoly_zero<cplx>(red.trunc.mz));
  for (const auto& t : red.terms) {
    TSeries<> src = t.coeff;
    if (t.alpha == 0) {
      if (t.j >= red.m0) {
        ceq.P[t.j] = t.coeff.coeff(0);
        src.set_coeff(0, zpoly_zero<cplx>(red.trunc.mz));
      }
    } else {
      src = shift(t.coeff, -1, nullptr, zero_tol);
    }
    if (ord_t(src, 0.0) == kOrdInfinity) continue;
    ceq.conv_terms.push_back({t.j, t.alpha, formal_borel(src, red.q, zero_tol), t.alpha > 0});
  }
  ceq.f = formal_borel(red.rhs, red.q, zero_tol);
  return ceq;
}

namespace {

XiSeries<> times_zpoly(const XiSeries<>& s, const ZPolyc& p) {
  XiSeries<> r(s.trunc());
  for (int n = 0; n <= s.mt(); ++n) r.set_coeff(n, zpoly_mul<cplx>(s.coeff(n), p));
  return r;
}

}  // namespace

XiSeries<> conv_residual_formal(const ConvEquation& ceq, const XiSeries<>& u) {
  XiSeries<> r(u.trunc());
  for (int i = 0; i < static_cast<int>(ceq.P.size()); ++i)
    if (zpoly_norm(ceq.P[i]) > 0.0) r += times_zpoly(shift(u, i), ceq.P[i]);
  XiSeries<> one = XiSeries<>::monomial(u.trunc(), 0);
  for (const auto& ct : ceq.conv_terms) {
    XiSeries<> g = dz_apply(shift(u, ct.i), ct.alpha);
    if (ct.nested) g = formal_qconv(one, g, ceq.q);
    r += formal_qconv(ct.c, g, ceq.q);
  }
  return r - ceq.f;
}

std::vector<double> halving_operator_power(int j, const QParamd& q1) {
  double q4 = qnum(4, q1);
  std::vector<double> b{0.0, 2.0 / q4, (q1.q - 1.0) / q4};
  std::vector<double> r{1.0};
  for (int k = 0; k < j; ++k) {
    std::vector<double> next(r.size() + 2, 0.0);
    for (size_t a = 0; a < r.size(); ++a)
      for (size_t c = 0; c < b.size(); ++c) next[a + c] += r[a] * b[c];
    r = next;
  }
  return r;
}

TSeries<> halving_apply(const TSeries<>& s, int j, const QParamd& q1) {
  double q4 = qnum(4, q1);
  TSeries<> r = s;
  for (int k = 0; k < j; ++k) {
    TSeries<> th = tdq_apply(r, q1);
    r = ((q1.q - 1.0) / q4) * tdq_apply(th, q1) + (2.0 / q4) * th;
  }
  return r;
}

TSeries<> spread_even(const TSeries<>& s) {
  TSeries<> r(Truncation{2 * s.mt(), s.mz()});
  for (int n = 0; n <= s.mt(); ++n) r.set_coeff(2 * n, s.coeff(n));
  return r;
}

HalvedEquation halve_variable(const Equation& eq) {
  HalvedEquation out;
  out.q1 = make_qparam(std::pow(eq.q.q, 0.25));
  Equation& te = out.tau_eq;
  te.q = out.q1;
  te.sigma = 2.0 * eq.sigma;
  te.m = 2 * eq.m;
  te.trunc = Truncation{2 * eq.trunc.mt, eq.trunc.mz};
  te.rhs = spread_even(eq.rhs);
  std::map<std::pair<int, int>, TSeries<>> acc;
  for (const auto& t : eq.terms) {
    TSeries<> a = spread_even(t.coeff);
    std::vector<double> beta = halving_operator_power(t.j, out.q1);
    for (int J = 0; J < static_cast<int>(beta.size()); ++J) {
      if (beta[J] == 0.0) continue;
      auto key = std::make_pair(J, t.alpha);
      auto it = acc.find(key);
      if (it == acc.end()) acc.emplace(key, beta[J] * a);
      else it->second += beta[J] * a;
    }
  }
  for (auto& [key, coeff] : acc) te.terms.push_back({key.first, key.second, coeff});
  validate(te);

  out.report = check_assumptions(te);
  auto orig = newton_polygon(eq);
  if (orig.m0) {
    NewtonPolygon np = newton_polygon(te);
    if (!np.m0 || *np.m0 != 2 * *orig.m0)
      throw OrderViolation("transformed Newton polygon is not x <= 2m, y >= max(0, x - 2 m0)");
  }
  for (const auto& t : te.terms)
    for (int n = 1; n <= te.trunc.mt; n += 2)
      if (zpoly_norm(t.coeff.coeff(n)) != 0.0) throw OrderViolation("transformed coefficient has an odd tau power");
  return out;
}

}  // namespace qsum
