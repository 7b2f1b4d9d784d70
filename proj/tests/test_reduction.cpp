#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "qsum/reduction.hpp"

using namespace qsum;
using fixtures::example25;
using fixtures::tmono;

namespace {

FormalSolution solve(const Equation& eq) {
  FormalOptions opts;
  opts.resonance = ResonancePolicy::ZeroIfConsistent;
  return solve_formal(eq, eq.trunc.mt, opts);
}

}  // namespace

TEST_CASE("H table") {
  for (double qv : {1.5, 2.0, 3.0}) {
    auto h = h_table(6, make_qparam(qv));
    for (int n = 1; n <= 6; ++n) CHECK(h(n, n) == doctest::Approx(1.0));
    CHECK(h(1, 1) == 1.0);
    CHECK(h(2, 1) == doctest::Approx(-1.0));
  }
  // t^2 (tD_q)^2 t^m = [m]^2 t^{m+2}: the n = 2 expansion must give q^{-1}(H21 [m] + H22 q [m][m+1]) = [m]^2
  auto q = make_qparam(Rational(3, 2));
  auto h = h_table(2, q);
  for (int m = 0; m <= 8; ++m) {
    Rational lhs = qnum(m, q) * qnum(m, q);
    Rational rhs = (h(2, 1) * qnum(m, q) + h(2, 2) * qnum(m, q) * qnum(m + 1, q)) / q.q;
    CHECK(lhs == rhs);
  }
}

TEST_CASE("operator identities on monomials, exact") {
  for (Rational qv : {Rational(3, 2), Rational(2)}) {
    auto q = make_qparam(qv);
    for (int n = 1; n <= 5; ++n)
      for (int k = 0; k <= 8; ++k) {
        auto [l1, r1] = op_identity_lhs_rhs(OpIdentity::ShiftTdq, n, 0, k, q, 24);
        CHECK(l1 == r1);
        for (int i = 0; i <= n; ++i) {
          auto [l2, r2] = op_identity_lhs_rhs(OpIdentity::CommuteT2dq, n, i, k, q, 24);
          CHECK(l2 == r2);
        }
        auto [l3, r3] = op_identity_lhs_rhs(OpIdentity::HExpansion, n, 0, k, q, 24);
        CHECK(l3 == r3);
      }
    for (int n = 1; n <= 5; ++n)
      for (int k = 0; k <= 8; ++k) {
        auto [l4, r4] = op_identity_lhs_rhs(OpIdentity::BaseChange, n, 0, k, q, 24);
        CHECK(l4 == r4);
        // on t^k this is the scalar identity [k]_{q^n} = sum_i q^{ik} [k]_q / [n]_q
        CHECK(l4(k, 0) == qnum_base_identity(k, n, q).first);
      }
  }
  auto q = make_qparam(Rational(2));
  auto [l, r] = op_identity_lhs_rhs(OpIdentity::ShiftTdq, 1, 0, 5, q, 12);
  CHECK(l == TSeries<Rational>::monomial(Truncation{12, 0}, 6, qnum(5, q)));
  auto [l0, r0] = op_identity_lhs_rhs(OpIdentity::ShiftTdq, 3, 0, 0, q, 12);
  CHECK(l0 == TSeries<Rational>(Truncation{12, 0}));
  CHECK(r0 == l0);
}

TEST_CASE("reduction of the model equation") {
  Truncation tr{20, 10};
  auto eq = example25(1.0, 1.0, 0.0, 2, 1, 2.0, tr, tmono(tr, 1));
  auto sol = solve(eq);
  const int mu = 2;
  auto head = formal_head(sol, mu);
  auto red = reduce(eq, mu, head);
  CHECK(red.m0 == 1);

  auto p0 = p0_polynomial(eq);
  for (const auto& t : red.terms)
    if (t.alpha == 0 && t.j >= red.m0)
      CHECK(zpoly_norm<cplx>(t.coeff.coeff(0) - p0[t.j - red.m0]) < 1e-14);

  // the reduced operator applied to the tail reproduces t^{m0} F0 below the truncation edge
  auto x0 = sol.series - head;
  auto res = apply_reduced(red, x0) - red.rhs;
  std::vector<double> term_scale(tr.mt + 1, 1.0);
  for (const auto& t : red.terms) {
    ReducedEquation one = red;
    one.terms = {t};
    auto part = apply_reduced(one, x0);
    for (int n = 0; n <= tr.mt; ++n) term_scale[n] = std::max(term_scale[n], zpoly_norm(part.coeff(n)));
  }
  const int edge = tr.mt - red.m;
  for (int n = 0; n <= edge; ++n) CHECK(zpoly_norm(res.coeff(n)) <= 1e-10 * term_scale[n]);

  auto ceq = to_conv_equation(red);
  for (std::size_t r = 0; r < p0.size(); ++r) CHECK(zpoly_norm<cplx>(ceq.P[red.m0 + r] - p0[r]) < 1e-12);
  for (int i = 0; i < red.m0; ++i) CHECK(zpoly_norm(ceq.P[i]) == 0.0);
  for (const auto& ct : ceq.conv_terms) CHECK(ct.nested == (ct.alpha > 0));

  auto u = borel_tail(sol, mu, eq.q);
  auto cres = conv_residual_formal(ceq, u);
  double scale = 0.0;
  for (int n = 0; n <= edge; ++n) scale = std::max(scale, zpoly_norm(ceq.f.coeff(n)));
  for (int n = 0; n < edge; ++n) CHECK(zpoly_norm(cres.coeff(n)) <= 1e-10 * std::max(1.0, scale));

  // c coefficients are Borel images: c_n [n]_q! recovers the t-series
  for (const auto& ct : ceq.conv_terms)
    for (int n = 0; n + 1 <= tr.mt; ++n)
      CHECK(std::isfinite(zpoly_norm(ct.c.coeff(n)) * qfactorial(n, eq.q)));
}

TEST_CASE("reduction preconditions and zero data") {
  Truncation tr{12, 6};
  auto eq = example25(1.0, 1.0, 0.0, 1, 1, 2.0, tr, tmono(tr, 1));
  auto sol = solve(eq);
  CHECK_THROWS_AS(reduce(eq, 2, formal_head(sol, 2)), AssumptionViolated);

  auto z = example25(1.0, 1.0, 0.0, 2, 1, 2.0, tr, TSeries<>(tr));
  auto zs = solve(z);
  CHECK(max_abs(zs.series) == 0.0);
  auto ceq = to_conv_equation(reduce(z, 2, formal_head(zs, 2)));
  CHECK(max_abs(ceq.f) == 0.0);
}

TEST_CASE("halving the variable") {
  auto q1 = make_qparam(std::pow(2.0, 0.25));
  auto q = make_qparam(2.0);
  Truncation tr{20, 2};
  for (int n = 0; n <= 10; ++n) {
    auto b = halving_apply(TSeries<>::monomial(tr, 2 * n), 1, q1);
    CHECK(max_abs(b - TSeries<>::monomial(tr, 2 * n, qnum(n, q))) < 1e-12 * (1.0 + qnum(n, q)));
    auto b2 = halving_apply(TSeries<>::monomial(tr, 2 * n), 2, q1);
    CHECK(max_abs(b2 - TSeries<>::monomial(tr, 2 * n, std::pow(qnum(n, q), 2))) < 1e-12 * (1.0 + std::pow(qnum(n, q), 2)));
  }

  Truncation t12{12, 8};
  auto eq = example25(1.0, 1.0, 0.0, 1, 1, 2.0, t12, tmono(t12, 1));
  CHECK_FALSE(check_assumptions(eq).cond_2_2);
  auto hv = halve_variable(eq);
  CHECK(hv.report.a1);
  CHECK(hv.report.a2);
  CHECK(hv.report.a3);
  CHECK(hv.report.cond_2_2);
  REQUIRE(hv.report.m0.has_value());
  CHECK(*hv.report.m0 == 2);
  for (const auto& t : hv.tau_eq.terms)
    for (int n = 1; n <= hv.tau_eq.trunc.mt; n += 2) CHECK(zpoly_norm(t.coeff.coeff(n)) == 0.0);

  auto x = solve(eq);
  auto y = solve(hv.tau_eq);
  for (int n = 0; n <= hv.tau_eq.trunc.mt; ++n) {
    ZPolyc expect = n % 2 == 0 ? ZPolyc(x.series.coeff(n / 2)) : zpoly_zero<cplx>(t12.mz);
    CHECK(zpoly_norm<cplx>(y.series.coeff(n) - expect) <= 1e-12 * std::max(1.0, zpoly_norm(expect)));
  }
}
