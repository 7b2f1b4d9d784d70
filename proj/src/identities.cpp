#include "qsum/identities.hpp"

#include "qsum/reduction.hpp"

namespace qsum {

namespace {

void record(IdentityFamily& f, bool ok, const std::string& what) {
  ++f.checks;
  if (ok) return;
  ++f.failures;
  if (f.failed.size() < 8) f.failed.push_back(what);
}

std::string qtag(const Rational& q) { return "q=" + q.str(); }

}  // namespace

IdentityReport run_identity_suite() {
  auto family = [](const char* name) {
    IdentityFamily f;
    f.name = name;
    return f;
  };
  IdentityFamily laplace = family("laplace_monomial"), borel = family("borel_monomial"),
                 conv = family("convolution_monomial"), base = family("base_change_scalar"),
                 shift = family("shift_tdq"), commute = family("commute_t2dq"), hexp = family("h_expansion"),
                 change = family("base_change_operator");
  const Rational qs[] = {Rational(3, 2), Rational(2)};
  for (const Rational& qv : qs) {
    auto q = make_qparam(qv);
    const int mt = 25;
    Truncation tr{mt, 0};
    QTable<Rational> tab(q, mt);
    for (int n = 0; n <= 12; ++n) {
      std::string tag = qtag(qv) + " n=" + std::to_string(n);
      auto L = formal_laplace(XiSeries<Rational>::monomial(tr, n), q);
      record(laplace, L == TSeries<Rational>::monomial(tr, n + 1, tab.fact(n)), tag);
      auto B = formal_borel(TSeries<Rational>::monomial(tr, n + 1), q);
      record(borel, B == XiSeries<Rational>::monomial(tr, n, Rational(1) / tab.fact(n)), tag);
    }
    for (int m = 0; m <= 12; ++m)
      for (int n = 0; n <= 12; ++n) {
        auto c = formal_qconv(XiSeries<Rational>::monomial(tr, m), XiSeries<Rational>::monomial(tr, n), q);
        Rational w = tab.fact(m) * tab.fact(n) / tab.fact(m + n + 1);
        record(conv, c == XiSeries<Rational>::monomial(tr, m + n + 1, w),
               qtag(qv) + " m=" + std::to_string(m) + " n=" + std::to_string(n));
      }
    for (int m = 0; m <= 6; ++m)
      for (int n = 1; n <= 4; ++n) {
        auto [l, r] = qnum_base_identity(m, n, q);
        record(base, l == r, qtag(qv) + " m=" + std::to_string(m) + " n=" + std::to_string(n));
      }
    for (int n = 1; n <= 5; ++n)
      for (int k = 0; k <= 8; ++k) {
        std::string tag = qtag(qv) + " n=" + std::to_string(n) + " k=" + std::to_string(k);
        auto [l1, r1] = op_identity_lhs_rhs(OpIdentity::ShiftTdq, n, 0, k, q, 24);
        record(shift, l1 == r1, tag);
        for (int i = 0; i <= n; ++i) {
          auto [l2, r2] = op_identity_lhs_rhs(OpIdentity::CommuteT2dq, n, i, k, q, 24);
          record(commute, l2 == r2, tag + " i=" + std::to_string(i));
        }
        auto [l3, r3] = op_identity_lhs_rhs(OpIdentity::HExpansion, n, 0, k, q, 24);
        record(hexp, l3 == r3, tag);
        auto [l4, r4] = op_identity_lhs_rhs(OpIdentity::BaseChange, n, 0, k, q, 24);
        record(change, l4 == r4, tag);
      }
  }
  return {{laplace, borel, conv, base, shift, commute, hexp, change}};
}

}  // namespace qsum
