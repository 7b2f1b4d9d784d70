#pragma once

#include <random>

#include "qsum/equation.hpp"

namespace fixtures {

using namespace qsum;

inline TSeries<> tmono(Truncation tr, int n, cplx c = 1.0, int zk = 0) { return TSeries<>::monomial(tr, n, c, zk); }

// a t (tD_q)^2 X + b (tD_q) X + c X + t^{n1} d_z^{alpha1} (tD_q) X + t^{n0} d_z^{alpha0} X = F
inline Equation example25(double a, double b, double c, int n1, int n0, double q, Truncation tr, TSeries<> F,
                          int alpha1 = 1, int alpha0 = 1) {
  Equation eq;
  eq.q = make_qparam(q);
  eq.sigma = 1.0;
  eq.m = 2;
  eq.trunc = tr;
  eq.terms.push_back({2, 0, tmono(tr, 1, a)});
  eq.terms.push_back({1, 0, tmono(tr, 0, b)});
  if (c != 0.0) eq.terms.push_back({0, 0, tmono(tr, 0, c)});
  eq.terms.push_back({1, alpha1, tmono(tr, n1)});
  eq.terms.push_back({0, alpha0, tmono(tr, n0)});
  eq.rhs = std::move(F);
  return eq;
}

inline Equation example25_acceptance() {
  Truncation tr{24, 12};
  return example25(1.0, 1.0, 0.0, 2, 1, 2.0, tr, tmono(tr, 1));
}

// (tD_q + 1) X - t (tD_q)^2 X - b t d_z^alpha X = a t / (1 - z)
inline Equation example53(double a, double b, int alpha, double q, Truncation tr) {
  Equation eq;
  eq.q = make_qparam(q);
  eq.sigma = 1.0;
  eq.m = 2;
  eq.trunc = tr;
  eq.terms.push_back({1, 0, tmono(tr, 0)});
  eq.terms.push_back({0, 0, tmono(tr, 0)});
  eq.terms.push_back({2, 0, tmono(tr, 1, -1.0)});
  eq.terms.push_back({0, alpha, tmono(tr, 1, -b)});
  eq.rhs = TSeries<>(tr);
  for (int k = 0; k <= tr.mz; ++k) eq.rhs(1, k) = a;
  return eq;
}

template <class V>
V random_series(Truncation tr, std::mt19937& rng, bool zero_constant = false) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  V s(tr);
  for (int n = zero_constant ? 1 : 0; n <= tr.mt; ++n)
    for (int k = 0; k <= tr.mz; ++k) s(n, k) = cplx(d(rng), d(rng));
  return s;
}

}  // namespace fixtures

#include "qsum/borel_plane.hpp"

namespace fixtures {

struct BorelSetup {
  Equation eq;
  FormalSolution sol;
  ReducedEquation red;
  ConvEquation ceq;
  XiSeries<> u0;
  int mu = 0;
};

inline BorelSetup borel_setup(const Equation& eq, int mu) {
  BorelSetup s;
  s.eq = eq;
  s.mu = mu;
  FormalOptions opts;
  opts.resonance = ResonancePolicy::ZeroIfConsistent;
  s.sol = solve_formal(eq, eq.trunc.mt, opts);
  s.red = reduce(eq, mu, formal_head(s.sol, mu));
  s.ceq = to_conv_equation(s.red);
  s.u0 = borel_tail(s.sol, mu, eq.q);
  return s;
}

}  // namespace fixtures
