#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <random>

#include "fixtures.hpp"
#include "qsum/laplace.hpp"

using namespace qsum;
using fixtures::borel_setup;
using fixtures::example25_acceptance;

namespace {

const std::vector<double> kEps{0.1, 0.05};

// exp_q-type entire series sum h^n xi^n / [n]_q!
XiSeries<> exp_like(Truncation tr, double h, const QParamd& q) {
  XiSeries<> s(tr);
  for (int n = 0; n <= tr.mt; ++n) s(n, 0) = std::exp(n * std::log(h) - log_qfactorial(n, q));
  return s;
}

struct Ex25Run {
  fixtures::BorelSetup s;
  RayGrid u;
};

const Ex25Run& ex25_run() {
  static const Ex25Run run = [] {
    Ex25Run r{borel_setup(example25_acceptance(), 2), {}};
    r.u = continue_on_ray(r.s.ceq, cplx(2.0, 0.0), -12, 26, ConvGridParams{}, r.s.u0);
    return r;
  }();
  return run;
}

}  // namespace

TEST_CASE("spiral set") {
  for (double qv : {1.2, 2.0, 3.0}) {
    auto q = make_qparam(qv);
    double thr = (qv - 1.0) / (qv + 1.0);
    CHECK(SpiralSet{cplx(1.0, 0.5), q, thr * 0.99}.disjoint());
    CHECK_FALSE(SpiralSet{cplx(1.0, 0.5), q, thr * 1.01}.disjoint());
    SpiralSet z{cplx(1.0, 0.5), q, 0.02};
    for (int m = -5; m <= 5; ++m) {
      CHECK(z.contains(z.pole(m)));
      CHECK(z.contains(z.pole(m) * cplx(1.0, 0.015)));
      CHECK_FALSE(z.contains(z.pole(m) * cplx(1.0, 0.03)));
      CHECK_FALSE(z.contains(-z.pole(m)));
    }
  }
}

TEST_CASE("q-Laplace transform of monomials") {
  auto q = make_qparam(2.0);
  Truncation tr{8, 0};
  cplx lambda = std::polar(1.5, 0.7);
  for (int n = 0; n <= 5; ++n) {
    auto u = grid_from_series(XiSeries<>::monomial(tr, n), lambda, q, -30, 30);
    for (double s = 0.05; s <= 0.2 + 1e-12; s += 0.05) {
      cplx t = s * lambda;
      cplx expect = qfactorial(n, q) * std::pow(t, n + 1);
      CHECK(std::abs(qlaplace(u, t, 0.0) - expect) <= 1e-6 * std::abs(expect));
    }
  }
  auto zero = grid_from_series(XiSeries<>(tr), lambda, q, -10, 10);
  CHECK(qlaplace(zero, 0.1 * lambda, 0.0) == 0.0);
  auto a = grid_from_series(exp_like(Truncation{30, 0}, 0.5, q), lambda, q, -30, 30);
  auto b = grid_from_series(XiSeries<>::monomial(Truncation{30, 0}, 2), lambda, q, -30, 30);
  RayGrid ab(lambda, q, -30, exp_like(Truncation{30, 0}, 0.5, q) + cplx(2.0, -1.0) * XiSeries<>::monomial(Truncation{30, 0}, 2),
             1e300);
  for (int k = -30; k <= 30; ++k) ab.push(a.at(k) + cplx(2.0, -1.0) * b.at(k));
  cplx t = 0.1 * lambda * std::polar(1.0, 0.4);
  CHECK(std::abs(qlaplace(ab, t, 0.0) - qlaplace(a, t, 0.0) - cplx(2.0, -1.0) * qlaplace(b, t, 0.0)) <
        1e-12 * std::abs(qlaplace(ab, t, 0.0)));
  CHECK_THROWS_AS(qlaplace(a, SpiralSet{lambda, q, 0.02}.pole(-3) * 1.001, 0.0), PoleProximity);
  auto short_grid = grid_from_series(XiSeries<>::monomial(tr, 3), lambda, q, -30, -2);
  CHECK_THROWS_AS(qlaplace(short_grid, 0.1 * lambda, 0.0), TailNotConverged);
}

TEST_CASE("numeric q-Borel transform") {
  auto q = make_qparam(2.0);
  cplx lambda = std::polar(0.8, -1.1);
  for (int n = 0; n <= 6; ++n)
    for (int k = -4; k <= 4; ++k) {
      cplx xi = lambda * std::pow(2.0, k);
      cplx v = qborel_numeric([&](cplx t) { return std::pow(t, n + 1); }, lambda, k, q);
      cplx expect = std::pow(xi, n) / qfactorial(n, q);
      CHECK(std::abs(v - expect) <= 1e-10 * std::abs(expect));
    }
  CHECK(qborel_numeric([](cplx) { return cplx(0.0); }, lambda, 0, q) == 0.0);
}

TEST_CASE("inversion formulas") {
  auto t0 = std::chrono::steady_clock::now();
  const auto& run = ex25_run();
  const RayGrid& u = run.u;
  const auto& q = u.q();
  // Borel of Laplace on the continued grid
  for (int k = -10; k <= 5; ++k) {
    auto F = [&](cplx t) { return qlaplace_zpoly(u, t); };
    ZPolyc back = qborel_contour<ZPolyc>(F, u.lambda(), k, q, [](const ZPolyc& v) { return zpoly_norm(v); });
    CHECK(zpoly_norm<cplx>(back - u.at(k)) <= 1e-6 * zpoly_norm(u.at(k)));
  }

  // Laplace of Borel for F with a simple pole on the spiral set
  cplx lambda = u.lambda();
  cplx c = lambda * (q.q - 1.0);
  auto F = [&](cplx t) { return t / (1.0 + t / c) + 0.5 * t * t * t; };
  Truncation tr{80, 0};
  XiSeries<> taylor(tr);
  for (int n = 0; n <= tr.mt; ++n) taylor(n, 0) = std::pow(-1.0 / c, n) * std::exp(-log_qfactorial(n, q));
  taylor(2, 0) += 0.5 / qfactorial(2, q);
  RayGrid b(lambda, q, -6, taylor, 1.0);
  for (int k = -6; k <= 30; ++k) b.push(zpoly_constant<cplx>(0, qborel_numeric(F, lambda, k, q)));
  auto samples = make_t_samples(lambda, q, TSampleSpec{0.01, 0.1, 10, {0.3, -0.3}}, kEps);
  REQUIRE(samples.size() == 20);
  for (cplx t : samples) CHECK(std::abs(qlaplace(b, t, 0.0) - F(t)) <= 1e-5 * std::abs(F(t)));

  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 30.0);
}

TEST_CASE("convolution theorem") {
  const auto& run = ex25_run();
  auto samples = make_t_samples(run.u.lambda(), run.u.q(), TSampleSpec{0.02, 0.2, 6, {0.3, -0.3}}, kEps);
  std::vector<cplx> zs{0.0, 0.3, cplx(0.0, -0.4)};
  auto one = XiSeries<>::monomial(run.s.ceq.trunc, 0);
  CHECK(convolution_theorem_check(one, run.u, samples, zs) < 1e-6);
  for (const auto& ct : run.s.ceq.conv_terms) CHECK(convolution_theorem_check(ct.c, run.u, samples, zs) < 1e-5);
  CHECK(convolution_theorem_check(XiSeries<>(run.s.ceq.trunc), run.u, samples, zs) == 0.0);
}

TEST_CASE("entire growth equivalence") {
  auto q = make_qparam(2.0);
  std::vector<cplx> e;
  for (int n = 0; n <= 60; ++n) e.push_back(std::exp(-log_qfactorial(n, q)));
  auto r = entire_growth_check(e, q);
  CHECK_FALSE(r.refuted);
  CHECK(r.A == doctest::Approx(1.0));
  CHECK(r.H == doctest::Approx(1.0));
  CHECK(r.alpha == doctest::Approx(-0.5 + std::log(q.q - 1.0) / std::log(q.q)).epsilon(0.05));

  std::vector<cplx> ones(30, 1.0);
  CHECK(entire_growth_check(ones, q).refuted);

  const auto& run = ex25_run();
  std::vector<cplx> f;
  for (int n = 0; n <= run.s.ceq.f.mt(); ++n) f.push_back(run.s.ceq.f(n, 0));
  auto rf = entire_growth_check(f, q);
  CHECK(std::isfinite(rf.A));
  CHECK(std::isfinite(rf.H));
}

TEST_CASE("pole bound near the spiral") {
  auto q = make_qparam(2.0);
  cplx lambda = std::polar(1.0, 0.4);
  auto u = grid_from_series(exp_like(Truncation{60, 0}, 0.7, q), lambda, q, -20, 30);
  std::vector<double> H;
  for (double eps : {0.2, 0.1, 0.05}) {
    SpiralSet z{lambda, q, eps};
    double worst = 0.0;
    for (int m = -8; m <= -3; ++m)
      for (int a = 0; a < 8; ++a) {
        cplx t = z.pole(m) * (1.0 + 1.05 * eps * std::polar(1.0, 2.0 * M_PI * a / 8));
        if (z.contains(t)) continue;
        worst = std::max(worst, std::abs(qlaplace(u, t, 0.0, LaplaceTruncation{1e-14, 1e-16, 1e-10, 0.01})) * eps / std::abs(t));
      }
    H.push_back(worst);
  }
  CHECK(H[2] <= 2.0 * H[0]);
}

TEST_CASE("Watson lemma") {
  auto q = make_qparam(2.0);
  cplx lambda(1.0, 0.0);
  auto samples = make_t_samples(lambda, q, TSampleSpec{}, kEps);
  Truncation tr{40, 0};
  auto c = exp_like(tr, 1.0, q);
  auto u = grid_from_series(c, lambda, q, -10, 30);
  auto rep = watson_check(u, c, 8, kEps, samples);
  CHECK(std::isfinite(rep.conclusion.C));
  CHECK(std::isfinite(rep.conclusion.h));
  for (double v : rep.conclusion.checks) CHECK(v >= 1.0 - 1e-9);

  auto mono = XiSeries<>::monomial(tr, 2);
  auto um = grid_from_series(mono, lambda, q, -10, 30);
  auto rm = watson_check(um, mono, 6, kEps, samples);
  for (int N = 3; N <= 6; ++N) CHECK(rm.conclusion.rates[N] <= 1e-6 * rm.conclusion.rates[2]);

  // growth hypothesis fails for values beyond the q-factorial scale
  RayGrid wild(lambda, q, 0, XiSeries<>(tr), 0.5);
  for (int k = 0; k <= 20; ++k) wild.push(zpoly_constant<cplx>(0, std::exp(0.5 * k * k) * qfactorial(k, q)));
  CHECK_THROWS_AS(watson_check(wild, XiSeries<>(tr), 4, kEps, samples), std::exception);
}

TEST_CASE("summed solution of the model equation") {
  auto t0 = std::chrono::steady_clock::now();
  const auto& run = ex25_run();
  const auto& eq = run.s.eq;
  auto W = sum_solution(eq, run.s.sol, run.u, run.s.mu);
  auto ts = make_t_samples(W.lambda(), W.q(), TSampleSpec{0.01, 0.1, 10, {0.3, -0.3}}, kEps);
  REQUIRE(ts.size() == 20);
  std::vector<TZSample> samples;
  for (size_t i = 0; i < ts.size(); ++i) samples.push_back({ts[i], std::polar(0.3, 0.7 * i)});
  double res = residual_in_equation(eq, W, samples);
  CHECK(res < 1e-4);

  auto bent = [&](cplx t) { return ZPolyc(W.eval_zpoly(t) + zpoly_constant<cplx>(eq.trunc.mz, 1e-3 * t)); };
  CHECK(residual_in_equation(eq, bent, samples) > 100.0 * res);

  std::vector<PlotRow> plot;
  auto cert = gevrey_verify(W, run.s.sol, kEps, 8, ts, 0.5, &plot);
  CHECK(std::isfinite(cert.C));
  CHECK(std::isfinite(cert.h));
  CHECK(cert.holds);
  CHECK(plot.size() == 2 * ts.size());
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 60.0);
}

TEST_CASE("summed solution edge cases") {
  Truncation tr{6, 2};
  auto eq = example25_acceptance();
  FormalSolution sol{TSeries<>(eq.trunc), eq.trunc.mt, {}};
  sol.series(0, 0) = 1.0;
  sol.series(1, 1) = 2.0;
  sol.series(2, 0) = -0.5;
  RayGrid zero(cplx(2.0, 0.0), eq.q, -5, XiSeries<>(eq.trunc), 1.0);
  for (int k = -5; k <= 5; ++k) zero.push(zpoly_zero<cplx>(eq.trunc.mz));
  auto W = sum_solution(eq, sol, zero, 2);
  cplx t(0.03, 0.02);
  CHECK(zpoly_norm<cplx>(W.eval_zpoly(t) - evaluate(sol.series, t)) < 1e-15);
  auto cert = gevrey_verify(W, sol, kEps, 6, make_t_samples(W.lambda(), W.q(), TSampleSpec{}, kEps));
  for (int N = 3; N <= 6; ++N) CHECK(cert.rates[N] == 0.0);

  // the truncated formal solution leaves only a truncation-order residual at tiny t
  const auto& run = ex25_run();
  auto poly = [&](cplx s) { return evaluate(run.s.sol.series, s); };
  std::vector<TZSample> tiny{{cplx(1e-6, 1e-7), 0.2}, {cplx(-5e-7, 8e-7), cplx(0.0, 0.3)}};
  CHECK(residual_in_equation(run.s.eq, poly, tiny) < 1e-12);
}
