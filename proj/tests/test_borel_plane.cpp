#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <random>

#include "fixtures.hpp"

using namespace qsum;
using fixtures::borel_setup;
using fixtures::example25_acceptance;

namespace {

// Grid whose values come from an exact function of xi on every node.
RayGrid grid_from(cplx lambda, const QParamd& q, int k_min, int k_max, const XiSeries<>& taylor, double radius) {
  RayGrid g(lambda, q, k_min, taylor, radius);
  for (int k = k_min; k <= k_max; ++k) g.push(evaluate(taylor, g.node(k)));
  return g;
}

XiSeries<> entire_random(Truncation tr, int deg, const QParamd& q, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  XiSeries<> s(tr);
  for (int n = 0; n <= deg; ++n)
    for (int k = 0; k <= tr.mz; ++k) s(n, k) = cplx(d(rng), d(rng)) / qfactorial(n, q);
  return s;
}

}  // namespace

TEST_CASE("Jackson integral") {
  auto q = make_qparam(2.0);
  cplx xi(0.7, -0.4);
  CHECK(std::abs(jackson_integral([](cplx) { return cplx(1.0); }, xi, q, 1e-15) - xi) < 1e-14);
  cplx exact = (1.0 - q.p) * xi * xi / (1.0 - q.p * q.p);
  CHECK(std::abs(jackson_integral([](cplx y) { return y; }, xi, q, 1e-15) - exact) < 1e-14);
  auto f = [](cplx y) { return std::exp(y); };
  auto g = [](cplx y) { return y * y * y; };
  cplx c(0.3, 2.0);
  cplx lin = jackson_integral([&](cplx y) { return f(y) + c * g(y); }, xi, q, 1e-15);
  CHECK(std::abs(lin - jackson_integral(f, xi, q, 1e-15) - c * jackson_integral(g, xi, q, 1e-15)) < 1e-13);
  CHECK_THROWS_AS(jackson_integral([](cplx y) { return 1.0 / (y * y); }, xi, q, 1e-15, 200), NonconvergentTail);
}

TEST_CASE("numeric q-convolution on monomials") {
  auto q = make_qparam(2.0);
  Truncation tr{20, 0};
  ConvGridParams p;
  cplx lambda(0.3, 0.2);
  auto one = XiSeries<>::monomial(tr, 0);
  auto u1 = grid_from(lambda, q, -30, 4, one, 1e9);
  for (int k = -3; k <= 4; ++k) {
    cplx xi = u1.node(k);
    CHECK(std::abs(qconv_eval(one, u1, xi, p)(0) - xi) < 1e-8 * std::abs(xi));
  }
  for (int m = 0; m <= 4; ++m)
    for (int n = 0; n <= 4; ++n) {
      auto um = grid_from(lambda, q, -30, 4, XiSeries<>::monomial(tr, n), 1e9);
      double w = qfactorial(m, q) * qfactorial(n, q) / qfactorial(m + n + 1, q);
      for (int k = -2; k <= 2; ++k) {
        cplx xi = um.node(k);
        cplx expect = w * std::pow(xi, m + n + 1);
        CHECK(std::abs(qconv_eval(XiSeries<>::monomial(tr, m), um, xi, p)(0) - expect) <= 1e-8 * std::abs(expect));
      }
    }
  CHECK(zpoly_norm(qconv_eval(XiSeries<>(tr), u1, u1.node(0), p)) == 0.0);
  CHECK_THROWS_AS(qconv_eval(one, u1, u1.node(6), p), GridUnderflow);
  RayGrid small(lambda, q, 0, one, 0.1);
  small.push(one.coeff(0));
  CHECK_THROWS_AS(qconv_eval(one, small, 7.0 * lambda, p), TaylorTrustExceeded);
}

TEST_CASE("numeric convolution matches the formal convolution") {
  auto t0 = std::chrono::steady_clock::now();
  auto q = make_qparam(1.5);
  std::mt19937 rng(11);
  Truncation tr{40, 3};
  ConvGridParams p;
  std::uniform_real_distribution<double> ang(-3.1, 3.1);
  for (int c = 0; c < 50; ++c) {
    auto a = entire_random(tr, 15, q, rng);
    auto b = entire_random(tr, 15, q, rng);
    cplx lambda = std::polar(0.2, ang(rng));
    auto u = grid_from(lambda, q, -40, 3, b, 1e9);
    auto formal = formal_qconv(a, b, q);
    for (int k = -2; k <= 3; ++k) {
      cplx xi = u.node(k);
      ZPolyc num = qconv_eval(a, u, xi, p);
      ZPolyc ref = evaluate(formal, xi);
      CHECK(zpoly_norm<cplx>(num - ref) <= 1e-8 * std::max(1.0, zpoly_norm(ref)));
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 10.0);
}

TEST_CASE("majorant bounds for the convolution") {
  auto q = make_qparam(2.0);
  std::mt19937 rng(12);
  ConvGridParams p;
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int c = 0; c < 20; ++c) {
    const int m = c % 3, n = (c / 3) % 3;
    const double h0 = 0.5, h = 1.5, A = 2.0, B = 0.7;
    Truncation tr{30, 0};
    XiSeries<> a(tr), amaj(tr);
    for (int i = 0; m + i <= tr.mt; ++i) {
      double bound = A * std::pow(h0, i) / qfactorial(m + i, q);
      a(m + i, 0) = std::polar(bound * std::abs(d(rng)), 3.0 * d(rng));
      amaj(m + i, 0) = bound;
    }
    cplx xi = std::polar(0.5 + 2.0 * std::abs(d(rng)), 3.0 * d(rng));
    double r = std::abs(xi);
    // |u| <= B phi_n(|.|; h) on the inward nodes
    auto ug = [&](int s) {
      double x = std::pow(q.p, s) * r;
      return zpoly_constant<cplx>(0, B * phi({n, h, 1e-16}, x, q) * std::polar(1.0, 0.3 * s));
    };
    auto fg = [&](int s) { return zpoly_constant<cplx>(0, B * phi({n, h, 1e-16}, std::pow(q.p, s) * r, q)); };
    double lhs = std::abs(qconv_shifts(a, xi, ug, q, p)(0));
    double maj = std::abs(qconv_shifts(amaj, cplx(r), fg, q, p)(0));
    CHECK(lhs <= maj * (1 + 1e-12));
    CHECK(maj <= A * B / (1.0 - h0 / h) * phi({m + n + 1, h, 1e-16}, r, q) * (1 + 1e-10));
  }
}

TEST_CASE("continuation along the ray") {
  auto s = borel_setup(example25_acceptance(), 2);
  ConvGridParams p;
  const cplx lambda(2.0, 0.0);

  SUBCASE("zero data gives the zero grid") {
    auto ceq = s.ceq;
    ceq.f = XiSeries<>(ceq.trunc);
    auto u = continue_on_ray(ceq, lambda, -10, 9, p, XiSeries<>(ceq.trunc));
    double mx = 0.0;
    for (const auto& v : u.values()) mx = std::max(mx, zpoly_norm(v));
    CHECK(mx < 1e-12);
    auto cert = bound_check(u, 3, 1, 2);
    CHECK(cert.h == 1.0);
    CHECK(cert.C > 0.0);
  }

  SUBCASE("overlap with the Taylor seed") {
    auto u = continue_on_ray(s.ceq, lambda, -12, 9, p, s.u0);
    CHECK(u.taylor_radius() == doctest::Approx(0.5 * convergence_radius(s.u0)));
    for (int k = -11; std::abs(u.node(k)) <= 0.5 * u.taylor_radius(); ++k) {
      ZPolyc t = evaluate(s.u0, u.node(k));
      CHECK(zpoly_norm<cplx>(u.at(k) - t) <= 1e-8 * zpoly_norm(t));
    }
  }

  SUBCASE("residual and sensitivity") {
    auto u = continue_on_ray(s.ceq, lambda, -10, 9, p, s.u0);
    CHECK(residual_on_grid(s.ceq, u, p) < 1e-8);
    for (const auto& v : u.values()) CHECK(std::isfinite(zpoly_norm(v)));
    auto bent = u;
    bent.set(-3, u.at(-3) + zpoly_constant<cplx>(u.mz(), 1e-3));
    CHECK(residual_on_grid(s.ceq, bent, p) > 1e-5);
  }

  SUBCASE("Jackson tolerance and iterative mode agree") {
    auto u12 = continue_on_ray(s.ceq, lambda, -10, 9, p, s.u0);
    ConvGridParams p10 = p;
    p10.jackson_eps = 1e-10;
    auto u10 = continue_on_ray(s.ceq, lambda, -10, 9, p10, s.u0);
    ConvGridParams pit = p;
    pit.iterative = true;
    auto uit = continue_on_ray(s.ceq, lambda, -10, 9, pit, s.u0);
    for (int k = -10; k <= 9; ++k) {
      double sc = std::max(1.0, zpoly_norm(u12.at(k)));
      CHECK(zpoly_norm<cplx>(u12.at(k) - u10.at(k)) <= 1e-7 * sc);
      CHECK(zpoly_norm<cplx>(u12.at(k) - uit.at(k)) <= 1e-10 * sc);
    }
  }

  SUBCASE("bound fit") {
    auto u = continue_on_ray(s.ceq, lambda, -10, 9, p, s.u0);
    auto cert = bound_check(u, 3, 1, 2);
    CHECK(std::isfinite(cert.C));
    CHECK(std::isfinite(cert.h));
    for (double c : cert.checks) CHECK(c >= 1.0 - 1e-12);
  }

  SUBCASE("singular direction") {
    CHECK_THROWS_AS(continue_on_ray(s.ceq, cplx(-2.0, 0.0), -10, 3, p, s.u0), PivotTooSmall);
  }
}

TEST_CASE("bound fit recovers a synthetic profile") {
  auto q = make_qparam(2.0);
  const int N = 3, m0 = 1, m = 2;
  for (double h : {0.5, 2.0, 7.0}) {
    RayGrid u(cplx(0.0, 1.0), q, -8, XiSeries<>(Truncation{4, 0}), 1.0);
    for (int k = -8; k <= 10; ++k) {
      double r = std::abs(u.node(k));
      u.push(zpoly_constant<cplx>(0, phi({N, h, 1e-16}, r, q) / (std::pow(r, m0) * std::pow(1.0 + r, m - m0))));
    }
    auto cert = bound_check(u, N, m0, m);
    CHECK(cert.h >= h * (1.0 - 1e-12));
    CHECK(cert.h <= h * std::pow(10.0, 1.0 / 20.0) * (1.0 + 1e-12));
  }
}
