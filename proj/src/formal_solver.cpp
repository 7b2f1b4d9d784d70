#include "qsum/formal_solver.hpp"

#include <algorithm>
#include <cmath>

namespace qsum {

FormalSolution solve_formal(const Equation& eq, int n_max, const FormalOptions& opts) {
  if (n_max > eq.trunc.mt) throw SpecError("n_max exceeds Mt");
  for (const auto& t : eq.terms)
    if (t.alpha > 0 && zpoly_norm(t.coeff.coeff(0)) > opts.zero_tol)
      throw AssumptionViolated("a term with alpha > 0 has a nonzero t^0 coefficient; the recursion is implicit");

  const int mz = eq.trunc.mz;
  FormalSolution sol{TSeries<>(eq.trunc), n_max, {}};
  QTable<double> tab(eq.q, n_max);
  // d_z^alpha X_k, cached per alpha as X_k are produced
  const int amax = eq.max_alpha();
  std::vector<std::vector<ZPolyc>> dx(amax + 1);

  for (int n = 0; n <= n_max; ++n) {
    ZPolyc rhs = eq.rhs.coeff(n);
    ZPolyc pivot = zpoly_zero<cplx>(mz);
    for (const auto& t : eq.terms) {
      if (t.alpha == 0) pivot += t.coeff.coeff(0) * std::pow(tab.num(n), t.j);
      for (int l = 1; l <= n; ++l) {
        ZPolyc a = t.coeff.coeff(l);
        if (zpoly_norm(a) == 0.0) continue;
        rhs -= zpoly_mul<cplx>(a, dx[t.alpha][n - l]) * std::pow(tab.num(n - l), t.j);
      }
    }
    ZPolyc xn;
    if (std::abs(pivot(0)) < opts.zero_tol) {
      if (opts.resonance == ResonancePolicy::ZeroIfConsistent && zpoly_norm(rhs) < opts.zero_tol) {
        xn = zpoly_zero<cplx>(mz);
        sol.resonant.push_back(n);
      } else {
        throw ResonantIndex(n);
      }
    } else {
      xn = zpoly_div<cplx>(rhs, pivot);
    }
    sol.series.set_coeff(n, xn);
    for (int a = 0; a <= amax; ++a) dx[a].push_back(zpoly_derivative<cplx>(xn, a));
  }
  return sol;
}

ZPolyc example53_oracle(int n, const QParamd& q, double a, double b, int alpha, int mz) {
  ZPolyc g = ZPolyc::Constant(mz + 1, a);
  for (int k = 1; k <= n; ++k) {
    double qk = qnum(k, q);
    g = qk * qk * g + b * zpoly_derivative<cplx>(g, alpha);
  }
  for (int k = 1; k <= n + 1; ++k) g /= qnum(k, q) + 1.0;
  return g;
}

double qgevrey_rate(double norm, int n, const QParamd& q) {
  if (norm == 0.0) return 0.0;
  return std::exp((std::log(norm) - log_qfactorial(n, q)) / n);
}

GevreyCertificate growth_certificate(const FormalSolution& sol, const QParamd& q, double R, double rho) {
  if (!(rho < R) || !(rho > 0.0)) throw SpecError("growth certificate needs 0 < rho < R");
  GevreyCertificate cert;
  cert.kind = GevreyCertificate::Kind::CoefficientGrowth;
  cert.R = R;
  cert.rho = rho;
  const int n_max = sol.n_max;
  std::vector<double> norms(n_max + 1);
  for (int n = 0; n <= n_max; ++n) norms[n] = sup_norm(sol.series.coeff(n), rho);
  cert.rates.assign(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    cert.rates[n] = qgevrey_rate(norms[n], n, q);
    if (!std::isfinite(cert.rates[n])) throw GrowthExceeded("r_" + std::to_string(n) + " is not finite");
  }
  bool all_zero = std::all_of(norms.begin(), norms.end(), [](double v) { return v == 0.0; });
  if (all_zero) {
    cert.C = 1.0;
    cert.h = 1.0;
    cert.checks.assign(n_max + 1, std::numeric_limits<double>::infinity());
    cert.note = "zero formal solution; bound holds vacuously";
    return cert;
  }
  // r_n should settle; a window still rising geometrically means no finite h
  const int lo = std::max(1, n_max / 2);
  double h = 0.0;
  for (int n = lo; n <= n_max; ++n) h = std::max(h, cert.rates[n]);
  if (n_max - lo >= 4) {
    double first = cert.rates[lo], last = cert.rates[n_max];
    bool rising = true;
    for (int n = lo + 1; n <= n_max; ++n) rising = rising && cert.rates[n] > cert.rates[n - 1];
    if (rising && first > 0.0 && last > 2.0 * first)
      throw GrowthExceeded("r_n keeps growing over the tail window; no finite h");
  }
  if (h == 0.0) h = 1.0;
  h *= 1.05;
  double C = 0.0;
  for (int n = 0; n <= n_max; ++n)
    C = std::max(C, std::exp(std::log(norms[n]) - n * std::log(h) - log_qfactorial(n, q)));
  cert.C = C;
  cert.h = h;
  cert.checks.resize(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    double bound = C * std::exp(n * std::log(h) + log_qfactorial(n, q));
    cert.checks[n] = norms[n] == 0.0 ? std::numeric_limits<double>::infinity() : bound / norms[n];
    if (cert.checks[n] < 1.0 - 1e-12) cert.holds = false;
  }
  return cert;
}

}  // namespace qsum
