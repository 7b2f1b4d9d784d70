#pragma once

#include <string>
#include <vector>

#include "qsum/equation.hpp"

namespace qsum {

// What to do when P1([n]_q;0) vanishes.
enum class ResonancePolicy {
  Strict,            // throw ResonantIndex
  ZeroIfConsistent,  // set X_n = 0 when the right-hand side also vanishes, else throw
};

struct FormalOptions {
  double zero_tol = kZeroTol;
  ResonancePolicy resonance = ResonancePolicy::Strict;
};

struct FormalSolution {
  TSeries<> series;
  int n_max = 0;
  std::vector<int> resonant;  // indices fixed to zero under ZeroIfConsistent
};

FormalSolution solve_formal(const Equation& eq, int n_max, const FormalOptions& opts = {});

// X_{n+1} of the closed-form example: prod_{k<=n}([k]^2 + b d_z^alpha) / prod_{k<=n+1}([k]+1) applied to a/(1-z).
ZPolyc example53_oracle(int n, const QParamd& q, double a, double b, int alpha, int mz);

struct GevreyCertificate {
  enum class Kind { CoefficientGrowth, Asymptotic, RayBound };
  Kind kind = Kind::CoefficientGrowth;
  double C = 1.0;  // also M
  double h = 1.0;  // also H
  double R = 0.0;
  double rho = 0.0;
  std::vector<double> rates;   // r_n, or worst ratios per N
  std::vector<double> checks;  // bound / value slack per index, >= 1 when the inequality holds
  bool holds = true;
  std::string note;
};

double qgevrey_rate(double norm, int n, const QParamd& q);

GevreyCertificate growth_certificate(const FormalSolution& sol, const QParamd& q, double R, double rho);

}  // namespace qsum
