#pragma once

#include <functional>
#include <numbers>
#include <vector>

#include "qsum/borel_plane.hpp"
#include "qsum/fit.hpp"

namespace qsum {

// Poles -lambda (q-1) q^m and their relative neighborhoods |t + lambda (q-1) q^m| < eps |t|.
struct SpiralSet {
  cplx lambda{1.0, 0.0};
  QParamd q{2.0, 0.5};
  double eps = 0.02;

  cplx pole(int m) const { return -lambda * (q.q - 1.0) * std::pow(q.q, m); }
  int nearest_index(cplx t) const;
  bool contains(cplx t) const;
  // Adjacent excluded disks do not meet.
  bool disjoint() const;
};

struct LaplaceTruncation {
  double lower_rel = 1e-14;
  double exp_floor = 1e-16;
  double upper_rel = 1e-10;
  double eps_guard = 0.02;
  int max_lower_terms = 4000;
};

struct LaplaceTails {
  double lower = 0.0;
  double upper = 0.0;
};

// sum_m Exp_q(-q lambda q^m / t) u(lambda q^m) lambda (q-1) q^m
ZPolyc qlaplace_zpoly(const RayGrid& u, cplx t, const LaplaceTruncation& tr = {}, LaplaceTails* tails = nullptr);
cplx qlaplace(const RayGrid& u, cplx t, cplx z, const LaplaceTruncation& tr = {});

// Radius of the Borel contour for xi = lambda q^k, between consecutive poles of the spiral.
double borel_contour_radius(cplx lambda, int k, const QParamd& q);

struct ContourOptions {
  int n_nodes = 256;
  double rel_tol = 1e-10;
};

// (1/2 pi i) contour integral of F(t) exp_q(xi/t) dt/t^2 at xi = lambda q^k.
template <class V>
V qborel_contour(const std::function<V(cplx)>& F, cplx lambda, int k, const QParamd& q,
                 const std::function<double(const V&)>& mag, const ContourOptions& opts = {}) {
  const double rho = borel_contour_radius(lambda, k, q);
  const cplx xi = lambda * std::pow(q.q, k);
  double peak = 0.0;
  auto rule = [&](int n, double offset) {
    V acc{};
    for (int j = 0; j < n; ++j) {
      cplx t = std::polar(rho, 2.0 * std::numbers::pi * (j + offset) / n);
      V v = F(t) * (exp_q(xi / t, q) / t);
      peak = std::max(peak, mag(v));
      if (j == 0) acc = v;
      else acc += v;
    }
    return V(acc / double(n));
  };
  const int n = opts.n_nodes;
  V coarse = rule(n, 0.5);
  V fine = V((coarse + rule(n, 0.0)) * 0.5);
  if (mag(V(fine - coarse)) > opts.rel_tol * mag(fine) + 1e-15 * peak)
    throw QuadratureNonconvergence("contour rule changed by more than the tolerance under node doubling");
  return fine;
}

cplx qborel_numeric(const std::function<cplx(cplx)>& F, cplx lambda, int k, const QParamd& q,
                    const ContourOptions& opts = {});

struct ConvolutionCheckOptions {
  ConvGridParams grid;
  LaplaceTruncation laplace;
};

double convolution_theorem_check(const XiSeries<>& a, const RayGrid& u, const std::vector<cplx>& t_samples,
                                 const std::vector<cplx>& z_samples, const ConvolutionCheckOptions& opts = {});

// Grid of a Borel-plane function known exactly as a series, seeded at every node from the series.
RayGrid grid_from_series(const XiSeries<>& s, cplx lambda, const QParamd& q, int k_min, int k_max);

struct EntireGrowthReport {
  double A = 0.0;
  double H = 0.0;
  bool coeff_fit_ok = false;
  double M = 0.0;
  double alpha = 0.0;
  bool growth_fit_ok = false;
  bool refuted = false;
  std::string note;
};

EntireGrowthReport entire_growth_check(const std::vector<cplx>& coeffs, const QParamd& q, double r_max = 1e4);

struct TSampleSpec {
  double r_lo = 0.01;
  double r_hi = 0.1;
  int n_radii = 10;
  std::vector<double> arg_offsets{0.3, -0.3};
};

// Samples off the spiral set of every eps in eps_list.
std::vector<cplx> make_t_samples(cplx lambda, const QParamd& q, const TSampleSpec& spec, const std::vector<double>& eps_list);

struct WatsonReport {
  PowerBound growth;     // |f(lambda q^n)| <= C h^n [n]_q!
  PowerBound remainder;  // |f - sum_{k<N} c_k xi^k| <= A h1^N |xi|^N on lambda q^{-m}
  GevreyCertificate conclusion;
};

WatsonReport watson_check(const RayGrid& u, const XiSeries<>& c, int N_max, const std::vector<double>& eps_list,
                          const std::vector<cplx>& t_samples, const LaplaceTruncation& tr = {});

class SummedSolution {
 public:
  SummedSolution(TSeries<> head, RayGrid grid, int mu, LaplaceTruncation tr = {});

  ZPolyc eval_zpoly(cplx t) const;
  cplx eval(cplx t, cplx z) const { return zpoly_eval(eval_zpoly(t), z); }

  const TSeries<>& head() const { return head_; }
  const RayGrid& grid() const { return grid_; }
  int mu() const { return mu_; }
  cplx lambda() const { return grid_.lambda(); }
  const QParamd& q() const { return grid_.q(); }
  SpiralSet guard() const { return {grid_.lambda(), grid_.q(), tr_.eps_guard}; }

 private:
  TSeries<> head_;
  RayGrid grid_;
  int mu_;
  LaplaceTruncation tr_;
};

SummedSolution sum_solution(const Equation& eq, const FormalSolution& sol, const RayGrid& grid, int mu,
                            const LaplaceTruncation& tr = {});

struct TZSample {
  cplx t;
  cplx z;
};

// Residual of the equation at W, computed as a truncated z-polynomial and evaluated at each sample.
double residual_in_equation(const Equation& eq, const std::function<ZPolyc(cplx)>& W, const std::vector<TZSample>& samples);
double residual_in_equation(const Equation& eq, const SummedSolution& W, const std::vector<TZSample>& samples);

struct PlotRow {
  cplx t;
  double eps;
  double abs_w;
  std::vector<double> remainders;  // index N
};

GevreyCertificate gevrey_verify(const SummedSolution& W, const FormalSolution& sol, const std::vector<double>& eps_list,
                                int N_max, const std::vector<cplx>& t_samples, double z_radius = 0.5,
                                std::vector<PlotRow>* plot = nullptr);

}  // namespace qsum
