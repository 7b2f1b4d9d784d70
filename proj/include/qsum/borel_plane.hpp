#pragma once

#include <functional>
#include <vector>

#include "qsum/formal_solver.hpp"
#include "qsum/reduction.hpp"

namespace qsum {

struct ConvGridParams {
  double jackson_eps = 1e-12;
  int kmax_conv = 64;
  double taylor_radius = 0.0;  // 0 selects half the ratio-test radius of the seed series
  int max_jackson_terms = 10000;
  double delta_floor = 1e-9;
  bool iterative = false;  // successive approximation instead of the ascending solve
};

// Values on the lattice lambda q^k, k in [k_min, k_max], with a Taylor series used below k_min.
class RayGrid {
 public:
  RayGrid() = default;
  RayGrid(cplx lambda, const QParamd& q, int k_min, XiSeries<> taylor, double taylor_radius);

  cplx lambda() const { return lambda_; }
  const QParamd& q() const { return q_; }
  int k_min() const { return k_min_; }
  int k_max() const { return k_min_ + static_cast<int>(values_.size()) - 1; }
  const XiSeries<>& taylor() const { return taylor_; }
  double taylor_radius() const { return taylor_radius_; }
  const std::vector<ZPolyc>& values() const { return values_; }
  int mz() const { return taylor_.mz(); }

  cplx node(int k) const;
  // Grid value at k_min..k_max; Taylor value below; GridUnderflow above.
  ZPolyc at(int k) const;
  // Taylor value at an arbitrary point inside the trust radius.
  ZPolyc taylor_at(cplx xi) const;
  // Lattice index of xi if it is a node of this ray.
  std::optional<int> lattice_index(cplx xi) const;

  void push(const ZPolyc& v) { values_.push_back(v); }
  void set(int k, const ZPolyc& v) { values_.at(k - k_min_) = v; }

 private:
  cplx lambda_{1.0, 0.0};
  QParamd q_{2.0, 0.5};
  int k_min_ = 0;
  XiSeries<> taylor_;
  double taylor_radius_ = 0.0;
  std::vector<ZPolyc> values_;
};

// Value of g at p^s xi for s >= 1.
using ShiftFn = std::function<ZPolyc(int s)>;

// (1-p) xi sum_{j>=0} p^j g(p^j xi)
cplx jackson_integral(const std::function<cplx(cplx)>& g, cplx xi, const QParamd& q, double eps,
                      int max_terms = 10000);

// (a *_q g)(xi) with g given at the nodes p^s xi.
ZPolyc qconv_shifts(const XiSeries<>& a, cplx xi, const ShiftFn& g, const QParamd& q, const ConvGridParams& params);

ZPolyc qconv_eval(const XiSeries<>& a, const RayGrid& u, cplx xi, const ConvGridParams& params);

// Radius from the coefficient ratio test over the upper half of the nonzero coefficients; infinity for polynomials
// with fewer than two nonzero coefficients.
double convergence_radius(const XiSeries<>& s);

RayGrid continue_on_ray(const ConvEquation& ceq, cplx lambda, int k_min, int k_max, const ConvGridParams& params,
                        const XiSeries<>& u0);

// Sampled sup over |z| = z_radius and z = 0.
double zsup(const ZPolyc& v, double z_radius, int n_samples = 16);

struct BoundCheckOptions {
  double h_min = 1e-3;
  double h_cap = 1e3;
  int per_decade = 20;
  double z_radius = 0.5;
  double eps_floor = 1e-300;
};

GevreyCertificate bound_check(const RayGrid& u, int N, int m0, int m, const BoundCheckOptions& opts = {});

double residual_on_grid(const ConvEquation& ceq, const RayGrid& u, const ConvGridParams& params);

}  // namespace qsum
