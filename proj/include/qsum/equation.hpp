#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qsum/series.hpp"

namespace qsum {

inline constexpr int kOrdInfinity = std::numeric_limits<int>::max();
inline constexpr double kZeroTol = 1e-13;

struct Term {
  int j = 0;
  int alpha = 0;
  TSeries<> coeff;
};

// sum_{j,alpha} a_{j,alpha}(t,z) (tD_q)^j d_z^alpha X = F(t,z)
struct Equation {
  QParamd q{2.0, 0.5};
  double sigma = 1.0;
  int m = 1;
  Truncation trunc;
  std::vector<Term> terms;
  TSeries<> rhs;

  const Term* find(int j, int alpha) const;
  int max_alpha() const;
};

// Throws SpecError naming the first violated invariant.
void validate(const Equation& eq);

int ord_t(const TSeries<>& f, double zero_tol = kZeroTol);

// sum a_{j,alpha} (tD_q)^j d_z^alpha X, all at series level.
TSeries<> apply_operator(const Equation& eq, const TSeries<>& x);

struct LatticePoint {
  int x = 0;
  int y = 0;
  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
};

struct NewtonPolygon {
  std::vector<LatticePoint> vertices;  // from the left end of the bottom edge to the right end
  std::vector<double> slopes;          // finite sloped edges, left to right
  std::optional<int> m0;               // present when the shape is x <= m, y >= max(0, x - m0)
  int right = 0;                       // right edge abscissa
};

NewtonPolygon newton_polygon(const Equation& eq, double zero_tol = kZeroTol);

// True when (x, y) lies strictly inside the polygon.
bool polygon_interior(const NewtonPolygon& poly, int x, int y);

struct AssumptionReport {
  bool a1 = false;
  bool a2 = false;
  bool a3 = false;
  bool cond_2_2 = false;
  bool normalized = false;  // min ord_t = 0
  std::optional<int> m0;
  std::vector<std::string> violations;
  bool all() const { return a1 && a2 && a3 && cond_2_2; }
};

AssumptionReport check_assumptions(const Equation& eq, double zero_tol = kZeroTol);

// Coefficient i multiplies lambda^i.
using LambdaPoly = std::vector<ZPolyc>;

LambdaPoly p0_polynomial(const Equation& eq, double zero_tol = kZeroTol);
LambdaPoly p1_polynomial(const Equation& eq, double zero_tol = kZeroTol);

ZPolyc eval_lambda_poly(const LambdaPoly& p, cplx lambda);

struct DirectionSet {
  std::vector<cplx> roots;
  std::vector<cplx> rays;  // unit directions
};

// All roots of sum c_i x^i by Aberth-Ehrlich iteration.
std::vector<cplx> aberth_roots(const std::vector<cplx>& coeffs, double root_tol = 1e-12, int max_iter = 200,
                               unsigned seed = 12345);

DirectionSet singular_directions(const Equation& eq, double root_tol = 1e-12);

struct AngleInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SectorSampling {
  int n_angles = 16;
  int n_radii = 40;
  double r_min = 1e-3;
  double r_max = 1e3;
  int n_z = 8;
  double delta_floor = 1e-9;
};

double sector_lower_bound(const Equation& eq, cplx lambda, const AngleInterval& interval, double R,
                          const SectorSampling& samples = {});

}  // namespace qsum
