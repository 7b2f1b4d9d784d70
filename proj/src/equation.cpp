#include "qsum/equation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace qsum {

namespace {

std::string key(int j, int alpha) {
  std::ostringstream os;
  os << "(" << j << "," << alpha << ")";
  return os.str();
}

double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  return a < 0.0 ? a + two_pi : a;
}

bool angle_in(double angle, const AngleInterval& iv) {
  return wrap_angle(angle - iv.lo) <= (iv.hi - iv.lo) + 1e-15;
}

}  // namespace

const Term* Equation::find(int j, int alpha) const {
  for (const auto& t : terms)
    if (t.j == j && t.alpha == alpha) return &t;
  return nullptr;
}

int Equation::max_alpha() const {
  int r = 0;
  for (const auto& t : terms) r = std::max(r, t.alpha);
  return r;
}

void validate(const Equation& eq) {
  if (!(eq.q.q > 1.0)) throw SpecError("q must exceed 1");
  if (!(eq.sigma > 0.0)) throw SpecError("sigma must be positive");
  if (eq.m < 1) throw SpecError("m must be a positive integer");
  if (eq.trunc.mt < 1 || eq.trunc.mz < 0) throw SpecError("truncation orders must satisfy Mt >= 1, Mz >= 0");
  if (eq.terms.empty()) throw SpecError("equation has no terms");
  if (!(eq.rhs.trunc() == eq.trunc)) throw SpecError("rhs truncation differs from the equation truncation");
  bool normalized = false;
  for (size_t a = 0; a < eq.terms.size(); ++a) {
    const Term& t = eq.terms[a];
    if (t.j < 0 || t.alpha < 0) throw SpecError("term " + key(t.j, t.alpha) + " has a negative index");
    if (t.j + eq.sigma * t.alpha > eq.m + 1e-12) throw SpecError("term " + key(t.j, t.alpha) + " violates j + sigma*alpha <= m");
    if (!(t.coeff.trunc() == eq.trunc)) throw SpecError("term " + key(t.j, t.alpha) + " has a mismatched truncation");
    for (size_t b = 0; b < a; ++b)
      if (eq.terms[b].j == t.j && eq.terms[b].alpha == t.alpha) throw SpecError("duplicate term key " + key(t.j, t.alpha));
    if (ord_t(t.coeff) == 0) normalized = true;
  }
  if (!normalized) throw SpecError("no coefficient has ord_t = 0");
}

int ord_t(const TSeries<>& f, double zero_tol) {
  for (int n = 0; n <= f.mt(); ++n)
    if (zpoly_norm(f.coeff(n)) > zero_tol) return n;
  return kOrdInfinity;
}

TSeries<> apply_operator(const Equation& eq, const TSeries<>& x) {
  TSeries<> r(x.trunc());
  for (const auto& t : eq.terms) {
    TSeries<> y = dz_apply(x, t.alpha);
    for (int i = 0; i < t.j; ++i) y = tdq_apply(y, eq.q);
    r += mul(t.coeff, y);
  }
  return r;
}

NewtonPolygon newton_polygon(const Equation& eq, double zero_tol) {
  // staircase: lowest ord per abscissa
  std::map<int, int> low;
  for (const auto& t : eq.terms) {
    int o = ord_t(t.coeff, zero_tol);
    if (o == kOrdInfinity) continue;
    auto it = low.find(t.j);
    if (it == low.end() || o < it->second) low[t.j] = o;
  }
  NewtonPolygon poly;
  if (low.empty()) return poly;
  int ymin = kOrdInfinity;
  for (auto [x, y] : low) ymin = std::min(ymin, y);
  int x0 = 0;
  for (auto [x, y] : low)
    if (y == ymin) x0 = x;
  poly.right = low.rbegin()->first;

  // lower hull (monotone chain) of the points right of x0
  auto cross = [](LatticePoint o, LatticePoint a, LatticePoint b) {
    return static_cast<long long>(a.x - o.x) * (b.y - o.y) - static_cast<long long>(a.y - o.y) * (b.x - o.x);
  };
  std::vector<LatticePoint> hull;
  for (auto [x, y] : low) {
    if (x < x0) continue;
    LatticePoint p{x, y};
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
    hull.push_back(p);
  }
  poly.vertices = hull;
  for (size_t i = 1; i < hull.size(); ++i)
    poly.slopes.push_back(static_cast<double>(hull[i].y - hull[i - 1].y) / (hull[i].x - hull[i - 1].x));

  if (hull.size() == 2 && hull[0].y == 0 && hull[1].x == eq.m && hull[1].y == eq.m - x0 && x0 < eq.m)
    poly.m0 = x0;
  return poly;
}

bool polygon_interior(const NewtonPolygon& poly, int x, int y) {
  if (poly.vertices.empty() || x >= poly.right) return false;
  const auto& v = poly.vertices;
  if (x <= v.front().x) return y > v.front().y;
  for (size_t i = 1; i < v.size(); ++i) {
    if (x <= v[i].x) {
      long long dx = v[i].x - v[i - 1].x, dy = v[i].y - v[i - 1].y;
      return dx * (y - v[i - 1].y) > dy * (x - v[i - 1].x);
    }
  }
  return false;
}

AssumptionReport check_assumptions(const Equation& eq, double zero_tol) {
  AssumptionReport rep;
  NewtonPolygon poly = newton_polygon(eq, zero_tol);
  rep.m0 = poly.m0;
  rep.a1 = poly.m0.has_value();
  if (!rep.a1) rep.violations.push_back("A1: Newton polygon is not of the form x <= m, y >= max(0, x - m0)");

  for (const auto& t : eq.terms)
    if (ord_t(t.coeff, zero_tol) == 0) rep.normalized = true;

  rep.a2 = true;
  for (const auto& t : eq.terms) {
    if (t.alpha == 0) continue;
    int o = ord_t(t.coeff, zero_tol);
    if (o == kOrdInfinity) continue;
    if (!polygon_interior(poly, t.j, o)) {
      rep.a2 = false;
      rep.violations.push_back("A2: term " + key(t.j, t.alpha) + " is not interior to the Newton polygon");
    }
  }

  if (rep.a1) {
    int m0 = *poly.m0;
    const Term* lo = eq.find(m0, 0);
    const Term* hi = eq.find(eq.m, 0);
    bool lo_ok = lo && std::abs(lo->coeff(0, 0)) > zero_tol;
    bool hi_ok = hi && std::abs((*hi).coeff(eq.m - m0, 0)) > zero_tol;
    rep.a3 = lo_ok && hi_ok;
    if (!lo_ok) rep.violations.push_back("A3: a_{m0,0}(0,0) vanishes");
    if (!hi_ok) rep.violations.push_back("A3: (a_{m,0}/t^{m-m0})(0,0) vanishes");

    rep.cond_2_2 = true;
    for (const auto& t : eq.terms) {
      if (t.alpha == 0 || t.j < m0 || t.j >= eq.m) continue;
      int o = ord_t(t.coeff, zero_tol);
      if (o != kOrdInfinity && o < t.j - m0 + 2) {
        rep.cond_2_2 = false;
        rep.violations.push_back("cond_2_2: ord_t of term " + key(t.j, t.alpha) + " is below j - m0 + 2");
      }
    }
  } else {
    rep.violations.push_back("A3, cond_2_2: undefined without the A1 shape");
  }
  return rep;
}

LambdaPoly p0_polynomial(const Equation& eq, double zero_tol) {
  NewtonPolygon poly = newton_polygon(eq, zero_tol);
  if (!poly.m0) throw ShapeMismatch("P0 needs the A1 polygon shape");
  int m0 = *poly.m0;
  LambdaPoly p(eq.m - m0 + 1, zpoly_zero<cplx>(eq.trunc.mz));
  for (int j = m0; j <= eq.m; ++j) {
    const Term* t = eq.find(j, 0);
    if (!t) continue;
    for (int n = 0; n < j - m0; ++n)
      if (zpoly_norm(t->coeff.coeff(n)) > zero_tol)
        throw ShapeMismatch("a_{" + std::to_string(j) + ",0} is not divisible by t^{j-m0}");
    p[j - m0] = t->coeff.coeff(j - m0) / std::pow(eq.q.q, 0.5 * j * (j - 1));
  }
  return p;
}

LambdaPoly p1_polynomial(const Equation& eq, double zero_tol) {
  NewtonPolygon poly = newton_polygon(eq, zero_tol);
  int m0 = poly.m0 ? *poly.m0 : (poly.vertices.empty() ? 0 : poly.vertices.front().x);
  LambdaPoly p(m0 + 1, zpoly_zero<cplx>(eq.trunc.mz));
  for (const auto& t : eq.terms)
    if (t.alpha == 0 && t.j <= m0) p[t.j] = t.coeff.coeff(0);
  return p;
}

ZPolyc eval_lambda_poly(const LambdaPoly& p, cplx lambda) {
  ZPolyc r = ZPolyc::Zero(p.front().size());
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * lambda + *it;
  return r;
}

std::vector<cplx> aberth_roots(const std::vector<cplx>& coeffs, double root_tol, int max_iter, unsigned seed) {
  std::vector<cplx> c = coeffs;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  if (c.size() <= 1) return {};
  const int d = static_cast<int>(c.size()) - 1;
  cplx lead = c.back();
  for (auto& x : c) x /= lead;

  auto eval = [&](cplx z, cplx& dp) {
    cplx p = c[d];
    dp = 0.0;
    for (int i = d - 1; i >= 0; --i) {
      dp = dp * z + p;
      p = p * z + c[i];
    }
    return p;
  };
  double bound = 0.0;
  for (int i = 0; i < d; ++i) bound = std::max(bound, std::abs(c[i]));
  double radius = std::max(1e-3, std::min(1.0 + bound, 0.5 * (1.0 + bound)));

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  for (int attempt = 0; attempt < 6; ++attempt) {
    std::vector<cplx> z(d);
    for (int k = 0; k < d; ++k) {
      double ang = 2.0 * std::numbers::pi * k / d + 0.4 + (attempt ? jitter(rng) : 0.0);
      double rad = radius * (1.0 + (attempt ? jitter(rng) : 0.0));
      z[k] = std::polar(rad, ang);
    }
    bool converged = false;
    for (int it = 0; it < max_iter && !converged; ++it) {
      double step = 0.0;
      for (int i = 0; i < d; ++i) {
        cplx dp;
        cplx p = eval(z[i], dp);
        if (p == 0.0) continue;
        cplx w = p / dp;
        cplx s = 0.0;
        for (int j = 0; j < d; ++j)
          if (j != i) s += 1.0 / (z[i] - z[j]);
        cplx corr = w / (1.0 - w * s);
        z[i] -= corr;
        step = std::max(step, std::abs(corr) / (1.0 + std::abs(z[i])));
      }
      converged = step < 1e-3 * root_tol;
    }
    bool ok = true;
    for (auto& r : z) {
      for (int k = 0; k < 3; ++k) {
        cplx dp;
        cplx p = eval(r, dp);
        if (dp != 0.0) r -= p / dp;
      }
      cplx dp;
      if (!(std::abs(eval(r, dp)) < root_tol * std::pow(1.0 + std::abs(r), d)) || !std::isfinite(std::abs(r))) ok = false;
    }
    if (ok) {
      std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
        return std::arg(a) != std::arg(b) ? std::arg(a) < std::arg(b) : std::abs(a) < std::abs(b);
      });
      return z;
    }
  }
  throw RootFindingFailure("Aberth-Ehrlich iteration did not reach the residual tolerance");
}

DirectionSet singular_directions(const Equation& eq, double root_tol) {
  LambdaPoly p0 = p0_polynomial(eq);
  std::vector<cplx> c;
  for (const auto& zp : p0) c.push_back(zp(0));
  DirectionSet ds;
  ds.roots = aberth_roots(c, root_tol);
  if (ds.roots.empty()) throw RootFindingFailure("P0(lambda,0) is constant");
  for (auto r : ds.roots) {
    if (std::abs(r) == 0.0) throw RootFindingFailure("P0(lambda,0) has a zero root");
    ds.rays.push_back(r / std::abs(r));
  }
  return ds;
}

double sector_lower_bound(const Equation& eq, cplx lambda, const AngleInterval& interval, double R,
                          const SectorSampling& samples) {
  if (lambda == 0.0) throw SpecError("lambda must be nonzero");
  if (!(interval.hi >= interval.lo) || interval.hi - interval.lo >= 2.0 * std::numbers::pi)
    throw SpecError("angle interval must satisfy lo <= hi < lo + 2 pi");
  if (!angle_in(std::arg(lambda), interval)) throw SpecError("arg lambda lies outside the angle interval");
  NewtonPolygon poly = newton_polygon(eq);
  if (!poly.m0) throw ShapeMismatch("sector bound needs the A1 polygon shape");
  const int deg = eq.m - *poly.m0;
  DirectionSet ds = singular_directions(eq);
  for (auto ray : ds.rays)
    if (angle_in(std::arg(ray), interval)) throw DegenerateSector("the sector contains a singular direction");

  LambdaPoly p0 = p0_polynomial(eq);
  std::vector<cplx> zs{0.0};
  for (int s = 0; s < samples.n_z; ++s) zs.push_back(std::polar(R, 2.0 * std::numbers::pi * s / samples.n_z));
  double delta = std::numeric_limits<double>::infinity();
  for (int a = 0; a < samples.n_angles; ++a) {
    double ang = samples.n_angles == 1 ? interval.lo
                                       : interval.lo + (interval.hi - interval.lo) * a / (samples.n_angles - 1);
    for (int r = 0; r < samples.n_radii; ++r) {
      double rad = samples.r_min * std::pow(samples.r_max / samples.r_min, samples.n_radii == 1 ? 0.0 : double(r) / (samples.n_radii - 1));
      cplx xi = std::polar(rad, ang);
      ZPolyc v = eval_lambda_poly(p0, xi);
      double norm = std::pow(1.0 + rad, deg);
      for (cplx z : zs) delta = std::min(delta, std::abs(zpoly_eval(v, z)) / norm);
    }
  }
  if (!(delta >= samples.delta_floor)) throw DegenerateSector("sampled lower bound " + std::to_string(delta) + " is below delta_floor");
  return delta;
}

}  // namespace qsum
