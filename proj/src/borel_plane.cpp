#include "qsum/borel_plane.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qsum {

RayGrid::RayGrid(cplx lambda, const QParamd& q, int k_min, XiSeries<> taylor, double taylor_radius)
    : lambda_(lambda), q_(q), k_min_(k_min), taylor_(std::move(taylor)), taylor_radius_(taylor_radius) {
  if (lambda == 0.0) throw SpecError("ray direction must be nonzero");
}

cplx RayGrid::node(int k) const { return lambda_ * std::pow(q_.q, k); }

ZPolyc RayGrid::taylor_at(cplx xi) const {
  if (std::abs(xi) > taylor_radius_ * (1.0 + 1e-12))
    throw TaylorTrustExceeded("|xi| = " + std::to_string(std::abs(xi)) + " exceeds the Taylor trust radius");
  return evaluate(taylor_, xi);
}

ZPolyc RayGrid::at(int k) const {
  if (k < k_min_) return taylor_at(node(k));
  if (k > k_max()) throw GridUnderflow("node " + std::to_string(k) + " lies above the computed grid");
  return values_[k - k_min_];
}

std::optional<int> RayGrid::lattice_index(cplx xi) const {
  cplx ratio = xi / lambda_;
  if (std::abs(std::arg(ratio)) > 1e-12) return std::nullopt;
  double l = std::log(std::abs(ratio)) / std::log(q_.q);
  double k = std::round(l);
  if (std::abs(l - k) > 1e-10) return std::nullopt;
  return static_cast<int>(k);
}

namespace {

// Sums term(j) for j >= 0 until two consecutive terms are negligible against the partial sum.
template <class V, class Term, class Mag>
V tail_sum(V zero, Term term, Mag mag, double eps, int max_terms) {
  V sum = zero;
  int small = 0;
  for (int j = 0; j < max_terms; ++j) {
    V t = term(j);
    sum += t;
    if (mag(t) <= eps * mag(sum)) {
      if (++small >= 2) return sum;
    } else {
      small = 0;
    }
  }
  throw NonconvergentTail("Jackson sum did not settle within " + std::to_string(max_terms) + " terms");
}

}  // namespace

cplx jackson_integral(const std::function<cplx(cplx)>& g, cplx xi, const QParamd& q, double eps, int max_terms) {
  cplx s = tail_sum(
      cplx(0.0), [&](int j) { return std::pow(q.p, j) * g(std::pow(q.p, j) * xi); },
      [](cplx v) { return std::abs(v); }, eps, max_terms);
  return (1.0 - q.p) * xi * s;
}

ZPolyc qconv_shifts(const XiSeries<>& a, cplx xi, const ShiftFn& g, const QParamd& q, const ConvGridParams& params) {
  const int mz = a.mz();
  ZPolyc r = zpoly_zero<cplx>(mz);
  const int kcap = std::min(a.mt(), params.kmax_conv);
  for (int k = 0; k <= kcap; ++k) {
    ZPolyc ak = a.coeff(k);
    if (zpoly_norm(ak) == 0.0) continue;
    ZPolyc inner = tail_sum(
        zpoly_zero<cplx>(mz),
        [&](int j) {
          double pj = std::pow(q.p, j);
          ZPolyc v = g(k + 1 + j);
          return ZPolyc(v * (pj * qshift_product(xi, pj * xi, k, q)));
        },
        [](const ZPolyc& v) { return zpoly_norm(v); }, params.jackson_eps, params.max_jackson_terms);
    r += zpoly_mul<cplx>(ak, inner) * (std::pow(q.p, k) * (1.0 - q.p) * xi);
  }
  return r;
}

ZPolyc qconv_eval(const XiSeries<>& a, const RayGrid& u, cplx xi, const ConvGridParams& params) {
  if (auto k = u.lattice_index(xi)) {
    if (*k > u.k_max() + 1) throw GridUnderflow("convolution point lies above the grid");
    return qconv_shifts(a, xi, [&](int s) { return u.at(*k - s); }, u.q(), params);
  }
  return qconv_shifts(a, xi, [&](int s) { return u.taylor_at(std::pow(u.q().p, s) * xi); }, u.q(), params);
}

double convergence_radius(const XiSeries<>& s) {
  std::vector<std::pair<int, double>> nz;
  for (int n = 0; n <= s.mt(); ++n) {
    double v = zpoly_norm(s.coeff(n));
    if (v > 0.0) nz.emplace_back(n, v);
  }
  if (nz.size() < 2) return std::numeric_limits<double>::infinity();
  size_t start = nz.size() / 2;
  if (start == nz.size() - 1) start = nz.size() - 2;
  double log_sum = 0.0;
  int count = 0;
  for (size_t i = start; i + 1 < nz.size(); ++i) {
    log_sum += (std::log(nz[i].second) - std::log(nz[i + 1].second)) / (nz[i + 1].first - nz[i].first);
    ++count;
  }
  return std::exp(log_sum / count);
}

namespace {

// Convolution terms of the Borel-plane equation evaluated on the lattice of u.
class ConvState {
 public:
  ConvState(const ConvEquation& ceq, const RayGrid& u, const ConvGridParams& params)
      : ceq_(ceq), u_(u), params_(params) {
    XiSeries<> one = XiSeries<>::monomial(ceq.trunc, 0);
    for (const auto& ct : ceq.conv_terms) {
      if (!ct.nested) {
        nested_.emplace_back();
        continue;
      }
      XiSeries<> g = dz_apply(shift(u.taylor(), ct.i), ct.alpha);
      RayGrid w(u.lambda(), u.q(), u.k_min(), formal_qconv(one, g, ceq.q), u.taylor_radius());
      w.push(w.taylor_at(w.node(u.k_min())));
      nested_.push_back(std::move(w));
    }
  }

  // xi^i d_z^alpha u at lattice index k
  ZPolyc inner_value(const ConvTerm& ct, int k) const {
    return zpoly_derivative<cplx>(u_.at(k), ct.alpha) * std::pow(u_.node(k), ct.i);
  }

  // Extends the nested grids through index k using W(q xi) = (q-1) xi g(xi) + W(xi).
  void extend(int k) {
    for (size_t a = 0; a < ceq_.conv_terms.size(); ++a) {
      const auto& ct = ceq_.conv_terms[a];
      if (!ct.nested) continue;
      RayGrid& w = nested_[a];
      while (w.k_max() < k) {
        int s = w.k_max();
        w.push(w.at(s) + (u_.q().q - 1.0) * u_.node(s) * inner_value(ct, s));
      }
    }
  }

  ZPolyc conv(int k, double* scale) const {
    cplx xi = u_.node(k);
    ZPolyc total = zpoly_zero<cplx>(u_.mz());
    for (size_t a = 0; a < ceq_.conv_terms.size(); ++a) {
      const auto& ct = ceq_.conv_terms[a];
      ZPolyc v;
      if (ct.nested) {
        const RayGrid& w = nested_[a];
        v = qconv_shifts(ct.c, xi, [&](int s) { return w.at(k - s); }, u_.q(), params_);
      } else {
        v = qconv_shifts(ct.c, xi, [&](int s) { return inner_value(ct, k - s); }, u_.q(), params_);
      }
      if (scale) *scale = std::max(*scale, zpoly_norm(v));
      total += v;
    }
    return total;
  }

 private:
  const ConvEquation& ceq_;
  const RayGrid& u_;
  const ConvGridParams& params_;
  std::vector<RayGrid> nested_;
};

ZPolyc pivot_at(const ConvEquation& ceq, cplx xi, double delta_floor) {
  ZPolyc pv = eval_lambda_poly(ceq.P, xi);
  double r = std::abs(xi);
  double floor = delta_floor * std::pow(r, ceq.m0) * std::pow(1.0 + r, ceq.m - ceq.m0);
  if (!(std::abs(pv(0)) >= floor)) throw PivotTooSmall("|P(xi,0)| is below the floor at |xi| = " + std::to_string(r));
  return pv;
}

}  // namespace

RayGrid continue_on_ray(const ConvEquation& ceq, cplx lambda, int k_min, int k_max, const ConvGridParams& params,
                        const XiSeries<>& u0) {
  if (!(u0.trunc() == ceq.trunc)) throw TruncationMismatch("seed series truncation differs from the equation");
  if (k_max < k_min) throw SpecError("k_max must not be below k_min");
  double radius = params.taylor_radius > 0.0 ? params.taylor_radius : 0.5 * convergence_radius(u0);
  RayGrid u(lambda, ceq.q, k_min, u0, radius);
  u.push(u.taylor_at(u.node(k_min)));

  if (!params.iterative) {
    ConvState st(ceq, u, params);
    for (int k = k_min + 1; k <= k_max; ++k) {
      st.extend(k);
      cplx xi = u.node(k);
      ZPolyc pv = pivot_at(ceq, xi, params.delta_floor);
      ZPolyc rhs = evaluate(ceq.f, xi) - st.conv(k, nullptr);
      u.push(zpoly_div<cplx>(rhs, pv));
    }
    return u;
  }

  // successive approximation: start from f/P and resolve until the grid stops changing
  for (int k = k_min + 1; k <= k_max; ++k)
    u.push(zpoly_div<cplx>(evaluate(ceq.f, u.node(k)), pivot_at(ceq, u.node(k), params.delta_floor)));
  for (int iter = 0; iter <= k_max - k_min + 1; ++iter) {
    RayGrid prev = u;
    ConvState st(ceq, prev, params);
    st.extend(k_max);
    double change = 0.0, scale = 0.0;
    for (int k = k_min + 1; k <= k_max; ++k) {
      cplx xi = u.node(k);
      ZPolyc v = zpoly_div<cplx>(evaluate(ceq.f, xi) - st.conv(k, nullptr), pivot_at(ceq, xi, params.delta_floor));
      change = std::max(change, zpoly_norm(ZPolyc(v - prev.at(k))));
      scale = std::max(scale, zpoly_norm(v));
      u.set(k, v);
    }
    if (change <= 1e-15 * scale) break;
  }
  return u;
}

double zsup(const ZPolyc& v, double z_radius, int n_samples) {
  double r = std::abs(v(0));
  if (v.size() == 1) return r;
  for (int s = 0; s < n_samples; ++s)
    r = std::max(r, std::abs(zpoly_eval(v, std::polar(z_radius, 2.0 * std::numbers::pi * s / n_samples))));
  return r;
}

GevreyCertificate bound_check(const RayGrid& u, int N, int m0, int m, const BoundCheckOptions& opts) {
  GevreyCertificate cert;
  cert.kind = GevreyCertificate::Kind::RayBound;
  std::vector<double> x, val;
  for (int k = u.k_min(); k <= u.k_max(); ++k) {
    double r = std::abs(u.node(k));
    double v = zsup(u.at(k), opts.z_radius) * std::pow(r, m0) * std::pow(1.0 + r, m - m0);
    if (!std::isfinite(v)) throw BoundUnfittable("grid value at node " + std::to_string(k) + " is not finite");
    x.push_back(r);
    val.push_back(v);
  }
  bool zero = std::all_of(val.begin(), val.end(), [](double v) { return v == 0.0; });
  if (zero) {
    cert.C = opts.eps_floor;
    cert.h = 1.0;
    cert.note = "zero grid; M1 replaced by the floor value";
    return cert;
  }
  const QParamd& q = u.q();
  const size_t mid = x.size() / 2;
  const int n_h = static_cast<int>(std::round(opts.per_decade * std::log10(opts.h_cap / opts.h_min))) + 1;
  for (int a = 0; a < n_h; ++a) {
    double h = opts.h_min * std::pow(10.0, double(a) / opts.per_decade);
    std::vector<double> ratio(x.size());
    for (size_t i = 0; i < x.size(); ++i) ratio[i] = val[i] / phi(PhiSpec{N, h, 1e-15}, x[i], q);
    bool settled = true;
    for (size_t i = mid + 1; i < x.size(); ++i) settled = settled && ratio[i] <= ratio[i - 1] * (1.0 + 1e-9);
    if (!settled) continue;
    cert.h = h;
    cert.C = *std::max_element(ratio.begin(), ratio.end());
    cert.rates = ratio;
    cert.checks.resize(ratio.size());
    for (size_t i = 0; i < ratio.size(); ++i)
      cert.checks[i] = ratio[i] == 0.0 ? std::numeric_limits<double>::infinity() : cert.C / ratio[i];
    return cert;
  }
  throw BoundUnfittable("no h1 <= " + std::to_string(opts.h_cap) + " makes the bound settle over the grid");
}

double residual_on_grid(const ConvEquation& ceq, const RayGrid& u, const ConvGridParams& params) {
  ConvState st(ceq, u, params);
  st.extend(u.k_max());
  double worst = 0.0;
  for (int k = u.k_min() + 1; k <= u.k_max(); ++k) {
    cplx xi = u.node(k);
    double scale = 0.0;
    ZPolyc pu = zpoly_mul<cplx>(eval_lambda_poly(ceq.P, xi), u.at(k));
    ZPolyc f = evaluate(ceq.f, xi);
    ZPolyc lhs = pu + st.conv(k, &scale) - f;
    scale = std::max({scale, zpoly_norm(pu), zpoly_norm(f), std::numeric_limits<double>::min()});
    worst = std::max(worst, zpoly_norm(lhs) / scale);
  }
  return worst;
}

}  // namespace qsum
