#include "qsum/laplace.hpp"

#include <sstream>

#include <cmath>
#include <limits>

namespace qsum {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();
constexpr double kZRadius = 0.5;

}  // namespace

int SpiralSet::nearest_index(cplx t) const {
  return static_cast<int>(std::round(std::log(std::abs(t) / (std::abs(lambda) * (q.q - 1.0))) / std::log(q.q)));
}

bool SpiralSet::contains(cplx t) const {
  if (t == 0.0) return true;
  int m = nearest_index(t);
  for (int d = -1; d <= 1; ++d)
    if (std::abs(t - pole(m + d)) < eps * std::abs(t)) return true;
  return false;
}

bool SpiralSet::disjoint() const {
  if (!(eps < 1.0)) return false;
  // {|t - c| < eps |t|} is the disk with center c/(1-eps^2) and radius eps|c|/(1-eps^2)
  double s = 1.0 - eps * eps;
  cplx c0 = pole(0) / s, c1 = pole(1) / s;
  double r0 = eps * std::abs(pole(0)) / s, r1 = eps * std::abs(pole(1)) / s;
  return std::abs(c1 - c0) > r0 + r1;
}

ZPolyc qlaplace_zpoly(const RayGrid& u, cplx t, const LaplaceTruncation& tr, LaplaceTails* tails) {
  const QParamd& q = u.q();
  if (SpiralSet{u.lambda(), q, tr.eps_guard}.contains(t)) throw PoleProximity("t lies in the excluded spiral neighborhood");
  auto term = [&](int m, double* kernel) {
    cplx xi = u.node(m);
    cplx e = Exp_q(-q.q * xi / t, q);
    if (kernel) *kernel = std::abs(e);
    return ZPolyc(u.at(m) * (e * xi * (q.q - 1.0)));
  };

  ZPolyc sum = zpoly_zero<cplx>(u.mz());
  double prev = 0.0, last = 0.0, upper_tail = -1.0;
  for (int m = u.k_min(); m <= u.k_max(); ++m) {
    double kernel = 1.0;
    ZPolyc v = term(m, &kernel);
    sum += v;
    prev = last;
    last = zpoly_norm(v);
    if (kernel < tr.exp_floor && last <= tr.upper_rel * zpoly_norm(sum)) {
      upper_tail = last;
      break;
    }
  }
  if (upper_tail < 0.0) {
    if (last == 0.0) {
      upper_tail = 0.0;
    } else {
      double ratio = prev > 0.0 ? last / prev : std::numeric_limits<double>::infinity();
      upper_tail = ratio < 1.0 ? last * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    }
    if (upper_tail > tr.upper_rel * std::max(zpoly_norm(sum), kTiny) && upper_tail > 0.0)
      {
      std::ostringstream os;
      os << "upper Laplace tail estimate " << upper_tail << " exceeds " << tr.upper_rel << " x |sum| = " << zpoly_norm(sum)
         << " at t = " << t << " with the grid ending at k = " << u.k_max();
      throw TailNotConverged(os.str());
    }
  }

  double lower_tail = 0.0;
  int small = 0, count = 0;
  for (int m = u.k_min() - 1;; --m) {
    if (++count > tr.max_lower_terms) throw TailNotConverged("lower Laplace tail did not settle");
    ZPolyc v = term(m, nullptr);
    sum += v;
    lower_tail = zpoly_norm(v);
    if (lower_tail <= tr.lower_rel * zpoly_norm(sum)) {
      if (++small >= 2) break;
    } else {
      small = 0;
    }
  }
  if (tails) *tails = {lower_tail, upper_tail};
  return sum;
}

cplx qlaplace(const RayGrid& u, cplx t, cplx z, const LaplaceTruncation& tr) {
  return zpoly_eval(qlaplace_zpoly(u, t, tr), z);
}

double borel_contour_radius(cplx lambda, int k, const QParamd& q) {
  return std::abs(lambda) * (q.q - 1.0) * std::pow(q.q, k - 0.5);
}

cplx qborel_numeric(const std::function<cplx(cplx)>& F, cplx lambda, int k, const QParamd& q, const ContourOptions& opts) {
  return qborel_contour<cplx>(F, lambda, k, q, [](const cplx& v) { return std::abs(v); }, opts);
}

RayGrid grid_from_series(const XiSeries<>& s, cplx lambda, const QParamd& q, int k_min, int k_max) {
  RayGrid g(lambda, q, k_min, s, std::numeric_limits<double>::infinity());
  for (int k = k_min; k <= k_max; ++k) g.push(evaluate(s, g.node(k)));
  return g;
}

double convolution_theorem_check(const XiSeries<>& a, const RayGrid& u, const std::vector<cplx>& t_samples,
                                 const std::vector<cplx>& z_samples, const ConvolutionCheckOptions& opts) {
  RayGrid conv(u.lambda(), u.q(), u.k_min(), formal_qconv(a, u.taylor(), u.q()), u.taylor_radius());
  for (int k = u.k_min(); k <= u.k_max(); ++k)
    conv.push(qconv_shifts(a, u.node(k), [&](int s) { return u.at(k - s); }, u.q(), opts.grid));
  RayGrid ag = grid_from_series(a, u.lambda(), u.q(), u.k_min(), u.k_max());
  double worst = 0.0;
  for (cplx t : t_samples) {
    ZPolyc lhs = qlaplace_zpoly(conv, t, opts.laplace);
    ZPolyc rhs = zpoly_mul<cplx>(qlaplace_zpoly(ag, t, opts.laplace), qlaplace_zpoly(u, t, opts.laplace));
    for (cplx z : z_samples) {
      cplx l = zpoly_eval(lhs, z), r = zpoly_eval(rhs, z);
      double scale = std::max({std::abs(l), std::abs(r), kTiny});
      if (l == r) continue;
      worst = std::max(worst, std::abs(l - r) / scale);
    }
  }
  return worst;
}

EntireGrowthReport entire_growth_check(const std::vector<cplx>& coeffs, const QParamd& q, double r_max) {
  EntireGrowthReport rep;
  std::vector<int> idx;
  std::vector<double> log_s;
  for (size_t n = 1; n < coeffs.size(); ++n) {
    if (std::abs(coeffs[n]) == 0.0) continue;
    idx.push_back(static_cast<int>(n));
    log_s.push_back(std::log(std::abs(coeffs[n])) + log_qfactorial(static_cast<int>(n), q));
  }
  rep.coeff_fit_ok = true;
  if (idx.empty()) {
    rep.H = 1.0;
    rep.A = coeffs.empty() ? 0.0 : std::abs(coeffs[0]);
  } else {
    std::vector<double> rate(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) rate[i] = std::exp(log_s[i] / idx[i]);
    size_t lo = idx.size() / 2;
    double H = 0.0;
    bool rising = idx.size() - lo >= 4;
    for (size_t i = lo; i < idx.size(); ++i) {
      H = std::max(H, rate[i]);
      if (i > lo && !(rate[i] > rate[i - 1])) rising = false;
    }
    if (rising && rate.back() > 2.0 * rate[lo]) {
      rep.coeff_fit_ok = false;
      rep.note = "coefficient rates [n]_q!|a_n| keep growing; no fixed H";
    }
    rep.H = H;
    double logA = coeffs.empty() || std::abs(coeffs[0]) == 0.0 ? -std::numeric_limits<double>::infinity()
                                                              : std::log(std::abs(coeffs[0]));
    for (size_t i = 0; i < idx.size(); ++i) logA = std::max(logA, log_s[i] - idx[i] * std::log(H));
    rep.A = std::exp(logA);
  }

  // growth side: log max|f| - (log r)^2 / (2 log q) against alpha log r + log M
  const int n_r = 61, n_ang = 8;
  std::vector<double> lr, g;
  for (int i = 0; i < n_r; ++i) {
    double r = 10.0 * std::pow(r_max / 10.0, double(i) / (n_r - 1));
    double best = 0.0;
    for (int a = 0; a < n_ang; ++a) {
      cplx xi = std::polar(r, 2.0 * std::numbers::pi * a / n_ang);
      cplx f = 0.0;
      for (size_t n = coeffs.size(); n-- > 0;) f = f * xi + coeffs[n];
      best = std::max(best, std::abs(f));
    }
    if (best == 0.0) continue;
    double L = std::log(r);
    lr.push_back(L);
    g.push_back(std::log(best) - L * L / (2.0 * std::log(q.q)));
  }
  if (lr.size() >= 2) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < lr.size(); ++i) mx += lr[i], my += g[i];
    mx /= lr.size();
    my /= lr.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < lr.size(); ++i) sxy += (lr[i] - mx) * (g[i] - my), sxx += (lr[i] - mx) * (lr[i] - mx);
    rep.alpha = sxy / sxx;
    double logM = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < lr.size(); ++i) logM = std::max(logM, g[i] - rep.alpha * lr[i]);
    rep.M = std::exp(logM);
    rep.growth_fit_ok = std::isfinite(rep.alpha) && std::isfinite(rep.M);
  } else {
    rep.growth_fit_ok = true;
  }
  rep.refuted = !rep.coeff_fit_ok || !rep.growth_fit_ok;
  return rep;
}

std::vector<cplx> make_t_samples(cplx lambda, const QParamd& q, const TSampleSpec& spec, const std::vector<double>& eps_list) {
  std::vector<cplx> out;
  for (double off : spec.arg_offsets) {
    for (int i = 0; i < spec.n_radii; ++i) {
      double r = spec.n_radii == 1 ? spec.r_lo : spec.r_lo * std::pow(spec.r_hi / spec.r_lo, double(i) / (spec.n_radii - 1));
      cplx t = std::polar(r, std::arg(lambda) + off);
      bool ok = true;
      for (double e : eps_list) ok = ok && !SpiralSet{lambda, q, e}.contains(t);
      if (ok) out.push_back(t);
    }
  }
  return out;
}

WatsonReport watson_check(const RayGrid& u, const XiSeries<>& c, int N_max, const std::vector<double>& eps_list,
                          const std::vector<cplx>& t_samples, const LaplaceTruncation& tr) {
  const QParamd& q = u.q();
  if (N_max > c.mt()) throw SpecError("N_max exceeds the Taylor order");
  WatsonReport rep;
  std::vector<double> R;
  for (int n = 0; n <= u.k_max(); ++n) R.push_back(std::exp(std::log(zsup(u.at(n), kZRadius)) - log_qfactorial(n, q)));
  try {
    rep.growth = fit_power_bound(R);
  } catch (const BoundUnfittable& e) {
    throw HypothesisFailed(std::string("growth on lambda q^n: ") + e.what());
  }

  std::vector<double> rem(N_max + 1, 0.0);
  for (int m = 1; m <= 40; ++m) {
    cplx xi = u.node(-m);
    ZPolyc v = u.at(-m);
    ZPolyc partial = zpoly_zero<cplx>(u.mz());
    cplx pw = 1.0;
    for (int N = 0; N <= N_max; ++N) {
      rem[N] = std::max(rem[N], zsup(ZPolyc(v - partial), kZRadius) / std::pow(std::abs(xi), N));
      partial += c.coeff(N) * pw;
      pw *= xi;
    }
  }
  try {
    rep.remainder = fit_power_bound(rem);
  } catch (const BoundUnfittable& e) {
    throw HypothesisFailed(std::string("expansion at the origin: ") + e.what());
  }

  QTable<double> tab(q, N_max);
  std::vector<double> worst(N_max + 1, 0.0);
  int used = 0;
  for (double eps : eps_list) {
    SpiralSet z{u.lambda(), q, eps};
    for (cplx t : t_samples) {
      if (z.contains(t)) continue;
      ++used;
      ZPolyc L = qlaplace_zpoly(u, t, tr);
      ZPolyc partial = zpoly_zero<cplx>(u.mz());
      cplx tp = t;
      for (int N = 0; N <= N_max; ++N) {
        double r = zsup(ZPolyc(L - partial), kZRadius) * eps / (tab.fact(N) * std::pow(std::abs(t), N + 1));
        worst[N] = std::max(worst[N], r);
        partial += c.coeff(N) * (tab.fact(N) * tp);
        tp *= t;
      }
    }
  }
  if (used == 0) throw SpecError("no t sample lies off the excluded spiral sets");
  PowerBound pb = fit_power_bound(worst);
  GevreyCertificate& cert = rep.conclusion;
  cert.kind = GevreyCertificate::Kind::Asymptotic;
  cert.C = pb.M;
  cert.h = pb.H;
  cert.rates = worst;
  for (int N = 0; N <= N_max; ++N)
    cert.checks.push_back(worst[N] == 0.0 ? std::numeric_limits<double>::infinity() : pb.M * std::pow(pb.H, N) / worst[N]);
  return rep;
}

SummedSolution::SummedSolution(TSeries<> head, RayGrid grid, int mu, LaplaceTruncation tr)
    : head_(std::move(head)), grid_(std::move(grid)), mu_(mu), tr_(tr) {}

ZPolyc SummedSolution::eval_zpoly(cplx t) const {
  return evaluate(head_, t) + qlaplace_zpoly(grid_, t, tr_);
}

SummedSolution sum_solution(const Equation& eq, const FormalSolution& sol, const RayGrid& grid, int mu,
                            const LaplaceTruncation& tr) {
  if (!(grid.q().q == eq.q.q)) throw SpecError("grid and equation use different q");
  return SummedSolution(formal_head(sol, mu), grid, mu, tr);
}

double residual_in_equation(const Equation& eq, const std::function<ZPolyc(cplx)>& W, const std::vector<TZSample>& samples) {
  int jmax = 0;
  for (const auto& t : eq.terms) jmax = std::max(jmax, t.j);
  double worst = 0.0;
  for (const auto& s : samples) {
    // D[j][i] = (tD_q)^j W at q^i t
    std::vector<std::vector<ZPolyc>> D(jmax + 1);
    for (int i = 0; i <= jmax; ++i) D[0].push_back(W(std::pow(eq.q.q, i) * s.t));
    for (int j = 1; j <= jmax; ++j)
      for (int i = 0; i + j <= jmax; ++i) D[j].push_back((D[j - 1][i + 1] - D[j - 1][i]) / (eq.q.q - 1.0));
    ZPolyc F = evaluate(eq.rhs, s.t);
    ZPolyc lhs = zpoly_zero<cplx>(eq.trunc.mz);
    double scale = std::abs(zpoly_eval(F, s.z));
    for (const auto& t : eq.terms) {
      ZPolyc v = zpoly_mul<cplx>(evaluate(t.coeff, s.t), zpoly_derivative<cplx>(D[t.j][0], t.alpha));
      scale = std::max(scale, std::abs(zpoly_eval(v, s.z)));
      lhs += v;
    }
    double res = std::abs(zpoly_eval(ZPolyc(lhs - F), s.z));
    if (res > 0.0) worst = std::max(worst, res / std::max(scale, kTiny));
  }
  return worst;
}

double residual_in_equation(const Equation& eq, const SummedSolution& W, const std::vector<TZSample>& samples) {
  return residual_in_equation(eq, [&](cplx t) { return W.eval_zpoly(t); }, samples);
}

GevreyCertificate gevrey_verify(const SummedSolution& W, const FormalSolution& sol, const std::vector<double>& eps_list,
                                int N_max, const std::vector<cplx>& t_samples, double z_radius,
                                std::vector<PlotRow>* plot) {
  if (N_max > sol.n_max) throw SpecError("N_max exceeds the formal solution order");
  const QParamd& q = W.q();
  QTable<double> tab(q, N_max);
  std::vector<double> worst(N_max + 1, 0.0);
  int used = 0;
  for (double eps : eps_list) {
    SpiralSet z{W.lambda(), q, eps};
    for (cplx t : t_samples) {
      if (z.contains(t)) continue;
      ++used;
      ZPolyc w = W.eval_zpoly(t);
      ZPolyc partial = zpoly_zero<cplx>(w.size() - 1);
      cplx tp = 1.0;
      PlotRow row{t, eps, zsup(w, z_radius), {}};
      for (int N = 0; N <= N_max; ++N) {
        double rem = zsup(ZPolyc(w - partial), z_radius);
        row.remainders.push_back(rem);
        worst[N] = std::max(worst[N], rem * eps / (tab.fact(N) * std::pow(std::abs(t), N)));
        partial += sol.series.coeff(N) * tp;
        tp *= t;
      }
      if (plot) plot->push_back(std::move(row));
    }
  }
  if (used == 0) throw SpecError("no t sample lies off the excluded spiral sets");
  PowerBound pb = fit_power_bound(worst);
  GevreyCertificate cert;
  cert.kind = GevreyCertificate::Kind::Asymptotic;
  cert.C = pb.M;
  cert.h = pb.H;
  cert.rates = worst;
  for (int N = 0; N <= N_max; ++N) {
    double bound = pb.M * std::pow(pb.H, N);
    cert.checks.push_back(worst[N] == 0.0 ? std::numeric_limits<double>::infinity() : bound / worst[N]);
    if (cert.checks.back() < 1.0 - 1e-9) cert.holds = false;
  }
  if (!std::isfinite(pb.M) || !std::isfinite(pb.H)) throw BoundUnfittable("fitted constants are not finite");
  return cert;
}

}  // namespace qsum
