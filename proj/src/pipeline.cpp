#include "qsum/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace qsum {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

// Angular distance from arg lambda to the nearest singular ray; pi when there is none.
double ray_clearance(cplx lambda, const DirectionSet& ds) {
  double d = kPi;
  for (cplx r : ds.rays) {
    double a = wrap_angle(std::arg(lambda) - std::arg(r));
    d = std::min(d, std::min(a, 2.0 * kPi - a));
  }
  return d;
}

cplx default_lambda(const DirectionSet& ds) {
  if (ds.roots.empty()) return 1.0;
  std::vector<double> args;
  for (cplx r : ds.rays) args.push_back(wrap_angle(std::arg(r)));
  std::sort(args.begin(), args.end());
  double best_gap = -1.0, bisector = 0.0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    double next = i + 1 < args.size() ? args[i + 1] : args[0] + 2.0 * kPi;
    if (next - args[i] > best_gap) {
      best_gap = next - args[i];
      bisector = args[i] + 0.5 * best_gap;
    }
  }
  double mod = std::numeric_limits<double>::infinity();
  for (cplx r : ds.roots) mod = std::min(mod, std::abs(r));
  if (!(mod > 0.0) || !std::isfinite(mod)) mod = 1.0;
  cplx u = std::polar(1.0, bisector);
  if (std::abs(u.imag()) < 1e-15) u = {std::copysign(1.0, u.real()), 0.0};
  if (std::abs(u.real()) < 1e-15) u = {0.0, std::copysign(1.0, u.imag())};
  return mod * u;
}

json cert_json(const GevreyCertificate& c) {
  json j;
  j["C"] = c.C;
  j["h"] = c.h;
  j["R"] = c.R;
  j["rho"] = c.rho;
  j["holds"] = c.holds;
  j["rates"] = c.rates;
  j["checks"] = c.checks;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw SpecError("cannot write " + p.string());
  out << s;
}

template <class Fn>
bool guarded(PipelineState& st, Stage stage, Fn&& fn) {
  auto fail = [&](int code, const std::exception& e) {
    st.exit_code = code;
    st.failed = stage;
    st.message = e.what();
    st.report["error"] = json{{"stage", stage_name(stage)}, {"exit_code", code}, {"message", st.message}};
    return false;
  };
  try {
    fn();
    return st.exit_code == 0;
  } catch (const ValidationError& e) {
    return fail(2, e);
  } catch (const NumericError& e) {
    return fail(3, e);
  } catch (const CertificateError& e) {
    return fail(4, e);
  }
}

void certificate_failed(PipelineState& st, Stage stage, const std::string& what) {
  st.exit_code = 4;
  st.failed = stage;
  st.message = what;
  st.report["error"] = json{{"stage", stage_name(stage)}, {"exit_code", 4}, {"message", what}};
}

void stage_check(PipelineState& st, const RunOptions& opts) {
  const Equation& eq = st.spec.eq;
  const PipelineParams& p = st.spec.params;
  st.polygon = newton_polygon(eq);
  st.assumptions = check_assumptions(eq);
  json j;
  json verts = json::array();
  for (auto v : st.polygon.vertices) verts.push_back(json::array({v.x, v.y}));
  j["polygon"] = json{{"vertices", verts},
                      {"slopes", st.polygon.slopes},
                      {"m0", st.polygon.m0 ? json(*st.polygon.m0) : json(nullptr)},
                      {"right", st.polygon.right}};
  j["assumptions"] = json{{"A1", st.assumptions.a1},
                          {"A2", st.assumptions.a2},
                          {"A3", st.assumptions.a3},
                          {"cond_2_2", st.assumptions.cond_2_2},
                          {"normalized", st.assumptions.normalized},
                          {"violations", st.assumptions.violations}};
  st.report["check"] = j;
  if (!st.assumptions.all()) {
    if (!st.assumptions.cond_2_2) {
      st.suggestion = "the low-order condition fails; rerun with --halve to pass to tau = t^(1/2)";
      st.report["check"]["suggestion"] = st.suggestion;
    }
    std::string list;
    for (const auto& v : st.assumptions.violations) list += (list.empty() ? "" : "; ") + v;
    throw AssumptionViolated(list.empty() ? "structural assumptions fail" : list);
  }

  st.directions = singular_directions(eq, p.root_tol);
  json roots = json::array();
  for (cplx r : st.directions.roots) roots.push_back(cplx_to_json(r));
  st.report["check"]["singular_roots"] = roots;

  if (opts.lambda) st.lambda = *opts.lambda;
  else if (p.lambda) st.lambda = *p.lambda;
  else st.lambda = default_lambda(st.directions);
  if (st.lambda == 0.0) throw SpecError("lambda must be nonzero");
  double clearance = ray_clearance(st.lambda, st.directions);
  if (clearance < 1e-9) throw AssumptionViolated("lambda lies on a singular direction");
  if (p.interval) {
    st.interval = *p.interval;
  } else {
    double half = std::min(0.3, 0.5 * clearance);
    st.interval = {std::arg(st.lambda) - half, std::arg(st.lambda) + half};
  }
  st.delta_hat = sector_lower_bound(eq, st.lambda, st.interval, p.R, p.sector);
  st.report["check"]["lambda"] = cplx_to_json(st.lambda);
  st.report["check"]["interval"] = json::array({st.interval.lo, st.interval.hi});
  st.report["check"]["delta_hat"] = st.delta_hat;
}

void stage_formal(PipelineState& st) {
  const Equation& eq = st.spec.eq;
  const PipelineParams& p = st.spec.params;
  st.sol = solve_formal(eq, eq.trunc.mt, FormalOptions{kZeroTol, ResonancePolicy::ZeroIfConsistent});
  st.growth = growth_certificate(*st.sol, eq.q, p.R, p.rho);
  json j;
  j["n_max"] = st.sol->n_max;
  j["resonant"] = st.sol->resonant;
  j["certificate"] = cert_json(st.growth);
  st.report["formal"] = j;
  if (!st.growth.holds) certificate_failed(st, Stage::Formal, "formal growth certificate does not hold");
}

void stage_reduce(PipelineState& st, const RunOptions& opts) {
  const Equation& eq = st.spec.eq;
  const PipelineParams& p = st.spec.params;
  const int mt = eq.trunc.mt;
  auto build = [&](int mu) {
    ReducedEquation red = reduce(eq, mu, formal_head(*st.sol, mu));
    return to_conv_equation(red);
  };
  // the c_{i,0} do not depend on mu, so one reduction fixes beta_hat up to the [N]_q factor
  ConvEquation ceq = build(1);
  BetaHat bh = beta_hat_terms(ceq, st.delta_hat, p.z_radius);
  auto beta = [&](int mu) { return bh.sum / qnum(ceq.m0 + mu, eq.q); };
  std::optional<int> chosen = opts.mu ? opts.mu : p.mu;
  if (chosen) {
    st.mu = *chosen;
  } else {
    st.mu = 1;
    while (beta(st.mu) >= 1.0) {
      if (++st.mu > mt - 2) throw HypothesisFailed("no mu below Mt - 1 makes beta_hat < 1");
    }
  }
  if (st.mu < 0 || st.mu > mt - 2) throw SpecError("mu must lie in [0, Mt - 2]");
  if (st.mu != 1) ceq = build(st.mu);
  st.beta_hat = beta(st.mu);
  st.ceq = ceq;
  st.u0 = borel_tail(*st.sol, st.mu, eq.q);

  json j;
  j["mu"] = st.mu;
  j["m0"] = ceq.m0;
  j["m"] = ceq.m;
  j["beta_hat"] = st.beta_hat;
  j["beta_terms"] = bh.terms;
  j["h0"] = bh.h0;
  json P = json::array();
  for (const auto& c : ceq.P) P.push_back(zpoly_to_json(c));
  j["P"] = P;
  json terms = json::array();
  for (const auto& t : ceq.conv_terms)
    terms.push_back(json{{"i", t.i}, {"alpha", t.alpha}, {"nested", t.nested}, {"max_abs", max_abs(t.c)}});
  j["conv_terms"] = terms;
  j["max_abs_f"] = max_abs(ceq.f);
  j["max_abs_u0"] = max_abs(st.u0);
  st.report["reduce"] = j;
}

void stage_continue(PipelineState& st) {
  const Equation& eq = st.spec.eq;
  const PipelineParams& p = st.spec.params;
  const double lq = std::log(eq.q.q);
  const double lam = std::abs(st.lambda);
  double r_t = p.grid.taylor_radius > 0.0 ? p.grid.taylor_radius : 0.5 * convergence_radius(st.u0);
  if (!std::isfinite(r_t)) r_t = lam;
  int k_min = p.k_min ? *p.k_min : static_cast<int>(std::floor(std::log(r_t / (4.0 * lam)) / lq));
  int k_max = p.k_max ? *p.k_max : static_cast<int>(std::ceil(std::log(1e3 / lam) / lq));
  if (k_max < k_min) throw SpecError("k_max lies below k_min");
  st.grid = continue_on_ray(*st.ceq, st.lambda, k_min, k_max, p.grid, st.u0);
  int extensions = 0;
  if (!p.k_max) {
    // lengthen the ray until the upper Laplace tail settles at every t-sample
    auto ts = make_t_samples(st.lambda, eq.q, p.t_samples, p.eps_list);
    auto settled = [&] {
      try {
        for (cplx t : ts) qlaplace_zpoly(*st.grid, t, p.laplace);
      } catch (const TailNotConverged&) {
        return false;
      }
      return true;
    };
    while (!settled()) {
      if (++extensions > 8) throw TailNotConverged("upper Laplace tail still open after extending the ray to k = " + std::to_string(k_max));
      k_max += std::max(4, (k_max - k_min) / 4);
      st.grid = continue_on_ray(*st.ceq, st.lambda, k_min, k_max, p.grid, st.u0);
    }
  }
  BoundCheckOptions bo;
  bo.z_radius = p.z_radius;
  st.ray_bound = bound_check(*st.grid, st.ceq->m0 + st.mu, st.ceq->m0, st.ceq->m, bo);
  st.grid_residual = residual_on_grid(*st.ceq, *st.grid, p.grid);
  json j;
  j["k_min"] = k_min;
  j["k_max"] = k_max;
  j["ray_extensions"] = extensions;
  j["taylor_radius"] = st.grid->taylor_radius();
  j["residual_on_grid"] = st.grid_residual;
  j["bound"] = cert_json(st.ray_bound);
  st.report["continue"] = j;
  if (!st.ray_bound.holds) certificate_failed(st, Stage::Continue, "ray bound certificate does not hold");
  else if (!(st.grid_residual <= p.residual_tol))
    certificate_failed(st, Stage::Continue, "grid residual " + fmt(st.grid_residual) + " exceeds residual_tol");
}

void stage_sum(PipelineState& st) {
  const Equation& eq = st.spec.eq;
  const PipelineParams& p = st.spec.params;
  st.W.emplace(sum_solution(eq, *st.sol, *st.grid, st.mu, p.laplace));
  st.t_samples = make_t_samples(st.lambda, eq.q, p.t_samples, p.eps_list);
  std::vector<TZSample> samples;
  for (std::size_t i = 0; i < st.t_samples.size(); ++i)
    samples.push_back({st.t_samples[i], std::polar(p.z_sample_radius, 0.7 * static_cast<double>(i))});
  st.residual = residual_in_equation(eq, *st.W, samples);
  json ts = json::array();
  for (cplx t : st.t_samples) ts.push_back(cplx_to_json(t));
  st.report["sum"] = json{{"samples", ts}, {"residual", st.residual}, {"residual_tol", p.residual_tol}};
  if (!(st.residual <= p.residual_tol))
    certificate_failed(st, Stage::Sum, "equation residual " + fmt(st.residual) + " exceeds residual_tol");
}

void stage_verify(PipelineState& st) {
  const PipelineParams& p = st.spec.params;
  const QParamd& q = st.spec.eq.q;
  st.gevrey = gevrey_verify(*st.W, *st.sol, p.eps_list, p.N_max, st.t_samples, p.z_radius, &st.plot);
  // sample where the remainder comes closest to its bound (M H^N / eps) [N]_q! |t|^N
  json worst = nullptr;
  double worst_ratio = -1.0;
  for (const auto& row : st.plot)
    for (std::size_t N = 0; N < row.remainders.size(); ++N) {
      if (!(row.remainders[N] > 0.0)) continue;
      double lb = std::log(st.gevrey.C) + N * std::log(st.gevrey.h) - std::log(row.eps) + log_qfactorial(int(N), q) +
                  N * std::log(std::abs(row.t));
      double ratio = std::exp(std::log(row.remainders[N]) - lb);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst = json{{"t", cplx_to_json(row.t)}, {"eps", row.eps}, {"N", N}, {"ratio", ratio}};
      }
    }
  json j;
  j["M"] = st.gevrey.C;
  j["H"] = st.gevrey.h;
  j["C"] = st.growth.C;
  j["h"] = st.growth.h;
  j["eps"] = p.eps_list;
  j["N_max"] = p.N_max;
  j["worst_sample"] = worst;
  j["holds"] = st.gevrey.holds;
  j["rates"] = st.gevrey.rates;
  st.report["verify"] = j;
  if (!st.gevrey.holds || !std::isfinite(st.gevrey.C) || !std::isfinite(st.gevrey.h))
    certificate_failed(st, Stage::Verify, "q-Gevrey certificate does not hold on the sample set");
}

}  // namespace

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Check: return "check";
    case Stage::Formal: return "formal";
    case Stage::Reduce: return "reduce";
    case Stage::Continue: return "continue";
    case Stage::Sum: return "sum";
    case Stage::Verify: return "verify";
  }
  return "?";
}

BetaHat beta_hat_terms(const ConvEquation& ceq, double delta_hat, double z_radius) {
  BetaHat r;
  const QParamd& q = ceq.q;
  const int mt = ceq.trunc.mt;
  struct Fitted {
    int s;
    std::vector<double> R;
  };
  std::vector<Fitted> fits;
  for (const auto& t : ceq.conv_terms) {
    if (t.alpha != 0 || t.i >= ceq.m0) continue;
    // c << C phi_s(xi; h0) with s = m0 - i - 1: |c_{s+N}| [s+N]_q! <= C h0^N
    Fitted f{ceq.m0 - t.i - 1, {}};
    for (int n = f.s; n < mt; ++n)
      f.R.push_back(zsup(t.c.coeff(n), z_radius) * std::exp(log_qfactorial(n, q)));
    fits.push_back(std::move(f));
  }
  r.terms = static_cast<int>(fits.size());
  if (fits.empty()) return r;
  for (const auto& f : fits) r.h0 = std::max(r.h0, fit_power_bound(f.R).H);
  if (!(r.h0 > 0.0)) r.h0 = 1.0;
  const double h = 2.0 * r.h0;
  for (const auto& f : fits) {
    double C = 0.0;
    for (std::size_t N = 0; N < f.R.size(); ++N) C = std::max(C, f.R[N] / std::pow(r.h0, double(N)));
    r.sum += C / (delta_hat * (1.0 - r.h0 / h));
  }
  return r;
}

PipelineState run_pipeline(const Spec& spec, const RunOptions& opts) {
  PipelineState st;
  st.spec = spec;
  st.report = json::object();
  st.report["spec"] = spec_to_json(spec);
  const Stage last = opts.last;
  auto want = [&](Stage s) { return static_cast<int>(s) <= static_cast<int>(last); };

  if (!guarded(st, Stage::Check, [&] { stage_check(st, opts); })) return st;
  if (want(Stage::Formal) && !guarded(st, Stage::Formal, [&] { stage_formal(st); })) return st;
  if (want(Stage::Reduce) && !guarded(st, Stage::Reduce, [&] { stage_reduce(st, opts); })) return st;
  if (want(Stage::Continue) && !guarded(st, Stage::Continue, [&] { stage_continue(st); })) return st;
  if (want(Stage::Sum) && !guarded(st, Stage::Sum, [&] { stage_sum(st); })) return st;
  if (want(Stage::Verify) && !guarded(st, Stage::Verify, [&] { stage_verify(st); })) return st;
  return st;
}

void write_artifacts(const PipelineState& st, const std::string& dir, bool emit_plot) {
  namespace fs = std::filesystem;
  fs::path out(dir);
  fs::create_directories(out);
  write_text(out / "report.json", st.report.dump(2) + "\n");
  write_text(out / "spec.normalized.json", spec_to_json(st.spec).dump(2) + "\n");

  if (st.sol) {
    const auto& s = st.sol->series;
    std::ostringstream c;
    c << "n,k,re,im\n";
    for (int n = 0; n <= s.mt(); ++n)
      for (int k = 0; k <= s.mz(); ++k) c << n << ',' << k << ',' << fmt(s(n, k).real()) << ',' << fmt(s(n, k).imag()) << '\n';
    write_text(out / "formal_coeffs.csv", c.str());
    std::ostringstream nrm;
    nrm << "n,norm_rho,r_n\n";
    for (int n = 0; n <= s.mt(); ++n) {
      double r = n < static_cast<int>(st.growth.rates.size()) ? st.growth.rates[n] : 0.0;
      nrm << n << ',' << fmt(zsup(s.coeff(n), st.spec.params.rho)) << ',' << fmt(r) << '\n';
    }
    write_text(out / "formal_norms.csv", nrm.str());
  }
  if (st.grid) {
    const RayGrid& g = *st.grid;
    std::ostringstream c;
    c << "k,re_xi,im_xi";
    for (int i = 0; i <= g.mz(); ++i) c << ",re_c" << i << ",im_c" << i;
    c << '\n';
    for (int k = g.k_min(); k <= g.k_max(); ++k) {
      cplx xi = g.node(k);
      ZPolyc v = g.at(k);
      c << k << ',' << fmt(xi.real()) << ',' << fmt(xi.imag());
      for (Eigen::Index i = 0; i < v.size(); ++i) c << ',' << fmt(v(i).real()) << ',' << fmt(v(i).imag());
      c << '\n';
    }
    write_text(out / "grid.csv", c.str());
  }
  if (emit_plot && !st.plot.empty()) {
    std::ostringstream c;
    c << "re_t,im_t,abs_t,eps,abs_w";
    for (std::size_t N = 0; N < st.plot.front().remainders.size(); ++N) c << ",rem_" << N;
    c << '\n';
    for (const auto& row : st.plot) {
      c << fmt(row.t.real()) << ',' << fmt(row.t.imag()) << ',' << fmt(std::abs(row.t)) << ',' << fmt(row.eps) << ','
        << fmt(row.abs_w);
      for (double r : row.remainders) c << ',' << fmt(r);
      c << '\n';
    }
    write_text(out / "plot.csv", c.str());
  }
}

Spec halved_spec(const Spec& spec, json* report) {
  HalvedEquation h = halve_variable(spec.eq);
  Spec s;
  s.eq = h.tau_eq;
  s.params = spec.params;
  s.params.lambda.reset();
  s.params.interval.reset();
  s.params.k_min.reset();
  s.params.k_max.reset();
  s.params.mu.reset();
  if (report) {
    (*report)["q1"] = h.q1.q;
    (*report)["assumptions"] = json{{"A1", h.report.a1},
                                    {"A2", h.report.a2},
                                    {"A3", h.report.a3},
                                    {"cond_2_2", h.report.cond_2_2},
                                    {"violations", h.report.violations}};
    (*report)["tau_spec"] = spec_to_json(s);
  }
  return s;
}

}  // namespace qsum
