#include "qsum/spec_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qsum {

namespace {

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1, start = 0;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
      start = i + 1;
    } else {
      ++col;
    }
  }
  std::size_t end = text.find('\n', start);
  std::string src = text.substr(start, end == std::string::npos ? std::string::npos : end - start);
  return "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + src;
}

// Reads one JSON object, rejecting keys it was never asked about.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(where() + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& need(const std::string& key) {
    if (!has(key)) throw SpecError("missing key '" + sub(key) + "'");
    return j_.at(key);
  }

  double number(const std::string& key) { return as_number(need(key), sub(key)); }
  double number(const std::string& key, double fallback) { return has(key) ? as_number(j_.at(key), sub(key)) : fallback; }
  int integer(const std::string& key) { return as_int(need(key), sub(key)); }
  int integer(const std::string& key, int fallback) { return has(key) ? as_int(j_.at(key), sub(key)) : fallback; }
  std::optional<int> opt_integer(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return as_int(j_.at(key), sub(key));
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean()) throw ParseError(sub(key) + " must be a boolean");
    return j_.at(key).get<bool>();
  }
  const json* opt(const std::string& key) { return has(key) ? &j_.at(key) : nullptr; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ParseError("unknown key '" + sub(it.key()) + "'");
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "spec" : "'" + path_ + "'"; }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(path + " must be a number");
    return v.get<double>();
  }
  static int as_int(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
      double d = v.get<double>();
      if (d == std::round(d) && std::abs(d) < 1e9) return static_cast<int>(d);
    }
    throw ParseError(path + " must be an integer");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

cplx parse_cplx(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_array() || v.size() != 2) throw ParseError(path + " must be a number or [re, im]");
  return {Reader::as_number(v[0], path + "[0]"), Reader::as_number(v[1], path + "[1]")};
}

std::vector<double> parse_doubles(const json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path + " must be an array of numbers");
  std::vector<double> r;
  for (std::size_t i = 0; i < v.size(); ++i) r.push_back(Reader::as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return r;
}

TSeries<> parse_monomials(const json& v, Truncation tr, const std::string& path) {
  if (!v.is_array()) throw ParseError(path + " must be an array of [it, iz, re(, im)] monomials");
  TSeries<> s(tr);
  std::set<std::pair<int, int>> used;
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::string p = path + "[" + std::to_string(i) + "]";
    const json& m = v[i];
    if (!m.is_array() || (m.size() != 3 && m.size() != 4)) throw ParseError(p + " must be [it, iz, re] or [it, iz, re, im]");
    int it = Reader::as_int(m[0], p + "[0]"), iz = Reader::as_int(m[1], p + "[1]");
    double re = Reader::as_number(m[2], p + "[2]");
    double im = m.size() == 4 ? Reader::as_number(m[3], p + "[3]") : 0.0;
    if (it < 0 || iz < 0) throw SpecError(p + " has a negative power");
    if (it > tr.mt || iz > tr.mz) throw SpecError(p + " lies outside the truncation (Mt, Mz)");
    if (!used.insert({it, iz}).second) throw SpecError(p + " repeats the monomial t^" + std::to_string(it) + " z^" + std::to_string(iz));
    s(it, iz) = cplx(re, im);
  }
  return s;
}

void parse_pipeline(const json& j, PipelineParams& p) {
  Reader r(j, "pipeline");
  if (auto v = r.opt("lambda")) p.lambda = parse_cplx(*v, "pipeline.lambda");
  if (auto v = r.opt("interval")) {
    auto d = parse_doubles(*v, "pipeline.interval");
    if (d.size() != 2 || !(d[0] < d[1])) throw SpecError("pipeline.interval must be [lo, hi] with lo < hi");
    p.interval = AngleInterval{d[0], d[1]};
  }
  p.mu = r.opt_integer("mu");
  p.k_min = r.opt_integer("k_min");
  p.k_max = r.opt_integer("k_max");
  p.R = r.number("R", p.R);
  p.rho = r.number("rho", p.rho);
  p.N_max = r.integer("N_max", p.N_max);
  if (auto v = r.opt("eps_list")) p.eps_list = parse_doubles(*v, "pipeline.eps_list");
  p.z_radius = r.number("z_radius", p.z_radius);
  p.z_sample_radius = r.number("z_sample_radius", p.z_sample_radius);
  p.residual_tol = r.number("residual_tol", p.residual_tol);
  p.root_tol = r.number("root_tol", p.root_tol);
  int seed = r.integer("seed", static_cast<int>(p.seed));
  if (seed < 0) throw SpecError("pipeline.seed must be nonnegative");
  p.seed = static_cast<unsigned>(seed);
  if (auto v = r.opt("grid")) {
    Reader g(*v, "pipeline.grid");
    p.grid.jackson_eps = g.number("jackson_eps", p.grid.jackson_eps);
    p.grid.kmax_conv = g.integer("kmax_conv", p.grid.kmax_conv);
    p.grid.taylor_radius = g.number("taylor_radius", p.grid.taylor_radius);
    p.grid.max_jackson_terms = g.integer("max_jackson_terms", p.grid.max_jackson_terms);
    p.grid.delta_floor = g.number("delta_floor", p.grid.delta_floor);
    p.grid.iterative = g.boolean("iterative", p.grid.iterative);
    g.finish();
  }
  if (auto v = r.opt("laplace")) {
    Reader g(*v, "pipeline.laplace");
    p.laplace.lower_rel = g.number("lower_rel", p.laplace.lower_rel);
    p.laplace.exp_floor = g.number("exp_floor", p.laplace.exp_floor);
    p.laplace.upper_rel = g.number("upper_rel", p.laplace.upper_rel);
    p.laplace.eps_guard = g.number("eps_guard", p.laplace.eps_guard);
    p.laplace.max_lower_terms = g.integer("max_lower_terms", p.laplace.max_lower_terms);
    g.finish();
  }
  if (auto v = r.opt("t_samples")) {
    Reader g(*v, "pipeline.t_samples");
    p.t_samples.r_lo = g.number("r_lo", p.t_samples.r_lo);
    p.t_samples.r_hi = g.number("r_hi", p.t_samples.r_hi);
    p.t_samples.n_radii = g.integer("n_radii", p.t_samples.n_radii);
    if (auto a = g.opt("arg_offsets")) p.t_samples.arg_offsets = parse_doubles(*a, "pipeline.t_samples.arg_offsets");
    g.finish();
  }
  if (auto v = r.opt("sector")) {
    Reader g(*v, "pipeline.sector");
    p.sector.n_angles = g.integer("n_angles", p.sector.n_angles);
    p.sector.n_radii = g.integer("n_radii", p.sector.n_radii);
    p.sector.r_min = g.number("r_min", p.sector.r_min);
    p.sector.r_max = g.number("r_max", p.sector.r_max);
    p.sector.n_z = g.integer("n_z", p.sector.n_z);
    p.sector.delta_floor = g.number("delta_floor", p.sector.delta_floor);
    g.finish();
  }
  r.finish();

  if (!(p.rho > 0.0 && p.rho < p.R)) throw SpecError("pipeline needs 0 < rho < R");
  if (p.N_max < 0) throw SpecError("pipeline.N_max must be nonnegative");
  if (p.eps_list.empty()) throw SpecError("pipeline.eps_list must not be empty");
  for (double e : p.eps_list)
    if (!(e > 0.0)) throw SpecError("pipeline.eps_list entries must be positive");
  if (p.lambda && *p.lambda == 0.0) throw SpecError("pipeline.lambda must be nonzero");
  if (p.mu && *p.mu < 0) throw SpecError("pipeline.mu must be nonnegative");
  if (p.k_min && p.k_max && *p.k_max < *p.k_min) throw SpecError("pipeline.k_max must not be below k_min");
  if (p.t_samples.n_radii < 1 || !(p.t_samples.r_lo > 0.0) || !(p.t_samples.r_hi >= p.t_samples.r_lo))
    throw SpecError("pipeline.t_samples needs 0 < r_lo <= r_hi and n_radii >= 1");
}

}  // namespace

Spec parse_spec(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + line_context(text, e.byte) + " (" + e.what() + ")");
  }
  Spec s;
  Reader r(j, "");
  double q = r.number("q");
  s.eq.q = make_qparam(q);
  s.eq.sigma = r.number("sigma", 1.0);
  s.eq.m = r.integer("m");
  int mt = r.integer("Mt"), mz = r.integer("Mz");
  if (mt < 1 || mz < 0) throw SpecError("need Mt >= 1 and Mz >= 0");
  s.eq.trunc = Truncation{mt, mz};
  const json& terms = r.need("terms");
  if (!terms.is_array()) throw ParseError("terms must be an array");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    Reader t(terms[i], "terms[" + std::to_string(i) + "]");
    Term term;
    term.j = t.integer("j");
    term.alpha = t.integer("alpha");
    if (term.j < 0 || term.alpha < 0) throw SpecError(t.sub("j") + " and alpha must be nonnegative");
    term.coeff = parse_monomials(t.need("coeff"), s.eq.trunc, t.sub("coeff"));
    t.finish();
    s.eq.terms.push_back(std::move(term));
  }
  s.eq.rhs = parse_monomials(r.need("rhs"), s.eq.trunc, "rhs");
  if (auto p = r.opt("pipeline")) parse_pipeline(*p, s.params);
  r.finish();
  validate(s.eq);
  return s;
}

Spec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read spec file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), path);
}

json cplx_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

json zpoly_to_json(const ZPolyc& p) {
  json a = json::array();
  for (Eigen::Index k = 0; k < p.size(); ++k) a.push_back(cplx_to_json(p(k)));
  return a;
}

json series_to_json(const TSeries<>& s) {
  json a = json::array();
  for (int n = 0; n <= s.mt(); ++n) a.push_back(zpoly_to_json(s.coeff(n)));
  return a;
}

json monomials_to_json(const TSeries<>& s) {
  json a = json::array();
  for (int n = 0; n <= s.mt(); ++n)
    for (int k = 0; k <= s.mz(); ++k) {
      cplx c = s(n, k);
      if (c != 0.0) a.push_back(json::array({n, k, c.real(), c.imag()}));
    }
  return a;
}

json spec_to_json(const Spec& s) {
  const auto& eq = s.eq;
  const auto& p = s.params;
  json j;
  j["q"] = eq.q.q;
  j["sigma"] = eq.sigma;
  j["m"] = eq.m;
  j["Mt"] = eq.trunc.mt;
  j["Mz"] = eq.trunc.mz;
  std::vector<const Term*> order;
  for (const auto& t : eq.terms) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const Term* a, const Term* b) {
    return std::make_pair(a->j, a->alpha) > std::make_pair(b->j, b->alpha);
  });
  json terms = json::array();
  for (const Term* t : order) terms.push_back(json{{"j", t->j}, {"alpha", t->alpha}, {"coeff", monomials_to_json(t->coeff)}});
  j["terms"] = terms;
  j["rhs"] = monomials_to_json(eq.rhs);

  json pj;
  pj["lambda"] = p.lambda ? cplx_to_json(*p.lambda) : json(nullptr);
  pj["interval"] = p.interval ? json::array({p.interval->lo, p.interval->hi}) : json(nullptr);
  pj["mu"] = p.mu ? json(*p.mu) : json(nullptr);
  pj["k_min"] = p.k_min ? json(*p.k_min) : json(nullptr);
  pj["k_max"] = p.k_max ? json(*p.k_max) : json(nullptr);
  pj["R"] = p.R;
  pj["rho"] = p.rho;
  pj["N_max"] = p.N_max;
  pj["eps_list"] = p.eps_list;
  pj["z_radius"] = p.z_radius;
  pj["z_sample_radius"] = p.z_sample_radius;
  pj["residual_tol"] = p.residual_tol;
  pj["root_tol"] = p.root_tol;
  pj["seed"] = p.seed;
  pj["grid"] = json{{"jackson_eps", p.grid.jackson_eps},
                    {"kmax_conv", p.grid.kmax_conv},
                    {"taylor_radius", p.grid.taylor_radius},
                    {"max_jackson_terms", p.grid.max_jackson_terms},
                    {"delta_floor", p.grid.delta_floor},
                    {"iterative", p.grid.iterative}};
  pj["laplace"] = json{{"lower_rel", p.laplace.lower_rel},
                       {"exp_floor", p.laplace.exp_floor},
                       {"upper_rel", p.laplace.upper_rel},
                       {"eps_guard", p.laplace.eps_guard},
                       {"max_lower_terms", p.laplace.max_lower_terms}};
  pj["t_samples"] = json{{"r_lo", p.t_samples.r_lo},
                         {"r_hi", p.t_samples.r_hi},
                         {"n_radii", p.t_samples.n_radii},
                         {"arg_offsets", p.t_samples.arg_offsets}};
  pj["sector"] = json{{"n_angles", p.sector.n_angles}, {"n_radii", p.sector.n_radii}, {"r_min", p.sector.r_min},
                      {"r_max", p.sector.r_max},       {"n_z", p.sector.n_z},         {"delta_floor", p.sector.delta_floor}};
  j["pipeline"] = pj;
  return j;
}

bool operator==(const PipelineParams& a, const PipelineParams& b) {
  auto iv = [](const std::optional<AngleInterval>& i) {
    return i ? std::optional<std::pair<double, double>>({i->lo, i->hi}) : std::nullopt;
  };
  const auto &g = a.grid, &h = b.grid;
  const auto &l = a.laplace, &m = b.laplace;
  const auto &s = a.sector, &t = b.sector;
  return a.lambda == b.lambda && iv(a.interval) == iv(b.interval) && a.mu == b.mu && a.k_min == b.k_min &&
         a.k_max == b.k_max && a.R == b.R && a.rho == b.rho && a.N_max == b.N_max && a.eps_list == b.eps_list &&
         a.z_radius == b.z_radius && a.z_sample_radius == b.z_sample_radius && a.residual_tol == b.residual_tol &&
         a.root_tol == b.root_tol && a.seed == b.seed && g.jackson_eps == h.jackson_eps && g.kmax_conv == h.kmax_conv &&
         g.taylor_radius == h.taylor_radius && g.max_jackson_terms == h.max_jackson_terms &&
         g.delta_floor == h.delta_floor && g.iterative == h.iterative && l.lower_rel == m.lower_rel &&
         l.exp_floor == m.exp_floor && l.upper_rel == m.upper_rel && l.eps_guard == m.eps_guard &&
         l.max_lower_terms == m.max_lower_terms && a.t_samples.r_lo == b.t_samples.r_lo &&
         a.t_samples.r_hi == b.t_samples.r_hi && a.t_samples.n_radii == b.t_samples.n_radii &&
         a.t_samples.arg_offsets == b.t_samples.arg_offsets && s.n_angles == t.n_angles && s.n_radii == t.n_radii &&
         s.r_min == t.r_min && s.r_max == t.r_max && s.n_z == t.n_z && s.delta_floor == t.delta_floor;
}

bool same_equation(const Equation& a, const Equation& b) {
  if (!(a.q.q == b.q.q && a.sigma == b.sigma && a.m == b.m && a.trunc == b.trunc && a.rhs == b.rhs)) return false;
  if (a.terms.size() != b.terms.size()) return false;
  for (const auto& t : a.terms) {
    const Term* u = b.find(t.j, t.alpha);
    if (!u || !(u->coeff == t.coeff)) return false;
  }
  return true;
}

}  // namespace qsum
