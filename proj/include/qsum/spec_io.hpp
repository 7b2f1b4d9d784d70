#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsum/equation.hpp"
#include "qsum/laplace.hpp"

namespace qsum {

using json = nlohmann::ordered_json;

// Pipeline configuration carried alongside the equation in a spec file.
struct PipelineParams {
  std::optional<cplx> lambda;            // default: bisector of the widest gap between singular rays
  std::optional<AngleInterval> interval; // default: arg lambda +- min(0.3, gap/4)
  std::optional<int> mu;                 // default: smallest mu >= 1 with beta_hat < 1
  std::optional<int> k_min;              // default: |lambda q^k_min| <= taylor_radius / 4
  std::optional<int> k_max;              // default: |lambda q^k_max| ~ 1e3
  double R = 0.9;
  double rho = 0.5;
  int N_max = 8;
  std::vector<double> eps_list{0.1, 0.05};
  double z_radius = 0.5;
  double z_sample_radius = 0.3;
  double residual_tol = 1e-4;
  double root_tol = 1e-12;
  unsigned seed = 12345;
  ConvGridParams grid;
  LaplaceTruncation laplace;
  TSampleSpec t_samples;
  SectorSampling sector;
};

struct Spec {
  Equation eq;
  PipelineParams params;
};

// Throws ParseError (malformed JSON, wrong types, unknown keys) or SpecError (missing keys, invariants).
Spec parse_spec(const std::string& text, const std::string& origin = "<spec>");
Spec load_spec(const std::string& path);

// Normalized form with every default filled in; parse_spec(to_json(s).dump()) reproduces s.
json spec_to_json(const Spec& s);

// [[it, iz, re, im], ...] over nonzero coefficients, ordered by (it, iz).
json monomials_to_json(const TSeries<>& s);
// One [[re, im], ...] array per t-coefficient.
json series_to_json(const TSeries<>& s);
json zpoly_to_json(const ZPolyc& p);
json cplx_to_json(cplx c);

bool operator==(const PipelineParams& a, const PipelineParams& b);
bool same_equation(const Equation& a, const Equation& b);

}  // namespace qsum
