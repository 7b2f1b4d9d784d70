#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsum/laplace.hpp"
#include "qsum/spec_io.hpp"

namespace qsum {

enum class Stage { Check, Formal, Reduce, Continue, Sum, Verify };

const char* stage_name(Stage s);

struct RunOptions {
  Stage last = Stage::Verify;
  std::optional<cplx> lambda;  // overrides the spec
  std::optional<int> mu;       // overrides the spec
};

// Everything the stages produce; fields past the last completed stage stay empty.
struct PipelineState {
  Spec spec;
  json report;
  int exit_code = 0;
  std::optional<Stage> failed;
  std::string message;
  std::string suggestion;

  AssumptionReport assumptions;
  NewtonPolygon polygon;
  DirectionSet directions;
  cplx lambda{1.0, 0.0};
  AngleInterval interval;
  double delta_hat = 0.0;

  std::optional<FormalSolution> sol;
  GevreyCertificate growth;

  int mu = 0;
  double beta_hat = 0.0;
  std::optional<ConvEquation> ceq;
  XiSeries<> u0;

  std::optional<RayGrid> grid;
  GevreyCertificate ray_bound;
  double grid_residual = 0.0;

  std::optional<SummedSolution> W;
  std::vector<cplx> t_samples;
  double residual = 0.0;

  GevreyCertificate gevrey;
  std::vector<PlotRow> plot;
};

// Runs check, formal, reduce, continue, sum and verify in order up to opts.last.
// Errors are caught per stage and mapped to exit codes 2 (validation), 3 (numeric) and 4 (certificate).
PipelineState run_pipeline(const Spec& spec, const RunOptions& opts = {});

// beta_hat of the reduced equation for a given mu, from majorant fits of the c_{i,0} with i < m0.
struct BetaHat {
  double sum = 0.0;  // sum of C_{i,0} / (delta_hat (1 - h0/h)), so beta_hat = sum / [m0 + mu]_q
  double h0 = 0.0;
  int terms = 0;
};
BetaHat beta_hat_terms(const ConvEquation& ceq, double delta_hat, double z_radius);

// Writes report.json, spec.normalized.json and the CSV dumps of the completed stages.
void write_artifacts(const PipelineState& st, const std::string& dir, bool emit_plot);

// Spec of the equation in tau = t^{1/2}; pipeline settings tied to the t-plane are reset to defaults.
Spec halved_spec(const Spec& spec, json* report = nullptr);

}  // namespace qsum
