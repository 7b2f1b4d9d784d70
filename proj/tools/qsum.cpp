// qsum: command-line driver for the q-Borel summation pipeline.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qsum/identities.hpp"
#include "qsum/pipeline.hpp"

using namespace qsum;

namespace {

struct Args {
  std::string spec;
  std::string out;
  std::string lambda;
  std::optional<int> mu;
  bool plot = false;
  bool halve = false;
};

cplx parse_lambda(const std::string& s) {
  auto comma = s.find(',');
  try {
    std::size_t used = 0;
    double re = std::stod(s.substr(0, comma), &used);
    double im = comma == std::string::npos ? 0.0 : std::stod(s.substr(comma + 1));
    return {re, im};
  } catch (const std::exception&) {
    throw SpecError("--lambda expects RE,IM, got '" + s + "'");
  }
}

int emit(const json& report, const std::string& out, const std::string& file) {
  if (out.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::filesystem::create_directories(out);
    std::ofstream(std::filesystem::path(out) / file, std::ios::binary) << report.dump(2) << "\n";
  }
  return 0;
}

int run_stages(const Args& a, Stage last) {
  Spec spec = load_spec(a.spec);
  if (a.halve) spec = halved_spec(spec);
  RunOptions opts;
  opts.last = last;
  if (!a.lambda.empty()) opts.lambda = parse_lambda(a.lambda);
  opts.mu = a.mu;
  PipelineState st = run_pipeline(spec, opts);
  if (a.out.empty()) std::cout << st.report.dump(2) << "\n";
  else write_artifacts(st, a.out, a.plot);
  if (st.exit_code != 0) {
    std::cerr << "qsum: " << stage_name(*st.failed) << ": " << st.message << "\n";
    if (!st.suggestion.empty()) std::cerr << "qsum: hint: " << st.suggestion << "\n";
  } else if (!a.out.empty()) {
    std::cout << "qsum: " << stage_name(last) << " complete, reports in " << a.out << "\n";
  }
  return st.exit_code;
}

int run_halve(const Args& a) {
  Spec spec = load_spec(a.spec);
  json report;
  Spec tau = halved_spec(spec, &report);
  if (!a.out.empty()) {
    std::filesystem::create_directories(a.out);
    std::ofstream(std::filesystem::path(a.out) / "tau_spec.json", std::ios::binary) << spec_to_json(tau).dump(2) << "\n";
  }
  return emit(report, a.out, "halve.json");
}

int run_identities(const Args& a) {
  auto t0 = std::chrono::steady_clock::now();
  IdentityReport r = run_identity_suite();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json j = json::array();
  for (const auto& f : r.families) {
    j.push_back(json{{"family", f.name}, {"checks", f.checks}, {"failures", f.failures}, {"failed", f.failed}});
    std::cerr << f.name << ": " << f.checks - f.failures << "/" << f.checks << " exact\n";
  }
  std::cerr << "identities: " << secs << " s\n";
  emit(json{{"families", j}, {"all_pass", r.all_pass()}}, a.out, "identities.json");
  return r.all_pass() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"q-Borel summation of linear q-difference-differential equations"};
  app.require_subcommand(1);
  Args a;

  struct Cmd {
    const char* name;
    const char* help;
    std::optional<Stage> last;
  };
  const Cmd cmds[] = {
      {"check", "Newton polygon, structural assumptions and sector bound", Stage::Check},
      {"formal", "formal solution and its q-Gevrey growth certificate", Stage::Formal},
      {"borel", "reduction to the convolution equation in the Borel plane", Stage::Reduce},
      {"continue", "continuation of the Borel-plane solution along the ray", Stage::Continue},
      {"sum", "q-Laplace summation and equation residual", Stage::Sum},
      {"verify", "all stages and the q-Gevrey asymptotic certificate", Stage::Verify},
      {"halve", "rewrite the equation in tau = t^(1/2) and emit the tau-spec", std::nullopt},
  };
  std::vector<std::pair<CLI::App*, std::optional<Stage>>> subs;
  for (const auto& c : cmds) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    s->add_option("--spec", a.spec, "equation spec (JSON)")->required()->check(CLI::ExistingFile);
    s->add_option("--out", a.out, "output directory; reports go to stdout when omitted");
    if (c.last) {
      s->add_option("--lambda", a.lambda, "summation direction as RE,IM");
      s->add_option("--mu", a.mu, "reduction order");
      s->add_flag("--emit-plot-data", a.plot, "write plot.csv of |W| and remainders");
      s->add_flag("--halve", a.halve, "pass to tau = t^(1/2) before running");
    }
    subs.push_back({s, c.last});
  }
  CLI::App* ident = app.add_subcommand("identities", "exact rational identity suites");
  ident->add_option("--out", a.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ident->parsed()) return run_identities(a);
    for (auto& [s, last] : subs) {
      if (!s->parsed()) continue;
      return last ? run_stages(a, *last) : run_halve(a);
    }
  } catch (const ValidationError& e) {
    std::cerr << "qsum: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "qsum: " << e.what() << "\n";
    return 3;
  } catch (const CertificateError& e) {
    std::cerr << "qsum: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
