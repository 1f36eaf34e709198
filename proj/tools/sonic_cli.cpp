// sonic: command-line driver for the semi-hyperbolic patch pipeline.
//
//   sonic all --config configs/reference.cfg --out out
//   sonic diagnose --strict --refine 2
//
// Exit codes: 0 ok, 2 config error, 3 solver failure, 4 strict violation.

#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sonic/io.hpp"
#include "sonic/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kStrict = 4 };

struct Options {
  std::string config_path;
  std::string out;
  bool strict = false;
  int refine = 1;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run(const std::string& sub, const Options& o) {
  sonic::SolverConfig cfg;
  try {
    cfg = o.config_path.empty() ? sonic::reference_config() : sonic::load_config(o.config_path);
    if (o.refine < 1) throw sonic::ConfigError("--refine must be >= 1");
    cfg = cfg.refined(o.refine);
    if (!o.out.empty()) cfg.output_dir = o.out;
    cfg.validate();
  } catch (const sonic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  }

  std::vector<sonic::Artifact> artifacts;
  std::vector<std::string> violations;
  const bool all = sub == "all";
  try {
    if (sub == "trace" || all) {
      const auto tr = sonic::run_trace(cfg);
      artifacts.emplace_back("trace.csv", sonic::trace_csv(tr.ab));
      std::cerr << "trace: " << tr.ab.points.size() << " points, endpoint error "
                << sonic::format_double(tr.endpoint_error) << "\n";
    }
    std::optional<sonic::MarchRun> run;
    if (sub == "solve") {
      const auto mesh = sonic::solve(cfg);
      artifacts.emplace_back("mesh.csv", sonic::mesh_csv(mesh));
      std::cerr << "solve: " << mesh.size() << " nodes\n";
    }
    if (sub == "march" || sub == "diagnose" || all) {
      run = sonic::run_march(cfg);
      if (all) artifacts.emplace_back("mesh.csv", sonic::mesh_csv(run->mesh));
      if (sub == "march" || all) artifacts.emplace_back("field.csv", sonic::field_csv(run->field));
      std::cerr << "march: " << run->stats.steps << " steps down to t = "
                << sonic::format_double(run->field.bottom().t) << "\n";
    }
    if (sub == "diagnose" || all) {
      const auto rep = sonic::run_diagnose(cfg, *run);
      artifacts.emplace_back("diagnostics.json", sonic::diagnostics_json(cfg, *run, rep));
      std::cout << sonic::diagnostics_summary_csv(rep);
      if (o.strict) violations = sonic::strict_violations(cfg, rep);
    }
    if (sub == "verify" || all) {
      const auto rep = sonic::run_verify(cfg);
      artifacts.emplace_back("verify.json", sonic::verify_json(rep));
      std::cout << sonic::verify_summary_csv(rep);
      if (o.strict && !rep.passed()) violations.push_back("identity verification failed");
    }
  } catch (const sonic::SolverFailure& e) {
    std::cerr << "solver failure at mesh node (" << e.i() << ", " << e.j() << "): " << e.what()
              << "\n";
    return kSolver;
  } catch (const sonic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  }

  try {
    for (const auto& [name, bytes] : artifacts) sonic::write_file(cfg.output_dir, name, bytes);
    sonic::write_file(cfg.output_dir, "manifest.txt",
                      sonic::manifest_text(cfg, sub, o.refine, artifacts));
    sonic::write_file(cfg.output_dir, "timestamp.txt", utc_now() + "\n");
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kConfig;
  }

  for (const auto& v : violations) std::cerr << "strict: " << v << "\n";
  return violations.empty() ? kOk : kStrict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-hyperbolic patch and sonic-curve regularity for the Chaplygin wave system"};
  app.require_subcommand(1, 1);
  Options o;
  const char* subs[][2] = {
      {"trace", "trace the AB characteristic of the planar wave"},
      {"solve", "solve the Goursat problem on the characteristic mesh"},
      {"march", "continue the solution to the sonic curve in (r, t)"},
      {"diagnose", "regularity diagnostics and sonic-curve report"},
      {"verify", "finite-difference certification of the identities"},
      {"all", "every stage; writes all five artifacts"},
  };
  std::string chosen;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s[0], s[1]);
    sub->add_option("--config", o.config_path, "key = value config file (default: reference)");
    sub->add_option("--out", o.out, "output directory (overrides output_dir)");
    sub->add_flag("--strict", o.strict, "exit 4 when an acceptance threshold is violated");
    sub->add_option("--refine", o.refine, "global mesh refinement multiplier");
    sub->callback([&chosen, sub] { chosen = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;  // help is not an error
  }
  return run(chosen, o);
}
