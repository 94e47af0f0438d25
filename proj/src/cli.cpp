#include "coopmitl/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coopmitl/errors.hpp"
#include "coopmitl/executive.hpp"
#include "coopmitl/mitl.hpp"
#include "coopmitl/planner.hpp"
#include "coopmitl/progression.hpp"
#include "coopmitl/scenario.hpp"
#include "coopmitl/trace_io.hpp"

namespace coopmitl {

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Options {
  std::string scenario;
  std::string plan;
  std::string trace;
  std::string report;
  std::string out_dir = ".";
  std::string formula;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  bool paper_faithful = false;
};

Scenario load(const Options& o) {
  Scenario s = load_scenario(o.scenario);
  if (!o.formula.empty()) s.formula = o.formula;
  if (o.dt) s.dt = *o.dt;
  if (o.seed) apply_seed(s, *o.seed);
  if (o.paper_faithful) s.envelopes.paper_faithful = true;
  s.validate();
  return s;
}

void print_syntax_error(std::ostream& err, const std::string& text, const SyntaxError& e) {
  err << "error: " << e.what() << "\n  " << text << "\n  "
      << std::string(std::min(e.offset(), text.size()), ' ') << "^\n";
}

int do_plan(const Options& o, std::ostream& out, std::ostream& err,
            std::optional<plan::Plan>* result = nullptr, const Scenario* preloaded = nullptr) {
  const Scenario s = preloaded != nullptr ? *preloaded : load(o);
  mitl::Formula f;
  try {
    f = mitl::parse(s.formula);
  } catch (const SyntaxError& e) {
    print_syntax_error(err, s.formula, e);
    return kUsage;
  }
  const auto wts = s.build_wts();
  const auto start = std::chrono::steady_clock::now();
  const auto p = plan::find_accepting_run(wts, f, s.initial_region);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!p) {
    err << "no accepting run for " << mitl::to_string(f) << "\n";
    return kFailed;
  }
  const std::string path = o.plan.empty() ? (std::filesystem::path(o.out_dir) / "plan.json").string()
                                          : o.plan;
  io::write_plan(path, *p, s.formula);
  out << "plan: " << p->steps.size() << " steps, loop from step " << p->loop_start + 1 << " ("
      << secs << " s) -> " << path << "\n  ";
  for (std::size_t i = 0; i < p->steps.size(); ++i) {
    out << (i == p->loop_start ? "[ " : "") << p->steps[i].region << "@" << p->steps[i].time
        << " ";
  }
  out << "]*\n";
  if (result != nullptr) *result = p;
  return kOk;
}

int do_simulate(const Options& o, std::ostream& out, std::ostream& err,
                const Scenario* preloaded = nullptr, const plan::Plan* preplanned = nullptr) {
  const Scenario s = preloaded != nullptr ? *preloaded : load(o);
  const plan::Plan p = preplanned != nullptr ? *preplanned : io::read_plan(o.plan);
  const std::string path =
      o.trace.empty() ? (std::filesystem::path(o.out_dir) / "trace.csv").string() : o.trace;
  exec::ExecutionTrace trace;
  const auto start = std::chrono::steady_clock::now();
  try {
    exec::execute_plan(s, p, trace);
  } catch (const ExecutionError& e) {
    io::write_trace(path, trace);
    err << "execution failed [" << to_string(e.code()) << "] at t=" << e.time()
        << " s: " << e.what() << "\npartial trace (" << trace.records.size()
        << " samples) -> " << path << "\n";
    return kFailed;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_trace(path, trace);
  out << "simulated " << trace.records.back().t << " s in " << secs << " s ("
      << trace.integrator.accepted << " substeps, smallest " << trace.integrator.smallest_step
      << " s) -> " << path << "\n";
  return kOk;
}

int do_verify(const Options& o, std::ostream& out, std::ostream& err,
              const Scenario* preloaded = nullptr) {
  const Scenario s = preloaded != nullptr ? *preloaded : load(o);
  mitl::Formula f;
  try {
    f = mitl::parse(s.formula);
  } catch (const SyntaxError& e) {
    print_syntax_error(err, s.formula, e);
    return kUsage;
  }
  const std::string plan_path =
      o.plan.empty() ? (std::filesystem::path(o.out_dir) / "plan.json").string() : o.plan;
  const std::string trace_path =
      o.trace.empty() ? (std::filesystem::path(o.out_dir) / "trace.csv").string() : o.trace;
  const std::string report_path =
      o.report.empty() ? (std::filesystem::path(o.out_dir) / "report.json").string() : o.report;
  const plan::Plan p = io::read_plan(plan_path);
  const exec::ExecutionTrace trace = io::read_trace(std::filesystem::path(trace_path));
  const exec::Report r = exec::verify_trace(trace, p, s, f);
  io::write_report(report_path, r);
  out << "formula " << (r.formula_satisfied ? "satisfied" : "NOT satisfied") << ", trace "
      << (r.complete ? "complete" : "incomplete") << ", " << r.violation_count
      << " violation(s), load-sharing error " << r.load_sharing_error << ", max |u| "
      << r.max_input << " -> " << report_path << "\n";
  for (const auto& v : r.violations) {
    err << "  t=" << v.t << " " << v.kind << ": " << v.detail << "\n";
    if (&v - r.violations.data() >= 9) {
      err << "  ...\n";
      break;
    }
  }
  return r.satisfied ? kOk : kFailed;
}

int do_run(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario s = load(o);
  std::filesystem::create_directories(o.out_dir);
  std::optional<plan::Plan> p;
  if (const int rc = do_plan(o, out, err, &p, &s); rc != kOk) return rc;
  Options paths = o;
  paths.plan = (std::filesystem::path(o.out_dir) / "plan.json").string();
  paths.trace = (std::filesystem::path(o.out_dir) / "trace.csv").string();
  paths.report = (std::filesystem::path(o.out_dir) / "report.json").string();
  if (!o.plan.empty()) io::write_plan(paths.plan, *p, s.formula);
  if (const int rc = do_simulate(paths, out, err, &s, &*p); rc != kOk) return rc;
  return do_verify(paths, out, err, &s);
}

int do_check(const std::string& text, std::ostream& out, std::ostream& err) {
  mitl::Formula f;
  try {
    f = mitl::parse(text);
  } catch (const SyntaxError& e) {
    print_syntax_error(err, text, e);
    return kUsage;
  }
  out << "canonical: " << mitl::to_string(f) << "\n";
  std::string reason;
  if (plan::in_fragment(f, &reason)) {
    out << "planner fragment: yes\n";
    return kOk;
  }
  out << "planner fragment: no (" << reason << ")\n";
  return kFailed;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Plan, simulate and verify cooperative object transport under MITL tasks",
               "coopmitl"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub, bool needs_scenario) {
    auto* sc = sub->add_option("--scenario", o.scenario, "Scenario TOML file");
    if (needs_scenario) sc->required()->check(CLI::ExistingFile);
    sub->add_option("--formula", o.formula, "Override the scenario formula");
    sub->add_option("--dt", o.dt, "Override the logging step (s)");
    sub->add_option("--seed", o.seed, "Override the disturbance seed");
    sub->add_flag("--paper-faithful-envelopes", o.paper_faithful,
                  "Use rho0 = l0 for position envelopes instead of l0/sqrt(3)");
    sub->add_option("--out-dir", o.out_dir, "Directory for default output files");
  };

  auto* plan_cmd = app.add_subcommand("plan", "Find an accepting run; writes plan JSON");
  common(plan_cmd, true);
  plan_cmd->add_option("--plan", o.plan, "Output plan file (default <out-dir>/plan.json)");

  auto* sim_cmd = app.add_subcommand("simulate", "Execute a plan; writes the trace CSV");
  common(sim_cmd, true);
  sim_cmd->add_option("--plan", o.plan, "Plan JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--trace", o.trace, "Output trace (default <out-dir>/trace.csv)");

  auto* verify_cmd = app.add_subcommand("verify", "Check a trace against the plan and formula");
  common(verify_cmd, true);
  verify_cmd->add_option("--plan", o.plan, "Plan JSON")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--trace", o.trace, "Trace CSV")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--report", o.report, "Output report (default <out-dir>/report.json)");

  auto* run_cmd = app.add_subcommand("run", "plan, simulate and verify in one go");
  common(run_cmd, true);
  run_cmd->add_option("--plan", o.plan, "Also copy the plan here");

  auto* check_cmd = app.add_subcommand("check", "Parse a formula and report the planner fragment");
  std::string positional;
  check_cmd->add_option("text", positional, "Formula text");
  check_cmd->add_option("--formula", o.formula, "Formula text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (*check_cmd) {
      const std::string text = !positional.empty() ? positional : o.formula;
      if (text.empty()) {
        err << "error: check needs a formula\n";
        return kUsage;
      }
      return do_check(text, out, err);
    }
    if (*plan_cmd) return do_plan(o, out, err);
    if (*sim_cmd) return do_simulate(o, out, err);
    if (*verify_cmd) return do_verify(o, out, err);
    if (*run_cmd) return do_run(o, out, err);
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::UnsupportedFragment ? kFailed : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace coopmitl
