#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "ftq/analysis/normal_form.hpp"
#include "ftq/analysis/stability.hpp"
#include "ftq/scenario/config.hpp"
#include "ftq/scenario/io.hpp"
#include "ftq/scenario/runner.hpp"

namespace fs = std::filesystem;
using namespace ftq;

namespace {

struct CommonOptions {
  std::string config;
  std::string out = ".";
  long long seed = -1;
  std::string controller;
  double chi_deg = std::nan("");
};

void add_common(CLI::App* app, CommonOptions& o, bool with_controller = true) {
  app->add_option("--config", o.config, "Scenario config (YAML)");
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--seed", o.seed, "RNG seed override")->check(CLI::NonNegativeNumber);
  if (with_controller) {
    app->add_option("--controller", o.controller, "Inner-loop controller")->check(CLI::IsMember({"indi", "lqr"}));
  }
  app->add_option("--chi-deg", o.chi_deg, "|chi| override in degrees");
}

Config load(const CommonOptions& o) {
  Config c = o.config.empty() ? parse_config_text("", "<defaults>") : load_config(o.config);
  if (o.seed >= 0) c.sim.seed = static_cast<unsigned long long>(o.seed);
  if (o.controller == "indi") c.controller = ControllerKind::Indi;
  if (o.controller == "lqr") c.controller = ControllerKind::Lqr;
  if (std::isfinite(o.chi_deg)) c.inner.chi_abs = deg2rad(o.chi_deg);
  c.validate();
  return c;
}

std::string in_out(const CommonOptions& o, const std::string& name) {
  fs::create_directories(o.out);
  return (fs::path(o.out) / name).string();
}

void print_summary(const RunSummary& s) {
  std::printf("%-14s %-5s chi=%6.1f deg  crashed=%d%s%s  rms=%.4f m  final=%.4f m  max|eta1|=%.4f  wind=%.2f m/s\n",
              s.scenario.c_str(), s.controller.c_str(), s.chi_deg, s.crashed ? 1 : 0,
              s.crashed ? " cause=" : "", s.crashed ? s.cause.c_str() : "", s.rms_error, s.final_error,
              s.max_abs_eta1, s.max_wind);
}

ChiSweepResult sweep(const Config& c) {
  return chi_sweep(c.vehicle, c.failure, default_chi_grid(c.vehicle, c.scenario.sweep_step_deg));
}

void print_intervals(const ChiSweepResult& r) {
  if (r.admissible.empty()) std::printf("admissible |chi|: none\n");
  for (const auto& iv : r.admissible) {
    std::printf("admissible |chi|: [%.1f, %.1f] deg\n", rad2deg(iv.lo), rad2deg(iv.hi));
  }
}

int cmd_run(const CommonOptions& o) {
  const Config c = load(o);
  if (c.scenario.kind == ScenarioKind::ChiSweep) {
    const ChiSweepResult r = sweep(c);
    auto out = open_output(in_out(o, "chi_sweep.csv"));
    write_sweep_csv(out, r);
    print_intervals(r);
    return 0;
  }
  const RunResult r = run_scenario(c);
  {
    auto out = open_output(in_out(o, "trace.csv"));
    write_trace_csv(out, r.trace);
  }
  {
    auto out = open_output(in_out(o, "summary.csv"));
    write_summary_csv(out, {r.summary});
  }
  print_summary(r.summary);
  return 0;
}

int cmd_sweep(const CommonOptions& o, const std::vector<double>& simulate_deg) {
  Config c = load(o);
  const ChiSweepResult r = sweep(c);
  {
    auto out = open_output(in_out(o, "chi_sweep.csv"));
    write_sweep_csv(out, r);
  }
  print_intervals(r);
  if (simulate_deg.empty()) return 0;

  // One 3 m step transfer per requested |chi|, each on its own thread.
  c.scenario.kind = ScenarioKind::StepTransfer;
  c.scenario.duration = std::max(c.scenario.duration, 10.0);
  std::vector<RunSummary> results(simulate_deg.size());
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < simulate_deg.size(); ++i) {
    workers.emplace_back([&, i] {
      Config ci = c;
      ci.inner.chi_abs = deg2rad(simulate_deg[i]);
      results[i] = run_scenario(ci).summary;
    });
  }
  for (auto& w : workers) w.join();
  auto out = open_output(in_out(o, "sweep_runs.csv"));
  write_summary_csv(out, results);
  for (const auto& s : results) print_summary(s);
  return 0;
}

int cmd_compare(const CommonOptions& o) {
  Config c = load(o);
  std::vector<RunSummary> rows;
  for (auto kind : {ControllerKind::Indi, ControllerKind::Lqr}) {
    c.controller = kind;
    const RunResult r = run_scenario(c);
    auto out = open_output(in_out(o, std::string("trace_") + r.summary.controller + ".csv"));
    write_trace_csv(out, r.trace);
    rows.push_back(r.summary);
    print_summary(r.summary);
  }
  auto out = open_output(in_out(o, "summary.csv"));
  write_summary_csv(out, rows);
  return 0;
}

int cmd_trim(const CommonOptions& o) {
  const Config c = load(o);
  const TrimEquilibrium t = trim(c.vehicle, c.failure);
  const auto& p = c.vehicle;
  std::printf("failure        %s (s_l=%+d, s_n=%+d)\n", to_string(c.failure.mode), c.failure.s_l, c.failure.s_n);
  std::printf("r_bar          %.4f rad/s\n", t.r_bar);
  std::printf("omega_bar      %.4f rad/s\n", t.omega_bar);
  std::printf("zeta           %.4f deg\n", rad2deg(p.zeta()));
  std::printf("eta_bar        [%.4f, %.4f, %.4f]\n", t.eta_bar.x(), t.eta_bar.y(), t.eta_bar.z());
  const double chi = c.inner.chi_abs;
  const ChiPoint pt = classify(p, c.failure, chi, t);
  std::printf("|chi|          %.2f deg\n", rad2deg(chi));
  std::printf("Re(A1)         %.6f, %.6f\n", pt.re1, pt.re2);
  std::printf("r_B            %.4f\n", pt.rb);
  std::printf("verdict        %s\n", to_string(pt.verdict));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrotor fault-tolerant control laboratory"};
  app.require_subcommand(1);
  CommonOptions o;
  std::vector<double> simulate_deg;

  auto* run = app.add_subcommand("run", "Run the scenario in the config, write trace.csv and summary.csv");
  add_common(run, o);
  auto* sw = app.add_subcommand("sweep-chi", "Classify |chi| over (zeta, zeta + 180 deg), write chi_sweep.csv");
  add_common(sw, o, false);
  sw->add_option("--simulate-deg", simulate_deg, "Also fly a 3 m step transfer at these |chi| values");
  auto* cmp = app.add_subcommand("compare", "Run INDI and LQR on the same scenario");
  add_common(cmp, o, false);
  auto* tr = app.add_subcommand("print-trim", "Print the relaxed-hover trim and the |chi| classification");
  add_common(tr, o, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(o);
    if (sw->parsed()) return cmd_sweep(o, simulate_deg);
    if (cmp->parsed()) return cmd_compare(o);
    if (tr->parsed()) return cmd_trim(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid setting: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
