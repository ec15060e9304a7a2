#include <cstdint>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mixguide/config.hpp"
#include "mixguide/errors.hpp"
#include "mixguide/output.hpp"
#include "mixguide/runner.hpp"
#include "mixguide/version.hpp"
#include "mixguide/worldio.hpp"

namespace {

using namespace mixguide;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;
};

void add_common(CLI::App* sub, CommonArgs* args, bool with_run_flags) {
  sub->add_option("--config", args->config_path, "experiment config file")->required();
  sub->add_option("--out", args->out_dir, "output directory (overrides config)");
  if (with_run_flags) {
    sub->add_option("--seed", args->seed, "seed override (enters the config digest)");
    sub->add_option("--jobs", args->jobs, "worker threads; results are jobs-invariant")
        ->check(CLI::PositiveNumber);
  }
}

// file -> overrides -> resolved experiment; overrides precede resolution so
// the config digest covers them
ExperimentConfig resolve_args(const CLI::App* sub, const CommonArgs& args) {
  ConfigMap map = ConfigMap::parse_file(args.config_path);
  const CLI::Option* seed = sub->get_option_no_throw("--seed");
  if (seed && seed->count()) map.set("seed", std::to_string(args.seed));
  if (sub->count("--out")) map.set("out", args.out_dir);
  return resolve_experiment(map);
}

void print_report(const CheckReport& report) {
  for (const CheckLine& line : report.lines)
    fmt::print("{:4} {}: {}\n", line.pass ? "ok" : "FAIL", line.name, line.detail);
}

int finish_report(const CheckReport& report) {
  int failed = 0;
  for (const CheckLine& line : report.lines) failed += line.pass ? 0 : 1;
  if (failed) {
    fmt::print("{} invariant(s) failed\n", failed);
    return kExitInvariant;
  }
  fmt::print("all {} invariants hold\n", report.lines.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{fmt::format("mixguide {}: guided sampling workbench for Gaussian-mixture worlds",
                           kVersion)};
  app.require_subcommand(1);

  CommonArgs args;
  bool trajectories = false;
  std::string grid_text;
  std::string world_path;

  CLI::App* validate = app.add_subcommand("validate", "audit a config and its world invariants");
  add_common(validate, &args, /*with_run_flags=*/true);

  CLI::App* simulate = app.add_subcommand("simulate", "sample trajectories and fit metrics");
  add_common(simulate, &args, /*with_run_flags=*/true);
  simulate->add_flag("--trajectories", trajectories, "also dump per-step trajectory records");

  CLI::App* sweep = app.add_subcommand("sweep", "grid sweep over guidance knobs");
  add_common(sweep, &args, /*with_run_flags=*/true);
  sweep->add_option("--grid", grid_text, "axes, e.g. 'lambda=0,0.5,1;alpha=1,1.5'")->required();

  CLI::App* schedule_plot =
      app.add_subcommand("schedule-plot", "tabulate condition weights and snr per timestep");
  add_common(schedule_plot, &args, /*with_run_flags=*/false);

  CLI::App* validate_world =
      app.add_subcommand("validate-world", "audit a world fixture file");
  validate_world->add_option("world", world_path, "world fixture file")->required();

  try {
    app.parse(argc, argv);

    if (validate->parsed()) {
      ExperimentConfig cfg = resolve_args(validate, args);
      fmt::print("config {}\n", cfg.hash);
      CheckReport report = validate_experiment(cfg);
      print_report(report);
      return finish_report(report);
    }

    if (simulate->parsed()) {
      ExperimentConfig cfg = resolve_args(simulate, args);
      fmt::print("config {}\n", cfg.hash);
      SimulateArtifacts art = run_simulate(cfg, args.jobs, trajectories);
      fmt::print("wrote {}\n", art.samples_path);
      fmt::print("wrote {}\n", art.metrics_path);
      if (!art.trajectories_path.empty()) fmt::print("wrote {}\n", art.trajectories_path);
      return kExitOk;
    }

    if (sweep->parsed()) {
      ConfigMap map = ConfigMap::parse_file(args.config_path);
      if (sweep->count("--seed")) map.set("seed", std::to_string(args.seed));
      if (sweep->count("--out")) map.set("out", args.out_dir);
      SweepArtifacts art = run_sweep(map, parse_grid(grid_text), args.jobs);
      for (const std::string& line : art.summary) fmt::print("{}\n", line);
      fmt::print("wrote {}\n", art.table_path);
      return kExitOk;
    }

    if (schedule_plot->parsed()) {
      ExperimentConfig cfg = resolve_args(schedule_plot, args);
      std::string path = schedule_plot_path(cfg);
      write_text_file(path, render_schedule_table(cfg));
      fmt::print("wrote {}\n", path);
      return kExitOk;
    }

    if (validate_world->parsed()) {
      World w = load_world(world_path);
      fmt::print("world {} ({}d, {} content x {} style labels)\n", w.name(), w.dim(),
                 w.content_count(), w.style_count());
      CheckReport report = validate_world_report(w);
      print_report(report);
      return finish_report(report);
    }
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  } catch (const ParseError& e) {
    fmt::print(stderr, "parse error: {}\n", e.what());
    return kExitParse;
  } catch (const ConstraintError& e) {
    fmt::print(stderr, "constraint violated: {}\n", e.what());
    return kExitConstraint;
  } catch (const InvariantError& e) {
    fmt::print(stderr, "invariant violated: {}\n", e.what());
    return kExitInvariant;
  }
  return kExitOk;
}
