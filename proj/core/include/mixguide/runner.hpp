#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mixguide/config.hpp"
#include "mixguide/output.hpp"
#include "mixguide/world.hpp"

namespace mixguide {

// Experiment drivers behind the CLI subcommands. Artifact files land in
// cfg.out_dir, named <config-digest>-<kind>.txt, so distinct configurations
// never collide and reruns overwrite their own outputs.

struct SimulateArtifacts {
  std::string samples_path;
  std::string metrics_path;
  std::string trajectories_path;  // empty unless requested
  Eigen::VectorXd mean;           // terminal-sample moments
  Eigen::MatrixXd cov;
};

SimulateArtifacts run_simulate(const ExperimentConfig& cfg, int jobs, bool trajectories);

// Cartesian grid "key=v1,v2,...;key2=..." over the guidance and schedule
// knobs. Each point rewrites the base config, so each point carries its own
// digest in the table.
struct SweepSpec {
  std::vector<std::pair<std::string, std::vector<double>>> axes;
};
SweepSpec parse_grid(const std::string& text);

struct SweepArtifacts {
  std::string table_path;
  std::vector<MetricRow> rows;
  std::vector<std::string> summary;  // argmax/argmin lines, also in the file footer
};

SweepArtifacts run_sweep(const ConfigMap& base, const SweepSpec& grid, int jobs);

// t, w_c, w_s, snr for every timestep of the resolved schedules
std::string render_schedule_table(const ExperimentConfig& cfg);
std::string schedule_plot_path(const ExperimentConfig& cfg);

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  bool ok() const {
    for (const CheckLine& l : lines)
      if (!l.pass) return false;
    return true;
  }
};

// Invariant audit of a resolved experiment: schedules, sampler plan,
// guidance identities against the world's oracle fields, world consistency.
CheckReport validate_experiment(const ExperimentConfig& cfg);

// World-only audit: weight normalization, covariance admissibility, marginal
// reconstruction, label dependence.
CheckReport validate_world_report(const World& w);

}  // namespace mixguide
