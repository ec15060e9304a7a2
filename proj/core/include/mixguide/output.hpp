#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mixguide/sampler.hpp"

namespace mixguide {

// Space-separated text, '#' header lines carrying tool version, config
// digest, and column names. Floats use shortest round-trip formatting, so
// identical runs produce byte-identical files.
struct OutputHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string world;
  std::vector<std::string> columns;
};

std::string render_header(const OutputHeader& h);
std::string render_samples(const Eigen::MatrixXd& rows, const OutputHeader& h);
// one row per recorded step: trajectory id, t, state, per-term eps norms;
// final row per trajectory has t = -1 and the denoised output
std::string render_trajectories(const std::vector<Trajectory>& trajs, OutputHeader h);

struct MetricRow {
  std::string config_hash;
  std::string metric;
  double value = 0.0;
  int n = 0;
  std::uint64_t seed = 0;
};
std::string render_metrics(const std::vector<MetricRow>& rows, const OutputHeader& h,
                           const std::vector<std::string>& footer = {});

void write_text_file(const std::string& path, const std::string& content);

}  // namespace mixguide
