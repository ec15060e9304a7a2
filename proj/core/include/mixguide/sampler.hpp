#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mixguide/guidance.hpp"
#include "mixguide/oracle.hpp"
#include "mixguide/rng.hpp"
#include "mixguide/schedule.hpp"

namespace mixguide {

enum class SamplerKind { ddpm, ddim };
enum class StartKind { pure_noise, sdedit, inverted };

struct SamplerConfig {
  SamplerKind kind = SamplerKind::ddim;
  double eta = 0.0;
  std::vector<int> steps;  // strictly increasing, within [0, T-1]
  StartKind start = StartKind::pure_noise;
  int sdedit_t0 = 0;  // original-schedule timestep; snapped to nearest member

  // throws ConstraintError; eta = 0 required for start = inverted
  void validate(int total_steps) const;
};

// unique(round(linspace(0, T-1, count))): uniform stride with both endpoints
std::vector<int> uniform_steps(int total_steps, int count);

SamplerKind sampler_kind_from_string(const std::string& name);
StartKind start_kind_from_string(const std::string& name);
std::string to_string(SamplerKind kind);
std::string to_string(StartKind kind);

// One reverse transition x_t -> x_{t-1}; t >= 1.
Eigen::VectorXd ddpm_step(const Eigen::VectorXd& x, const Eigen::VectorXd& eps, int t,
                          const NoiseSchedule& ns, RandomStream& rng);

// One reverse transition t_from -> t_to (t_to < t_from); eta = 0 is
// deterministic. rng is untouched when eta = 0.
Eigen::VectorXd ddim_step(const Eigen::VectorXd& x, const Eigen::VectorXd& eps,
                          int t_from, int t_to, double eta, const NoiseSchedule& ns,
                          RandomStream& rng);

// terminal update at the lowest noise level: the x0 prediction
Eigen::VectorXd predict_x0(const Eigen::VectorXd& x, const Eigen::VectorXd& eps, int t,
                           const NoiseSchedule& ns);

// Deterministic inversion of the eta = 0 DDIM pass: returns the latent at
// steps.back() whose forward pass through `field` reconstructs x0. Each leg
// solves its implicit update by fixed-point iteration, so the round trip is
// exact to iteration tolerance rather than first order in the stride. Empty
// steps returns x0.
Eigen::VectorXd reverse_ddim(const Eigen::VectorXd& x0, const CompositeField& field,
                             const NoiseSchedule& ns, const std::vector<int>& steps);

struct StepRecord {
  int t_from = 0;
  int t_to = -1;  // -1 marks the terminal x0 prediction
  EpsRecord eps;
};

struct Trajectory {
  // (t, x_t) at every visited noise level, decreasing t
  std::vector<std::pair<int, Eigen::VectorXd>> states;
  Eigen::VectorXd output;
  std::vector<StepRecord> records;
};

struct RunSpec {
  const NoiseSchedule* ns = nullptr;
  const CompositeField* field = nullptr;
  SamplerConfig sampler;
  Eigen::VectorXd x0;  // reference point for sdedit / inverted starts
  int n = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
};

// n trajectories; trajectory k draws from RandomStream(seed, k), so results
// are identical for any jobs value or execution order.
Eigen::MatrixXd run_terminal(const RunSpec& spec);
std::vector<Trajectory> run_trajectories(const RunSpec& spec);

}  // namespace mixguide
