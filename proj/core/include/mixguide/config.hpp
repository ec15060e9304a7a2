#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mixguide/guidance.hpp"
#include "mixguide/sampler.hpp"
#include "mixguide/schedule.hpp"

namespace mixguide {

std::uint64_t fnv1a64(std::string_view data);

// Flat `key = value` text with '#' comments and a mandatory version key.
// Values keep their raw spelling; typed access parses on demand with
// line-numbered diagnostics.
class ConfigMap {
 public:
  static ConfigMap parse_text(const std::string& text, const std::string& origin = "<text>");
  static ConfigMap parse_file(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { kv_[key] = {value, 0}; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;  // comma-separated

  const std::map<std::string, std::pair<std::string, int>>& entries() const { return kv_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::pair<std::string, int>> kv_;  // key -> (value, line)
  std::string origin_;
};

// Fully resolved experiment. `canonical` reserializes every effective key
// sorted with round-trip float formatting; its FNV-1a 64 digest names all
// outputs.
struct ExperimentConfig {
  std::string world_path;
  int label_content = 0;
  int label_style = 0;
  GuidanceConfig guidance;
  bool use_condition_schedule = true;
  ConditionSchedule cond;
  int noise_steps = 1000;
  NoiseKind noise_kind = NoiseKind::linear;
  double beta_min = 1e-4;
  double beta_max = 0.02;
  SamplerConfig sampler;  // steps resolved (explicit list or uniform count)
  int sampler_step_count = 100;
  Eigen::VectorXd x0;
  int n = 1000;
  std::uint64_t seed = 0;
  std::string out_dir = ".";

  std::string canonical;
  std::string hash;  // 16 hex digits
};

// Applies defaults, rejects unknown keys, validates every constraint.
// ParseError for syntax/unknown keys, ConstraintError for violated ranges.
ExperimentConfig resolve_experiment(const ConfigMap& cfg);
ExperimentConfig load_experiment(const std::string& path);

}  // namespace mixguide
