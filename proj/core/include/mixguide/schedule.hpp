#pragma once

#include <string>
#include <vector>

namespace mixguide {

enum class NoiseKind { linear, cosine };

// Discrete forward-process constants. Invariants (enforced by
// build_noise_schedule): 0 < beta_t < 1, alpha_bar strictly decreasing,
// snr strictly decreasing.
struct NoiseSchedule {
  int steps = 0;
  std::vector<double> beta;
  std::vector<double> alpha_bar;
  std::vector<double> sqrt_alpha_bar;
  std::vector<double> sigma;  // sqrt(1 - alpha_bar)

  double snr(int t) const { return alpha_bar[t] / (1.0 - alpha_bar[t]); }

  // variance of the reverse posterior q(x_{t-1} | x_t, x_0), t >= 1
  double posterior_beta(int t) const {
    return (1.0 - alpha_bar[t - 1]) / (1.0 - alpha_bar[t]) * beta[t];
  }
};

NoiseSchedule build_noise_schedule(int steps, NoiseKind kind, double beta_min,
                                   double beta_max);

inline NoiseSchedule default_noise_schedule() {
  return build_noise_schedule(1000, NoiseKind::linear, 1e-4, 0.02);
}

enum class WeightKind { sigmoid, linear, exclusive, constant };

// Timestep weighting of the two condition channels. Content weight rises
// with t (high noise -> structure), style weight mirrors it. `steps` is the
// horizon the linear ramp spans; other kinds ignore it.
struct ConditionSchedule {
  WeightKind kind = WeightKind::sigmoid;
  double a = 0.025;
  double b = 550.0;
  double floor = 0.0;
  double ceiling = 1.0;
  int steps = 1000;
};

// Throws ConstraintError unless 0 <= floor < ceiling <= 1, steps >= 2, and
// a, b are finite.
void validate_condition_schedule(const ConditionSchedule& s);

// Total on all real t (the bounded forms stay in [floor, ceiling] far outside
// [0, steps-1]).
double weight_content(const ConditionSchedule& s, double t);
double weight_style(const ConditionSchedule& s, double t);

NoiseKind noise_kind_from_string(const std::string& name);
WeightKind weight_kind_from_string(const std::string& name);
std::string to_string(NoiseKind kind);
std::string to_string(WeightKind kind);

}  // namespace mixguide
