#include "mixguide/schedule.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mixguide/errors.hpp"

namespace mixguide {

namespace {

// branch form keeps exp's argument nonpositive, so nothing overflows and
// logistic(z) + logistic(-z) == 1 holds to the last ulp
double logistic(double z) {
  if (z >= 0.0) {
    double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

void check_schedule_invariants(const NoiseSchedule& ns) {
  for (int t = 0; t < ns.steps; ++t) {
    if (!(ns.beta[t] > 0.0 && ns.beta[t] < 1.0))
      throw ConstraintError(fmt::format("beta[{}] = {} outside (0, 1)", t, ns.beta[t]));
    if (t > 0 && !(ns.alpha_bar[t] < ns.alpha_bar[t - 1]))
      throw ConstraintError(fmt::format("alpha_bar not strictly decreasing at t = {}", t));
  }
  if (!(ns.alpha_bar[0] <= 1.0 && ns.alpha_bar[ns.steps - 1] > 0.0))
    throw ConstraintError("alpha_bar must stay in (0, 1]");
}

}  // namespace

NoiseSchedule build_noise_schedule(int steps, NoiseKind kind, double beta_min,
                                   double beta_max) {
  if (steps < 2) throw ConstraintError(fmt::format("need at least 2 steps, got {}", steps));
  if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0))
    throw ConstraintError(
        fmt::format("beta range [{}, {}] violates 0 < beta_min <= beta_max < 1",
                    beta_min, beta_max));

  NoiseSchedule ns;
  ns.steps = steps;
  ns.beta.resize(steps);
  if (kind == NoiseKind::linear) {
    for (int t = 0; t < steps; ++t)
      ns.beta[t] = beta_min + (beta_max - beta_min) * t / double(steps - 1);
  } else {
    // alpha_bar follows the squared-cosine profile; beta derived, clipped away
    // from 1, then alpha_bar rebuilt from the clipped betas so the product
    // identity stays exact
    const double s = 0.008;
    auto f = [&](double u) {
      double c = std::cos((u + s) / (1.0 + s) * 1.5707963267948966);
      return c * c;
    };
    double f0 = f(0.0);
    double prev = 1.0;
    for (int t = 0; t < steps; ++t) {
      double ab = f(double(t + 1) / steps) / f0;
      double beta = 1.0 - ab / prev;
      ns.beta[t] = std::min(std::max(beta, 1e-8), 0.999);
      prev *= 1.0 - ns.beta[t];
    }
  }

  ns.alpha_bar.resize(steps);
  ns.sqrt_alpha_bar.resize(steps);
  ns.sigma.resize(steps);
  double prod = 1.0;
  for (int t = 0; t < steps; ++t) {
    prod *= 1.0 - ns.beta[t];
    ns.alpha_bar[t] = prod;
    ns.sqrt_alpha_bar[t] = std::sqrt(prod);
    ns.sigma[t] = std::sqrt(1.0 - prod);
  }
  check_schedule_invariants(ns);
  return ns;
}

void validate_condition_schedule(const ConditionSchedule& s) {
  if (!(s.floor >= 0.0 && s.floor < s.ceiling && s.ceiling <= 1.0))
    throw ConstraintError(fmt::format(
        "condition schedule needs 0 <= floor < ceiling <= 1, got [{}, {}]",
        s.floor, s.ceiling));
  if (s.steps < 2)
    throw ConstraintError(fmt::format("condition schedule needs steps >= 2, got {}", s.steps));
  if (!std::isfinite(s.a) || !std::isfinite(s.b))
    throw ConstraintError("condition schedule a and b must be finite");
}

double weight_content(const ConditionSchedule& s, double t) {
  double span = s.ceiling - s.floor;
  switch (s.kind) {
    case WeightKind::sigmoid:
      return s.floor + span * logistic(s.a * (t - s.b));
    case WeightKind::linear: {
      double u = t / double(s.steps - 1);
      u = u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u);
      return s.floor + span * u;
    }
    case WeightKind::exclusive:
      return t > s.b ? s.ceiling : s.floor;
    case WeightKind::constant:
      return 0.5 * (s.floor + s.ceiling);
  }
  return 0.0;  // unreachable
}

double weight_style(const ConditionSchedule& s, double t) {
  double span = s.ceiling - s.floor;
  switch (s.kind) {
    case WeightKind::sigmoid:
      // mirrored logistic, not 1 - w_c: the two must agree and that identity
      // is what gets tested
      return s.floor + span * logistic(s.a * (s.b - t));
    case WeightKind::linear: {
      double u = (double(s.steps - 1) - t) / double(s.steps - 1);
      u = u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u);
      return s.floor + span * u;
    }
    case WeightKind::exclusive:
      return t <= s.b ? s.ceiling : s.floor;
    case WeightKind::constant:
      return 0.5 * (s.floor + s.ceiling);
  }
  return 0.0;  // unreachable
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "linear") return NoiseKind::linear;
  if (name == "cosine") return NoiseKind::cosine;
  throw ParseError(fmt::format("unknown noise schedule kind '{}'", name));
}

WeightKind weight_kind_from_string(const std::string& name) {
  if (name == "sigmoid") return WeightKind::sigmoid;
  if (name == "linear") return WeightKind::linear;
  if (name == "exclusive") return WeightKind::exclusive;
  if (name == "constant") return WeightKind::constant;
  throw ParseError(fmt::format("unknown condition schedule kind '{}'", name));
}

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::linear ? "linear" : "cosine";
}

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::sigmoid: return "sigmoid";
    case WeightKind::linear: return "linear";
    case WeightKind::exclusive: return "exclusive";
    case WeightKind::constant: return "constant";
  }
  return "?";
}

}  // namespace mixguide
