#include "mixguide/sampler.hpp"

#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "mixguide/errors.hpp"

namespace mixguide {

void SamplerConfig::validate(int total_steps) const {
  if (steps.empty()) throw ConstraintError("step list must be non-empty");
  if (steps.front() < 0 || steps.back() > total_steps - 1)
    throw ConstraintError(fmt::format("step list must stay within [0, {}]", total_steps - 1));
  for (size_t k = 1; k < steps.size(); ++k)
    if (steps[k] <= steps[k - 1])
      throw ConstraintError("step list must be strictly increasing");
  if (!(eta >= 0.0)) throw ConstraintError(fmt::format("eta must be >= 0, got {}", eta));
  if (start == StartKind::inverted && eta != 0.0)
    throw ConstraintError("inverted start requires eta = 0");
  if (kind == SamplerKind::ddpm) {
    // the ancestral update moves t -> t-1 only
    for (size_t k = 1; k < steps.size(); ++k)
      if (steps[k] != steps[k - 1] + 1)
        throw ConstraintError("ddpm requires a contiguous step list");
  }
  if (start == StartKind::sdedit && (sdedit_t0 < 0 || sdedit_t0 > total_steps - 1))
    throw ConstraintError(
        fmt::format("sdedit start timestep {} outside [0, {}]", sdedit_t0, total_steps - 1));
}

std::vector<int> uniform_steps(int total_steps, int count) {
  if (count < 1 || count > total_steps)
    throw ConstraintError(fmt::format("step count {} outside [1, {}]", count, total_steps));
  std::vector<int> s;
  s.reserve(count);
  if (count == 1) {
    s.push_back(0);
    return s;
  }
  for (int k = 0; k < count; ++k) {
    int t = int(std::lround(double(k) * (total_steps - 1) / double(count - 1)));
    if (s.empty() || t != s.back()) s.push_back(t);
  }
  return s;
}

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "ddpm") return SamplerKind::ddpm;
  if (name == "ddim") return SamplerKind::ddim;
  throw ParseError(fmt::format("unknown sampler kind '{}'", name));
}

StartKind start_kind_from_string(const std::string& name) {
  if (name == "pure_noise") return StartKind::pure_noise;
  if (name == "sdedit") return StartKind::sdedit;
  if (name == "inverted") return StartKind::inverted;
  throw ParseError(fmt::format("unknown start kind '{}'", name));
}

std::string to_string(SamplerKind kind) {
  return kind == SamplerKind::ddpm ? "ddpm" : "ddim";
}

std::string to_string(StartKind kind) {
  switch (kind) {
    case StartKind::pure_noise: return "pure_noise";
    case StartKind::sdedit: return "sdedit";
    case StartKind::inverted: return "inverted";
  }
  return "?";
}

Eigen::VectorXd ddpm_step(const Eigen::VectorXd& x, const Eigen::VectorXd& eps, int t,
                          const NoiseSchedule& ns, RandomStream& rng) {
  if (t < 1) throw ConstraintError("ddpm step needs t >= 1");
  double bt = ns.beta[t];
  double scale = 1.0 / std::sqrt(1.0 - bt);
  double noise_sd = std::sqrt(ns.posterior_beta(t));
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out[i] = scale * (x[i] - bt / ns.sigma[t] * eps[i]) + noise_sd * rng.next_gaussian();
  return out;
}

Eigen::VectorXd ddim_step(const Eigen::VectorXd& x, const Eigen::VectorXd& eps,
                          int t_from, int t_to, double eta, const NoiseSchedule& ns,
                          RandomStream& rng) {
  if (t_to >= t_from)
    throw ConstraintError(fmt::format("ddim step needs t_to < t_from, got {} -> {}", t_from, t_to));
  double ab_from = ns.alpha_bar[t_from];
  double ab_to = ns.alpha_bar[t_to];
  double sig_eta = 0.0;
  if (eta != 0.0)
    sig_eta = eta * std::sqrt((1.0 - ab_to) / (1.0 - ab_from)) *
              std::sqrt(1.0 - ab_from / ab_to);
  double dir = std::sqrt(1.0 - ab_to - sig_eta * sig_eta);
  double a = ns.sqrt_alpha_bar[t_to] / ns.sqrt_alpha_bar[t_from];
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double x0 = (x[i] - ns.sigma[t_from] * eps[i]);
    out[i] = a * x0 + dir * eps[i];
    if (sig_eta != 0.0) out[i] += sig_eta * rng.next_gaussian();
  }
  return out;
}

Eigen::VectorXd predict_x0(const Eigen::VectorXd& x, const Eigen::VectorXd& eps, int t,
                           const NoiseSchedule& ns) {
  return (x - ns.sigma[t] * eps) / ns.sqrt_alpha_bar[t];
}

namespace {

constexpr double kFixedPointTol = 1e-13;
constexpr int kFixedPointCap = 60;

double rel_change(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

Eigen::VectorXd reverse_ddim(const Eigen::VectorXd& x0, const CompositeField& field,
                             const NoiseSchedule& ns, const std::vector<int>& steps) {
  if (steps.empty()) return x0;
  for (size_t k = 1; k < steps.size(); ++k)
    if (steps[k] <= steps[k - 1])
      throw ConstraintError("step list must be strictly increasing");

  int d = int(x0.size());
  Eigen::VectorXd eps(d);

  // terminal stage: the y at steps[0] whose x0 prediction is exactly x0,
  // i.e. y = sqrt(ab)*x0 + sigma*eps(y)
  int s0 = steps[0];
  Eigen::VectorXd y = ns.sqrt_alpha_bar[s0] * x0;
  for (int it = 0; it < kFixedPointCap; ++it) {
    field.eval(y.data(), s0, eps.data());
    Eigen::VectorXd next = ns.sqrt_alpha_bar[s0] * x0 + ns.sigma[s0] * eps;
    double change = rel_change(next, y);
    y = next;
    if (change < kFixedPointTol) break;
  }

  // each upward leg solves the implicit form of the downward update
  //   x_lo = sqrt(ab_lo/ab_u)*x_u + c*eps(x_u, u),
  //   c = sigma_lo - sqrt(ab_lo/ab_u)*sigma_u
  for (size_t k = 0; k + 1 < steps.size(); ++k) {
    int lo = steps[k];
    int u = steps[k + 1];
    double ratio = ns.sqrt_alpha_bar[u] / ns.sqrt_alpha_bar[lo];
    double c = ns.sigma[lo] - ns.sigma[u] / ratio;
    field.eval(y.data(), u, eps.data());  // first-order initializer
    Eigen::VectorXd xu = ratio * (y - c * eps);
    for (int it = 0; it < kFixedPointCap; ++it) {
      field.eval(xu.data(), u, eps.data());
      Eigen::VectorXd next = ratio * (y - c * eps);
      double change = rel_change(next, xu);
      xu = next;
      if (change < kFixedPointTol) break;
    }
    y = xu;
  }
  return y;
}

namespace {

void run_one(const RunSpec& spec, int index, Eigen::MatrixXd* terminal, Trajectory* traj) {
  const auto& steps = spec.sampler.steps;
  const NoiseSchedule& ns = *spec.ns;
  const CompositeField& field = *spec.field;
  int d = field.dim();
  RandomStream rng(spec.seed, std::uint64_t(index));

  int top = int(steps.size()) - 1;
  Eigen::VectorXd x(d);
  switch (spec.sampler.start) {
    case StartKind::pure_noise:
      for (int i = 0; i < d; ++i) x[i] = rng.next_gaussian();
      break;
    case StartKind::sdedit: {
      // snap to the nearest subsequence member; snapping to the lowest level
      // leaves nothing to run and the reference comes back unchanged
      int best = 0;
      for (size_t k = 1; k < steps.size(); ++k)
        if (std::abs(steps[k] - spec.sampler.sdedit_t0) <
            std::abs(steps[best] - spec.sampler.sdedit_t0))
          best = int(k);
      if (best == 0) {
        terminal->row(index) = spec.x0.transpose();
        if (traj) {
          traj->states.emplace_back(steps[0], spec.x0);
          traj->output = spec.x0;
        }
        return;
      }
      top = best;
      int t0 = steps[best];
      for (int i = 0; i < d; ++i)
        x[i] = ns.sqrt_alpha_bar[t0] * spec.x0[i] + ns.sigma[t0] * rng.next_gaussian();
      break;
    }
    case StartKind::inverted:
      x = reverse_ddim(spec.x0, field, ns, steps);
      break;
  }

  if (traj) traj->states.emplace_back(steps[top], x);

  Eigen::VectorXd eps(d);
  EpsRecord rec;
  EpsRecord* rec_ptr = traj ? &rec : nullptr;
  for (int k = top; k >= 1; --k) {
    int t_from = steps[k];
    int t_to = steps[k - 1];
    field.eval(x.data(), t_from, eps.data(), rec_ptr);
    if (spec.sampler.kind == SamplerKind::ddpm)
      x = ddpm_step(x, eps, t_from, ns, rng);
    else
      x = ddim_step(x, eps, t_from, t_to, spec.sampler.eta, ns, rng);
    if (traj) {
      traj->states.emplace_back(t_to, x);
      traj->records.push_back({t_from, t_to, rec});
    }
  }

  field.eval(x.data(), steps[0], eps.data(), rec_ptr);
  Eigen::VectorXd out = predict_x0(x, eps, steps[0], ns);
  terminal->row(index) = out.transpose();
  if (traj) {
    traj->output = out;
    traj->records.push_back({steps[0], -1, rec});
  }
}

template <typename Body>
void parallel_over(int n, int jobs, Body body) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += jobs) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

void check_run_spec(const RunSpec& spec) {
  if (!spec.ns || !spec.field) throw ConstraintError("run spec missing schedule or field");
  spec.sampler.validate(spec.ns->steps);
  if (spec.n < 1) throw ConstraintError("trajectory count must be >= 1");
  bool needs_ref = spec.sampler.start != StartKind::pure_noise;
  if (needs_ref && spec.x0.size() != spec.field->dim())
    throw ConstraintError("sdedit/inverted start needs a reference point of world dimension");
}

}  // namespace

Eigen::MatrixXd run_terminal(const RunSpec& spec) {
  check_run_spec(spec);
  Eigen::MatrixXd out(spec.n, spec.field->dim());
  parallel_over(spec.n, spec.jobs, [&](int i) { run_one(spec, i, &out, nullptr); });
  return out;
}

std::vector<Trajectory> run_trajectories(const RunSpec& spec) {
  check_run_spec(spec);
  std::vector<Trajectory> out(spec.n);
  Eigen::MatrixXd terminal(spec.n, spec.field->dim());
  parallel_over(spec.n, spec.jobs, [&](int i) { run_one(spec, i, &terminal, &out[i]); });
  return out;
}

}  // namespace mixguide
