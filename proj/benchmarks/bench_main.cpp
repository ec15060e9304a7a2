#include <benchmark/benchmark.h>

#include "mixguide/guidance.hpp"
#include "mixguide/oracle.hpp"
#include "mixguide/sampler.hpp"
#include "mixguide/schedule.hpp"
#include "mixguide/world.hpp"
#include "mixguide/worldio.hpp"

namespace {

using namespace mixguide;

const World& dependent_world() {
  static World w = load_world(std::string(MIXGUIDE_DATA_DIR) + "/worlds/dependent.world");
  return w;
}

const NoiseSchedule& schedule() {
  static NoiseSchedule ns = default_noise_schedule();
  return ns;
}

void bm_mixture_log_density(benchmark::State& state) {
  const World& w = dependent_world();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(w.dim(), 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(w.marginal().log_density(x));
}
BENCHMARK(bm_mixture_log_density);

void bm_epsilon_field_eval(benchmark::State& state) {
  EpsilonField field = make_epsilon_field(dependent_world(), schedule(), {});
  double x[2] = {0.25, -0.5}, eps[2];
  for (auto _ : state) {
    field.eval(x, 500, eps);
    benchmark::DoNotOptimize(eps[0]);
  }
}
BENCHMARK(bm_epsilon_field_eval);

void bm_composite_field_eval(benchmark::State& state) {
  OracleSet oracles = make_oracle_set(dependent_world(), schedule(), 0, 1);
  CompositeField field(&oracles, GuidanceConfig{});
  double x[2] = {0.25, -0.5}, eps[2];
  for (auto _ : state) {
    field.eval(x, 500, eps);
    benchmark::DoNotOptimize(eps[0]);
  }
}
BENCHMARK(bm_composite_field_eval);

void bm_compose_gcdm(benchmark::State& state) {
  GuidanceConfig g;
  double eu[2] = {0.1, 0.2}, ec[2] = {0.3, -0.1}, es[2] = {-0.2, 0.4}, ej[2] = {0.0, 0.1};
  double out[2];
  for (auto _ : state) {
    compose_gcdm(eu, ec, es, ej, g, 2, out);
    benchmark::DoNotOptimize(out[0]);
  }
}
BENCHMARK(bm_compose_gcdm);

void bm_ddim_step(benchmark::State& state) {
  RandomStream rng(7);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(2, 0.5);
  Eigen::VectorXd eps = Eigen::VectorXd::Constant(2, 0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(ddim_step(x, eps, 500, 490, 0.0, schedule(), rng));
}
BENCHMARK(bm_ddim_step);

void bm_run_terminal_100(benchmark::State& state) {
  OracleSet oracles = make_oracle_set(dependent_world(), schedule(), 0, 1);
  CompositeField field(&oracles, GuidanceConfig{});
  RunSpec spec;
  spec.ns = &schedule();
  spec.field = &field;
  spec.sampler.steps = uniform_steps(schedule().steps, 100);
  spec.n = 8;
  for (auto _ : state) benchmark::DoNotOptimize(run_terminal(spec));
}
BENCHMARK(bm_run_terminal_100);

}  // namespace

BENCHMARK_MAIN();
