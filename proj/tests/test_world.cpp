#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mixguide/errors.hpp"
#include "mixguide/worldio.hpp"

using namespace mixguide;
using namespace testutil;

namespace {

GaussianComponent comp1d(double mean, double var) {
  GaussianComponent c;
  c.mean = Eigen::VectorXd::Constant(1, mean);
  c.cov = Eigen::MatrixXd::Constant(1, 1, var);
  return c;
}

double gaussian_logpdf(double x, double mean, double var) {
  return -0.5 * (std::log(2.0 * M_PI * var) + (x - mean) * (x - mean) / var);
}

}  // namespace

TEST_SUITE("world") {

TEST_CASE("standard normal log-density at the origin") {
  GaussianMixture g({1.0}, {comp1d(0.0, 1.0)});
  CHECK(g.log_density(Eigen::VectorXd::Zero(1)) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-15));
}

TEST_CASE("symmetric two-component mixture at its midpoint") {
  GaussianMixture g({0.5, 0.5}, {comp1d(-1.0, 0.3), comp1d(1.0, 0.3)});
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  // both components contribute equally: log(2 * 0.5 * N(0; 1, 0.3))
  double expected = std::log(2.0) + std::log(0.5) + gaussian_logpdf(0.0, 1.0, 0.3);
  CHECK(g.log_density(x) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("log-space evaluation agrees with the naive sum") {
  GaussianMixture g({0.2, 0.5, 0.3},
                    {comp1d(-2.0, 0.5), comp1d(0.5, 1.5), comp1d(3.0, 0.25)});
  RandomStream rng(11);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 6.0 * (rng.next_unit() - 0.5));
    double naive = 0.2 * std::exp(gaussian_logpdf(x[0], -2.0, 0.5)) +
                   0.5 * std::exp(gaussian_logpdf(x[0], 0.5, 1.5)) +
                   0.3 * std::exp(gaussian_logpdf(x[0], 3.0, 0.25));
    CHECK(g.log_density(x) == doctest::Approx(std::log(naive)).epsilon(1e-10));
  }
}

TEST_CASE("score of a standard normal") {
  GaussianMixture g({1.0}, {comp1d(0.0, 1.0)});
  CHECK(g.score(Eigen::VectorXd::Constant(1, 1.0))[0] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("single-gaussian score is affine in x") {
  GaussianMixture g({1.0}, {comp1d(2.0, 0.5)});
  auto s = [&](double x) { return g.score(Eigen::VectorXd::Constant(1, x))[0]; };
  // slope -1/var everywhere
  CHECK(s(1.0) - s(0.0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(s(5.0) - s(4.0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(s(2.0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("mixture score matches central finite differences") {
  Eigen::MatrixXd cov(2, 2);
  cov << 0.8, 0.3, 0.3, 1.4;
  GaussianComponent a{Eigen::Vector2d(-1.0, 0.5), cov};
  GaussianComponent b{Eigen::Vector2d(1.5, -0.5), Eigen::Matrix2d::Identity() * 0.4};
  GaussianMixture g({0.6, 0.4}, {a, b});
  RandomStream rng(5);
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd x = random_vector(rng, 2, 1.5);
    Eigen::VectorXd fd = fd_gradient([&](const Eigen::VectorXd& p) { return g.log_density(p); }, x);
    Eigen::VectorXd exact = g.score(x);
    CHECK((exact - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("mixture moments against the component decomposition") {
  GaussianMixture g({0.5, 0.5}, {comp1d(-1.0, 0.2), comp1d(1.0, 0.2)});
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  g.moments(&mean, &cov);
  CHECK(mean[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(cov(0, 0) == doctest::Approx(1.2).epsilon(1e-14));
}

TEST_CASE("sampling is deterministic and matches moments") {
  GaussianMixture g({1.0}, {comp1d(3.0, 4.0)});
  RandomStream r1(9), r2(9);
  Eigen::MatrixXd s1 = g.sample(r1, 2000), s2 = g.sample(r2, 2000);
  CHECK(s1 == s2);

  RandomStream r3(10);
  const int n = 100000;
  Eigen::MatrixXd s = g.sample(r3, n);
  double mean = s.col(0).mean();
  double var = (s.col(0).array() - mean).square().sum() / (n - 1);
  CHECK(std::abs(mean - 3.0) <= 4.0 * std::sqrt(4.0 / n));
  CHECK(std::abs(var - 4.0) <= 4.0 * std::sqrt(2.0 * 16.0 / n));
}

TEST_CASE("diffusion transforms each component's moments exactly") {
  NoiseSchedule ns = build_noise_schedule(2, NoiseKind::linear, 0.5, 0.5);
  GaussianMixture g({1.0}, {comp1d(2.0, 1.0)});
  // alpha_bar[1] = 0.25: mean 2 -> 1, variance 0.25*1 + 0.75 = 1
  GaussianMixture d = g.diffused(ns, 1);
  CHECK(d.component(0).mean[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.component(0).cov(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

  // alpha_bar ~ 1 keeps the component unchanged
  NoiseSchedule tiny = build_noise_schedule(1, NoiseKind::linear, 1e-12, 1e-12);
  GaussianMixture id = g.diffused(tiny, 0);
  CHECK(id.component(0).mean[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(id.component(0).cov(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("diffused moments match monte-carlo forward noising") {
  World w = load_world(data_path("worlds/independent.world"));
  NoiseSchedule ns = default_noise_schedule();
  const int n = 100000;
  for (int t : {250, 500}) {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    w.marginal().diffused(ns, t).moments(&mean, &cov);

    RandomStream rng(100 + t);
    Eigen::MatrixXd x0 = w.marginal().sample(rng, n);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      double xt = ns.sqrt_alpha_bar[t] * x0(i, 0) + ns.sigma[t] * rng.next_gaussian();
      sum += xt;
      sumsq += xt * xt;
    }
    double mc_mean = sum / n;
    double mc_var = sumsq / n - mc_mean * mc_mean;
    // 3 standard errors of the estimators, using the analytic moments
    double se_mean = std::sqrt(cov(0, 0) / n);
    // gaussian-ish fourth moment upper bound is fine at these t (heavy
    // component shrinks toward unit variance): use the mixture's exact M4
    double m4 = 0.0;
    GaussianMixture d = w.marginal().diffused(ns, t);
    for (int k = 0; k < d.count(); ++k) {
      double dm = d.component(k).mean[0] - mean[0];
      double v = d.component(k).cov(0, 0);
      m4 += d.weight(k) * (3 * v * v + 6 * v * dm * dm + dm * dm * dm * dm);
    }
    double se_var = std::sqrt((m4 - cov(0, 0) * cov(0, 0)) / n);
    CHECK(std::abs(mc_mean - mean[0]) <= 3.0 * se_mean);
    CHECK(std::abs(mc_var - cov(0, 0)) <= 3.0 * se_var);
  }
}

TEST_CASE("trivial world assemblies") {
  World point = single_gaussian_world(0.0, 1.0);
  CHECK(point.marginal().count() == 1);
  CHECK(point.marginal().log_density(Eigen::VectorXd::Zero(1)) ==
        doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-15));

  Eigen::MatrixXd pi = Eigen::MatrixXd::Constant(2, 2, 0.25);
  std::vector<GaussianComponent> comps = {comp1d(-2, 1), comp1d(-1, 1), comp1d(1, 1),
                                          comp1d(2, 1)};
  World uniform(pi, comps, "uniform");
  CHECK(uniform.marginal().count() == 4);
  for (int k = 0; k < 4; ++k) CHECK(uniform.marginal().weight(k) == doctest::Approx(0.25));
}

TEST_CASE("fixture marginal integrates to one") {
  World w = load_world(data_path("worlds/independent.world"));
  // heavy component has sd 10; +-80 covers it
  const double lo = -80.0, hi = 80.0;
  const int cells = 160000;
  double h = (hi - lo) / cells;
  double total = 0.0;
  Eigen::VectorXd x(1);
  for (int i = 0; i <= cells; ++i) {
    x[0] = lo + i * h;
    double p = std::exp(w.marginal().log_density(x));
    total += (i == 0 || i == cells) ? 0.5 * p : p;
  }
  total *= h;
  CHECK(std::abs(total - 1.0) <= 1e-4);
}

TEST_CASE("conditionals select the right components") {
  World w = load_world(data_path("worlds/dependent.world"));

  GaussianMixture joint = w.joint_conditional(0, 1);
  CHECK(joint.count() == 1);
  CHECK(joint.component(0).mean[0] == doctest::Approx(-3.0));
  CHECK(joint.component(0).mean[1] == doctest::Approx(3.0));

  // diagonal pi: conditioning on content 0 leaves only style 0
  GaussianMixture content = w.content_conditional(0);
  CHECK(content.count() == 1);
  CHECK(content.component(0).mean[0] == doctest::Approx(-1.5));

  World ind = load_world(data_path("worlds/independent.world"));
  GaussianMixture c0 = ind.content_conditional(0);
  double wsum = 0.0;
  for (int k = 0; k < c0.count(); ++k) wsum += c0.weight(k);
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bayes combination is exact on a conjugate world") {
  // style labels exist but never move the mean, so p(x|z_s) = p(x) and
  // p(x|z_c)p(x|z_s)/p(x) = p(x|z_c,z_s) holds pointwise
  Eigen::MatrixXd pi(2, 2);
  pi << 0.15, 0.15, 0.35, 0.35;
  std::vector<GaussianComponent> comps = {comp1d(-1.0, 0.7), comp1d(-1.0, 0.7),
                                          comp1d(2.0, 0.7), comp1d(2.0, 0.7)};
  World w(pi, comps, "conjugate");
  RandomStream rng(21);
  Eigen::MatrixXd probes = w.marginal().sample(rng, 50);
  for (int r = 0; r < probes.rows(); ++r) {
    Eigen::VectorXd x = probes.row(r);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double lhs = w.content_conditional(i).log_density(x) +
                     w.style_conditional(j).log_density(x) - w.marginal().log_density(x);
        CHECK(lhs == doctest::Approx(w.joint_conditional(i, j).log_density(x)).epsilon(1e-10));
      }
  }
}

TEST_CASE("dependence indicator is computed from pi") {
  CHECK(load_world(data_path("worlds/independent.world")).independent());
  CHECK_FALSE(load_world(data_path("worlds/dependent.world")).independent());
}

TEST_CASE("constructors reject malformed input") {
  CHECK_THROWS_AS(GaussianMixture({0.5, 0.5}, {comp1d(0, 1)}), ConstraintError);
  CHECK_THROWS_AS(GaussianMixture({-0.1, 1.1}, {comp1d(0, 1), comp1d(1, 1)}), ConstraintError);
  CHECK_THROWS_AS(GaussianMixture({1.0}, {comp1d(0, -1.0)}), ConstraintError);
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.5, -0.5, 1.0;  // asymmetric
  GaussianComponent c{Eigen::Vector2d(0, 0), bad};
  CHECK_THROWS_AS(GaussianMixture({1.0}, {c}), ConstraintError);

  Eigen::MatrixXd pi(1, 1);
  pi << 0.9;  // does not sum to 1
  CHECK_THROWS_AS(World(pi, {comp1d(0, 1)}), ConstraintError);
  Eigen::MatrixXd pi2(1, 2);
  pi2 << 0.5, 0.5;
  CHECK_THROWS_AS(World(pi2, {comp1d(0, 1)}), ConstraintError);  // missing component

  World dep = load_world(data_path("worlds/dependent.world"));
  CHECK_THROWS_AS(dep.content_conditional(7), ConstraintError);
  CHECK_THROWS_AS(dep.joint_conditional(-1, 0), ConstraintError);
}

}  // TEST_SUITE
