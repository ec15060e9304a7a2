#include "mixguide/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include <fmt/format.h>

#include "mixguide/errors.hpp"
#include "mixguide/guidance.hpp"
#include "mixguide/metrics.hpp"
#include "mixguide/oracle.hpp"
#include "mixguide/sampler.hpp"
#include "mixguide/text.hpp"
#include "mixguide/worldio.hpp"

namespace mixguide {
namespace {

std::string artifact_path(const ExperimentConfig& cfg, const std::string& kind) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / fmt::format("{}-{}.txt", cfg.hash, kind)).string();
}

World load_experiment_world(const ExperimentConfig& cfg) {
  if (cfg.world_path.empty())
    throw ConstraintError("config key 'world' is required for this command");
  World w = load_world(cfg.world_path);
  if (cfg.label_content >= w.content_count() || cfg.label_style >= w.style_count())
    throw ConstraintError(fmt::format("labels ({}, {}) outside world label grid {} x {}",
                                      cfg.label_content, cfg.label_style, w.content_count(),
                                      w.style_count()));
  if (cfg.sampler.start != StartKind::pure_noise && cfg.x0.size() != w.dim())
    throw ConstraintError(
        fmt::format("x0 has dimension {}, world has {}", cfg.x0.size(), w.dim()));
  return w;
}

RunSpec make_run_spec(const ExperimentConfig& cfg, const NoiseSchedule& ns,
                      const CompositeField& field, int jobs) {
  RunSpec spec;
  spec.ns = &ns;
  spec.field = &field;
  spec.sampler = cfg.sampler;
  spec.x0 = cfg.x0;
  spec.n = cfg.n;
  spec.seed = cfg.seed;
  spec.jobs = jobs;
  return spec;
}

// terminal samples for one label pair under the experiment's sampler
Eigen::MatrixXd sample_terminal(const ExperimentConfig& cfg, const World& w,
                                const NoiseSchedule& ns, int i, int j, int jobs) {
  OracleSet oracles = make_oracle_set(w, ns, i, j);
  CompositeField field(&oracles, cfg.guidance,
                       cfg.use_condition_schedule ? &cfg.cond : nullptr);
  return run_terminal(make_run_spec(cfg, ns, field, jobs));
}

// The fit metrics shared by simulate and sweep. Realism, KL, and W2 compare
// the run's own samples against the true conditional for its label pair;
// diversity pools one run per style label at the same content label.
struct FitScores {
  double realism = 0.0;
  double diversity = 0.0;
  double kl = 0.0;
  double w2 = 0.0;
  bool has_kl = false;
};

FitScores evaluate_fit(const ExperimentConfig& cfg, const World& w, const NoiseSchedule& ns,
                       int jobs, const Eigen::MatrixXd& own) {
  GaussianMixture target = w.joint_conditional(cfg.label_content, cfg.label_style);

  FitScores fit;
  fit.realism = mean_loglik(own, target);

  Eigen::MatrixXd pooled(static_cast<Eigen::Index>(cfg.n) * w.style_count(), w.dim());
  for (int j = 0; j < w.style_count(); ++j)
    pooled.middleRows(static_cast<Eigen::Index>(j) * cfg.n, cfg.n) =
        j == cfg.label_style ? own : sample_terminal(cfg, w, ns, cfg.label_content, j, jobs);
  fit.diversity = diversity_trace(pooled);

  Eigen::VectorXd tm, sm;
  Eigen::MatrixXd tc, sc;
  target.moments(&tm, &tc);
  moment_summary(own, &sm, &sc);
  fit.w2 = gaussian_w2(sm, sc, tm, tc);

  fit.has_kl = w.dim() <= 2;
  if (fit.has_kl) {
    Eigen::VectorXd sd = tc.diagonal().array().sqrt();
    fit.kl = histogram_kl(own, target, 50, tm - 6.0 * sd, tm + 6.0 * sd);
  }
  return fit;
}

void append_fit_rows(std::vector<MetricRow>* rows, const ExperimentConfig& cfg,
                     const FitScores& fit) {
  rows->push_back({cfg.hash, "realism", fit.realism, cfg.n, cfg.seed});
  rows->push_back({cfg.hash, "diversity", fit.diversity, cfg.n, cfg.seed});
  if (fit.has_kl) rows->push_back({cfg.hash, "kl", fit.kl, cfg.n, cfg.seed});
  rows->push_back({cfg.hash, "w2", fit.w2, cfg.n, cfg.seed});
}

}  // namespace

SimulateArtifacts run_simulate(const ExperimentConfig& cfg, int jobs, bool trajectories) {
  World w = load_experiment_world(cfg);
  NoiseSchedule ns = build_noise_schedule(cfg.noise_steps, cfg.noise_kind, cfg.beta_min, cfg.beta_max);
  OracleSet oracles = make_oracle_set(w, ns, cfg.label_content, cfg.label_style);
  CompositeField field(&oracles, cfg.guidance,
                       cfg.use_condition_schedule ? &cfg.cond : nullptr);
  RunSpec spec = make_run_spec(cfg, ns, field, jobs);

  OutputHeader header;
  header.config_hash = cfg.hash;
  header.seed = cfg.seed;
  header.world = w.name();

  SimulateArtifacts art;
  Eigen::MatrixXd samples;
  if (trajectories) {
    std::vector<Trajectory> trajs = run_trajectories(spec);
    samples.resize(cfg.n, w.dim());
    for (int k = 0; k < cfg.n; ++k) samples.row(k) = trajs[k].output;
    art.trajectories_path = artifact_path(cfg, "trajectories");
    write_text_file(art.trajectories_path, render_trajectories(trajs, header));
  } else {
    samples = run_terminal(spec);
  }

  OutputHeader sample_header = header;
  for (int k = 0; k < w.dim(); ++k) sample_header.columns.push_back(fmt::format("x{}", k));
  art.samples_path = artifact_path(cfg, "samples");
  write_text_file(art.samples_path, render_samples(samples, sample_header));

  std::vector<MetricRow> rows;
  moment_summary(samples, &art.mean, cfg.n >= 2 ? &art.cov : nullptr);
  for (int k = 0; k < w.dim(); ++k)
    rows.push_back({cfg.hash, fmt::format("mean_{}", k), art.mean[k], cfg.n, cfg.seed});
  if (cfg.n >= 2) {
    for (int a = 0; a < w.dim(); ++a)
      for (int b = a; b < w.dim(); ++b)
        rows.push_back({cfg.hash, fmt::format("cov_{}_{}", a, b), art.cov(a, b), cfg.n, cfg.seed});
    append_fit_rows(&rows, cfg, evaluate_fit(cfg, w, ns, jobs, samples));
  }
  art.metrics_path = artifact_path(cfg, "metrics");
  write_text_file(art.metrics_path, render_metrics(rows, header));
  return art;
}

SweepSpec parse_grid(const std::string& text) {
  static const std::set<std::string> allowed = {"alpha", "lambda", "beta_s", "a", "b"};
  SweepSpec spec;
  std::string rest = text;
  while (!rest.empty()) {
    std::size_t semi = rest.find(';');
    std::string axis = trim(rest.substr(0, semi));
    rest = semi == std::string::npos ? "" : rest.substr(semi + 1);
    if (axis.empty()) continue;
    std::size_t eq = axis.find('=');
    if (eq == std::string::npos)
      throw ParseError(fmt::format("grid axis '{}': expected key=v1,v2,...", axis));
    std::string key = trim(axis.substr(0, eq));
    if (!allowed.count(key))
      throw ParseError(
          fmt::format("grid key '{}' not sweepable (use alpha, lambda, beta_s, a, b)", key));
    for (const auto& existing : spec.axes)
      if (existing.first == key) throw ParseError(fmt::format("grid key '{}' repeated", key));
    std::vector<double> values;
    for (const std::string& tok : split_list(axis.substr(eq + 1))) {
      char* end = nullptr;
      double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0')
        throw ParseError(fmt::format("grid key '{}': bad value '{}'", key, tok));
      values.push_back(v);
    }
    if (values.empty()) throw ParseError(fmt::format("grid key '{}' has no values", key));
    spec.axes.emplace_back(key, values);
  }
  if (spec.axes.empty()) throw ParseError("empty sweep grid");
  return spec;
}

SweepArtifacts run_sweep(const ConfigMap& base, const SweepSpec& grid, int jobs) {
  ExperimentConfig base_cfg = resolve_experiment(base);
  World w = load_experiment_world(base_cfg);

  for (const auto& [key, values] : grid.axes)
    if ((key == "a" || key == "b") && !base_cfg.use_condition_schedule)
      throw ConstraintError(
          fmt::format("grid sweeps '{}' but the config disables condition scheduling", key));

  std::vector<std::size_t> shape, index(grid.axes.size(), 0);
  std::size_t points = 1;
  for (const auto& axis : grid.axes) {
    shape.push_back(axis.second.size());
    points *= axis.second.size();
  }

  SweepArtifacts art;
  struct PointScore {
    std::string hash;
    std::string knobs;
    FitScores fit;
  };
  std::vector<PointScore> scores;

  for (std::size_t p = 0; p < points; ++p) {
    ConfigMap point = base;
    for (std::size_t a = 0; a < grid.axes.size(); ++a) {
      const auto& [key, values] = grid.axes[a];
      double v = values[index[a]];
      if (key == "a" || key == "b") {
        point.set("schedule_" + key, format_g17(v));
      } else {
        point.set(key, format_g17(v));
        // beta pair moves together so the sum-1 constraint keeps holding
        if (key == "beta_s") point.set("beta_c", format_g17(1.0 - v));
      }
    }
    ExperimentConfig cfg = resolve_experiment(point);
    NoiseSchedule ns =
        build_noise_schedule(cfg.noise_steps, cfg.noise_kind, cfg.beta_min, cfg.beta_max);

    Eigen::MatrixXd own =
        sample_terminal(cfg, w, ns, cfg.label_content, cfg.label_style, jobs);
    PointScore score;
    score.hash = cfg.hash;
    score.fit = evaluate_fit(cfg, w, ns, jobs, own);
    score.knobs = fmt::format("alpha={} lambda={} beta_s={} a={} b={}",
                              format_g17(cfg.guidance.alpha), format_g17(cfg.guidance.lambda),
                              format_g17(cfg.guidance.beta_s), format_g17(cfg.cond.a),
                              format_g17(cfg.cond.b));
    append_fit_rows(&art.rows, cfg, score.fit);
    scores.push_back(std::move(score));

    for (std::size_t a = grid.axes.size(); a-- > 0;) {
      if (++index[a] < shape[a]) break;
      index[a] = 0;
    }
  }

  auto pick = [&](const std::string& label, auto key, bool want_max) {
    const PointScore* best = nullptr;
    for (const PointScore& s : scores) {
      if (label == "kl" && !s.fit.has_kl) continue;
      if (!best || (want_max ? key(s.fit) > key(best->fit) : key(s.fit) < key(best->fit)))
        best = &s;
    }
    if (best)
      art.summary.push_back(fmt::format("{} {} = {} at config {} ({})",
                                        want_max ? "argmax" : "argmin", label,
                                        format_g17(key(best->fit)), best->hash, best->knobs));
  };
  pick("realism", [](const FitScores& f) { return f.realism; }, true);
  pick("diversity", [](const FitScores& f) { return f.diversity; }, true);
  if (w.dim() <= 2) pick("kl", [](const FitScores& f) { return f.kl; }, false);
  pick("w2", [](const FitScores& f) { return f.w2; }, false);

  OutputHeader header;
  header.config_hash = base_cfg.hash;
  header.seed = base_cfg.seed;
  header.world = w.name();
  art.table_path = artifact_path(base_cfg, "sweep");
  write_text_file(art.table_path, render_metrics(art.rows, header, art.summary));
  return art;
}

std::string render_schedule_table(const ExperimentConfig& cfg) {
  NoiseSchedule ns = build_noise_schedule(cfg.noise_steps, cfg.noise_kind, cfg.beta_min, cfg.beta_max);
  OutputHeader header;
  header.config_hash = cfg.hash;
  header.seed = cfg.seed;
  header.columns = {"t", "w_c", "w_s", "snr"};
  std::string out = render_header(header);
  for (int t = 0; t < ns.steps; ++t) {
    double wc = 1.0, ws = 1.0;  // unscheduled conditionals enter at full weight
    if (cfg.use_condition_schedule) {
      wc = weight_content(cfg.cond, t);
      ws = weight_style(cfg.cond, t);
    }
    out += fmt::format("{} {} {} {}\n", t, format_g17(wc), format_g17(ws), format_g17(ns.snr(t)));
  }
  return out;
}

std::string schedule_plot_path(const ExperimentConfig& cfg) {
  return artifact_path(cfg, "schedule");
}

CheckReport validate_world_report(const World& w) {
  CheckReport report;

  double sum = w.pair_weights().sum();
  double min_pi = w.pair_weights().minCoeff();
  report.lines.push_back({"pair weights normalized",
                          min_pi >= 0.0 && std::abs(sum - 1.0) <= 1e-9,
                          fmt::format("sum = {}, min = {}", format_g17(sum), format_g17(min_pi))});

  bool spd = true;
  for (int i = 0; i < w.content_count() && spd; ++i)
    for (int j = 0; j < w.style_count() && spd; ++j) {
      const GaussianComponent& c = w.component(i, j);
      if ((c.cov - c.cov.transpose()).cwiseAbs().maxCoeff() > 1e-9) spd = false;
      if (Eigen::LLT<Eigen::MatrixXd>(c.cov).info() != Eigen::Success) spd = false;
    }
  report.lines.push_back({"component covariances admissible", spd,
                          fmt::format("{} components symmetric positive definite",
                                      w.content_count() * w.style_count())});

  // marginal log-density must equal the pi-weighted mixture recomputed from
  // raw components
  RandomStream rng(1);
  Eigen::MatrixXd probes = w.marginal().sample(rng, 64);
  double worst = 0.0;
  for (Eigen::Index r = 0; r < probes.rows(); ++r) {
    Eigen::VectorXd x = probes.row(r);
    double direct = w.marginal().log_density(x);
    double lse = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < w.content_count(); ++i)
      for (int j = 0; j < w.style_count(); ++j) {
        double pij = w.pair_weights()(i, j);
        if (pij == 0.0) continue;
        const GaussianComponent& c = w.component(i, j);
        Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
        Eigen::VectorXd white = llt.matrixL().solve(x - c.mean);
        double logdet = 0.0;
        for (int k = 0; k < w.dim(); ++k) logdet += 2.0 * std::log(llt.matrixL()(k, k));
        double term = std::log(pij) - 0.5 * (w.dim() * std::log(2.0 * M_PI) + logdet) -
                      0.5 * white.squaredNorm();
        double hi = std::max(lse, term), lo = std::min(lse, term);
        lse = std::isinf(hi) ? lo : hi + std::log1p(std::exp(lo - hi));
      }
    worst = std::max(worst, std::abs(direct - lse));
  }
  report.lines.push_back({"marginal density reconstruction", worst <= 1e-9,
                          fmt::format("max |log p - log sum_ij pi_ij N_ij| = {} over 64 draws",
                                      format_g17(worst))});

  Eigen::VectorXd row_sum = w.pair_weights().rowwise().sum();
  Eigen::VectorXd col_sum = w.pair_weights().colwise().sum();
  double dep = (w.pair_weights() - row_sum * col_sum.transpose()).cwiseAbs().maxCoeff();
  report.lines.push_back({"label dependence indicator", true,
                          w.independent()
                              ? "independent (pi factorizes as outer product)"
                              : fmt::format("dependent (max |pi - outer product| = {})",
                                            format_g17(dep))});
  return report;
}

CheckReport validate_experiment(const ExperimentConfig& cfg) {
  CheckReport report;

  NoiseSchedule ns = build_noise_schedule(cfg.noise_steps, cfg.noise_kind, cfg.beta_min, cfg.beta_max);
  bool noise_ok = true;
  for (int t = 0; t < ns.steps; ++t) {
    if (!(ns.beta[t] > 0.0 && ns.beta[t] < 1.0)) noise_ok = false;
    if (t > 0 && !(ns.alpha_bar[t] < ns.alpha_bar[t - 1])) noise_ok = false;
    if (t > 0 && !(ns.snr(t) < ns.snr(t - 1))) noise_ok = false;
  }
  report.lines.push_back(
      {"noise schedule admissible", noise_ok,
       fmt::format("{} {} steps, beta in (0, 1), alpha_bar and snr strictly decreasing",
                   to_string(cfg.noise_kind), ns.steps)});

  if (cfg.use_condition_schedule) {
    double worst_sum = 0.0;
    bool in_range = true;
    for (int t = 0; t < ns.steps; ++t) {
      double wc = weight_content(cfg.cond, t);
      double ws = weight_style(cfg.cond, t);
      if (wc < cfg.cond.floor - 1e-12 || wc > cfg.cond.ceiling + 1e-12) in_range = false;
      if (ws < cfg.cond.floor - 1e-12 || ws > cfg.cond.ceiling + 1e-12) in_range = false;
      worst_sum = std::max(worst_sum,
                           std::abs(wc + ws - (cfg.cond.floor + cfg.cond.ceiling)));
    }
    report.lines.push_back(
        {"condition weights bounded and complementary", in_range && worst_sum <= 1e-12,
         fmt::format("{} schedule, max |w_c + w_s - (floor + ceiling)| = {}",
                     to_string(cfg.cond.kind), format_g17(worst_sum))});
  } else {
    report.lines.push_back(
        {"condition weights bounded and complementary", true, "scheduling disabled"});
  }

  report.lines.push_back(
      {"guidance constants admissible", true,
       fmt::format("alpha = {}, lambda = {}, beta_c + beta_s = {}", format_g17(cfg.guidance.alpha),
                   format_g17(cfg.guidance.lambda),
                   format_g17(cfg.guidance.beta_c + cfg.guidance.beta_s))});

  report.lines.push_back(
      {"sampler plan admissible", true,
       fmt::format("{} with {} steps, eta = {}, start = {}", to_string(cfg.sampler.kind),
                   cfg.sampler.steps.size(), format_g17(cfg.sampler.eta),
                   to_string(cfg.sampler.start))});

  if (!cfg.world_path.empty()) {
    World w = load_experiment_world(cfg);
    CheckReport world_report = validate_world_report(w);
    report.lines.insert(report.lines.end(), world_report.lines.begin(), world_report.lines.end());

    // specialization identities of the composite field at sampled states
    OracleSet oracles = make_oracle_set(w, ns, cfg.label_content, cfg.label_style);
    RandomStream rng(2);
    int t = ns.steps / 2;
    Eigen::MatrixXd probes = w.marginal().diffused(ns, t).sample(rng, 32);
    double worst = 0.0;
    GuidanceConfig joint_only = GuidanceConfig::make(cfg.guidance.alpha, 1.0, cfg.guidance.beta_c,
                                                     cfg.guidance.beta_s);
    GuidanceConfig content_only = GuidanceConfig::make(cfg.guidance.alpha, 0.0, 1.0, 0.0);
    GuidanceConfig split = GuidanceConfig::make(cfg.guidance.alpha, 0.0, cfg.guidance.beta_c,
                                                cfg.guidance.beta_s);
    for (Eigen::Index r = 0; r < probes.rows(); ++r) {
      Eigen::VectorXd x = probes.row(r);
      Eigen::VectorXd eu = oracles.u.eval(x, t), ec = oracles.c.eval(x, t),
                      es = oracles.s.eval(x, t), ej = oracles.j.eval(x, t);
      Eigen::VectorXd lhs = compose_gcdm(eu, ec, es, ej, joint_only);
      Eigen::VectorXd rhs = eu + joint_only.alpha * (ej - eu);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      lhs = compose_gcdm(eu, ec, es, ej, content_only);
      rhs = compose_cfg(eu, ec, content_only.alpha, 1.0);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      lhs = compose_gcdm(eu, ec, es, ej, split);
      rhs = compose_cdm(eu, ec, es, split);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    report.lines.push_back({"composition specialization identities", worst <= 1e-12,
                            fmt::format("max deviation {} over 32 states at t = {}",
                                        format_g17(worst), t)});
  }
  return report;
}

}  // namespace mixguide
