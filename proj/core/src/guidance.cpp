#include "mixguide/guidance.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mixguide/errors.hpp"

namespace mixguide {

GuidanceConfig GuidanceConfig::make(double alpha, double lambda, double beta_c,
                                    double beta_s) {
  GuidanceConfig g{alpha, lambda, beta_c, beta_s};
  g.validate();
  return g;
}

void GuidanceConfig::validate() const {
  if (!(alpha >= 0.0))
    throw ConstraintError(fmt::format("alpha must be >= 0, got {}", alpha));
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ConstraintError(fmt::format("lambda must be in [0, 1], got {}", lambda));
  if (!(beta_c >= 0.0 && beta_c <= 1.0))
    throw ConstraintError(fmt::format("beta_c must be in [0, 1], got {}", beta_c));
  if (!(beta_s >= 0.0 && beta_s <= 1.0))
    throw ConstraintError(fmt::format("beta_s must be in [0, 1], got {}", beta_s));
  if (std::abs(beta_c + beta_s - 1.0) > 1e-12)
    throw ConstraintError(
        fmt::format("beta_c + beta_s must equal 1, got {}", beta_c + beta_s));
}

void compose_cfg(const double* eps_u, const double* eps_c, double alpha, double beta,
                 int d, double* out) {
  double ab = alpha * beta;
  for (int i = 0; i < d; ++i) out[i] = eps_u[i] + ab * (eps_c[i] - eps_u[i]);
}

void compose_cdm(const double* eps_u, const double* eps_c, const double* eps_s,
                 const GuidanceConfig& g, int d, double* out) {
  for (int i = 0; i < d; ++i)
    out[i] = eps_u[i] + g.alpha * (g.beta_c * (eps_c[i] - eps_u[i]) +
                                   g.beta_s * (eps_s[i] - eps_u[i]));
}

void compose_gcdm(const double* eps_u, const double* eps_c, const double* eps_s,
                  const double* eps_j, const GuidanceConfig& g, int d, double* out) {
  for (int i = 0; i < d; ++i) {
    double independent = g.beta_c * (eps_c[i] - eps_u[i]) + g.beta_s * (eps_s[i] - eps_u[i]);
    out[i] = eps_u[i] +
             g.alpha * (g.lambda * (eps_j[i] - eps_u[i]) + (1.0 - g.lambda) * independent);
  }
}

void scheduled_conditionals(const double* eps_u, const double* eps_c,
                            const double* eps_s, const ConditionSchedule& s, double t,
                            int d, double* eps_c_out, double* eps_s_out) {
  double wc = weight_content(s, t);
  double ws = weight_style(s, t);
  for (int i = 0; i < d; ++i) {
    eps_c_out[i] = eps_u[i] + wc * (eps_c[i] - eps_u[i]);
    eps_s_out[i] = eps_u[i] + ws * (eps_s[i] - eps_u[i]);
  }
}

Eigen::VectorXd compose_cfg(const Eigen::VectorXd& eps_u, const Eigen::VectorXd& eps_c,
                            double alpha, double beta) {
  Eigen::VectorXd out(eps_u.size());
  compose_cfg(eps_u.data(), eps_c.data(), alpha, beta, int(eps_u.size()), out.data());
  return out;
}

Eigen::VectorXd compose_cdm(const Eigen::VectorXd& eps_u, const Eigen::VectorXd& eps_c,
                            const Eigen::VectorXd& eps_s, const GuidanceConfig& g) {
  Eigen::VectorXd out(eps_u.size());
  compose_cdm(eps_u.data(), eps_c.data(), eps_s.data(), g, int(eps_u.size()), out.data());
  return out;
}

Eigen::VectorXd compose_gcdm(const Eigen::VectorXd& eps_u, const Eigen::VectorXd& eps_c,
                             const Eigen::VectorXd& eps_s, const Eigen::VectorXd& eps_j,
                             const GuidanceConfig& g) {
  Eigen::VectorXd out(eps_u.size());
  compose_gcdm(eps_u.data(), eps_c.data(), eps_s.data(), eps_j.data(), g,
               int(eps_u.size()), out.data());
  return out;
}

TiltedDensity::TiltedDensity(const World& w, const NoiseSchedule& ns, int t,
                             const GuidanceConfig& g, int i, int j)
    : cu_(1.0 - g.alpha),
      cj_(g.alpha * g.lambda),
      cc_(g.alpha * (1.0 - g.lambda) * g.beta_c),
      cs_(g.alpha * (1.0 - g.lambda) * g.beta_s),
      pu_(w.marginal().diffused(ns, t)),
      pj_(w.joint_conditional(i, j).diffused(ns, t)),
      pc_(w.content_conditional(i).diffused(ns, t)),
      ps_(w.style_conditional(j).diffused(ns, t)) {
  g.validate();
}

double TiltedDensity::operator()(const Eigen::VectorXd& x) const {
  double v = cu_ * pu_.log_density(x);
  if (cj_ != 0.0) v += cj_ * pj_.log_density(x);
  if (cc_ != 0.0) v += cc_ * pc_.log_density(x);
  if (cs_ != 0.0) v += cs_ * ps_.log_density(x);
  return v;
}

Eigen::VectorXd TiltedDensity::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = cu_ * pu_.score(x);
  if (cj_ != 0.0) g += cj_ * pj_.score(x);
  if (cc_ != 0.0) g += cc_ * pc_.score(x);
  if (cs_ != 0.0) g += cs_ * ps_.score(x);
  return g;
}

CompositeField::CompositeField(const OracleSet* oracles, GuidanceConfig g,
                               const ConditionSchedule* cond)
    : oracles_(oracles), g_(g), cond_(cond) {
  g_.validate();
  need_joint_ = g_.alpha * g_.lambda != 0.0;
  need_single_ = g_.alpha * (1.0 - g_.lambda) != 0.0;
}

void CompositeField::eval(const double* x, int t, double* out, EpsRecord* rec) const {
  int d = dim();
  double eu[EpsilonField::kMaxDim];
  double ec[EpsilonField::kMaxDim];
  double es[EpsilonField::kMaxDim];
  double ej[EpsilonField::kMaxDim];

  oracles_->u.eval(x, t, eu);
  bool want_all = rec != nullptr;
  bool single = need_single_ || want_all;
  bool joint = need_joint_ || want_all;
  if (single) {
    oracles_->c.eval(x, t, ec);
    oracles_->s.eval(x, t, es);
    if (cond_) {
      scheduled_conditionals(eu, ec, es, *cond_, double(t), d, ec, es);
    }
  } else {
    for (int i = 0; i < d; ++i) ec[i] = es[i] = eu[i];
  }
  if (joint) {
    oracles_->j.eval(x, t, ej);
  } else {
    for (int i = 0; i < d; ++i) ej[i] = eu[i];
  }
  compose_gcdm(eu, ec, es, ej, g_, d, out);

  if (rec) {
    rec->eps_u = Eigen::Map<const Eigen::VectorXd>(eu, d);
    rec->eps_c = Eigen::Map<const Eigen::VectorXd>(ec, d);
    rec->eps_s = Eigen::Map<const Eigen::VectorXd>(es, d);
    rec->eps_j = Eigen::Map<const Eigen::VectorXd>(ej, d);
    rec->composite = Eigen::Map<const Eigen::VectorXd>(out, d);
  }
}

double gcdm_log_density_gradient_check(const World& w, const NoiseSchedule& ns,
                                       const GuidanceConfig& g, int t, int i, int j,
                                       int probes, RandomStream& rng) {
  g.validate();
  TiltedDensity tilted(w, ns, t, g, i, j);
  OracleSet oracles = make_oracle_set(w, ns, i, j);
  CompositeField field(&oracles, g);
  GaussianMixture pt = w.marginal().diffused(ns, t);

  int d = w.dim();
  double sigma = ns.sigma[t];
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    Eigen::VectorXd x = pt.sample(rng, 1).row(0).transpose();
    Eigen::VectorXd eps = field.eval(x, t);
    Eigen::VectorXd score = -eps / sigma;

    Eigen::VectorXd fd(d);
    for (int k = 0; k < d; ++k) {
      double h = 1e-5 * std::max(1.0, std::abs(x[k]));
      Eigen::VectorXd xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      fd[k] = (tilted(xp) - tilted(xm)) / (2.0 * h);
    }
    double rel = (score - fd).norm() / std::max(fd.norm(), 1e-8);
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace mixguide
