#include "mixguide/oracle.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mixguide/errors.hpp"

namespace mixguide {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

EpsilonField::EpsilonField(const GaussianMixture& g, const NoiseSchedule& ns)
    : dim_(g.dim()), comp_(g.count()), steps_(ns.steps), sigma_(ns.sigma) {
  if (dim_ > kMaxDim)
    throw ConstraintError(fmt::format("dimension {} above fast-path limit {}", dim_, kMaxDim));
  if (comp_ > kMaxComp)
    throw ConstraintError(fmt::format("{} components above fast-path limit {}", comp_, kMaxComp));

  mean_.resize(static_cast<size_t>(steps_) * comp_ * dim_);
  prec_.resize(static_cast<size_t>(steps_) * comp_ * dim_ * dim_);
  lnorm_.resize(static_cast<size_t>(steps_) * comp_);
  for (int t = 0; t < steps_; ++t) {
    GaussianMixture gt = g.diffused(ns, t);
    for (int k = 0; k < comp_; ++k) {
      const auto& c = gt.component(k);
      Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
      Eigen::MatrixXd prec = llt.solve(Eigen::MatrixXd::Identity(dim_, dim_));
      double log_det = 0.0;
      Eigen::MatrixXd l = llt.matrixL();
      for (int i = 0; i < dim_; ++i) log_det += 2.0 * std::log(l(i, i));
      size_t kt = static_cast<size_t>(t) * comp_ + k;
      lnorm_[kt] = std::log(gt.weight(k)) - 0.5 * (dim_ * kLogTwoPi + log_det);
      for (int i = 0; i < dim_; ++i) {
        mean_[kt * dim_ + i] = c.mean[i];
        for (int j = 0; j < dim_; ++j)
          prec_[(kt * dim_ + i) * dim_ + j] = prec(i, j);
      }
    }
  }
}

void EpsilonField::eval(const double* x, int t, double* eps_out) const {
  const size_t base = static_cast<size_t>(t) * comp_;
  const double* mean = &mean_[base * dim_];
  const double* prec = &prec_[base * dim_ * dim_];
  const double* lnorm = &lnorm_[base];

  double l[kMaxComp];
  double pr[kMaxComp][kMaxDim];
  double lmax = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < comp_; ++k) {
    const double* m = mean + k * dim_;
    const double* p = prec + k * dim_ * dim_;
    double q = 0.0;
    for (int i = 0; i < dim_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < dim_; ++j) acc += p[i * dim_ + j] * (m[j] - x[j]);
      pr[k][i] = acc;
      q += acc * (m[i] - x[i]);
    }
    l[k] = lnorm[k] - 0.5 * q;
    if (l[k] > lmax) lmax = l[k];
  }

  double s = 0.0;
  double g[kMaxDim] = {0.0};
  for (int k = 0; k < comp_; ++k) {
    double dl = l[k] - lmax;
    if (dl < -45.0) continue;  // responsibility below 3e-20
    double p = std::exp(dl);
    s += p;
    for (int i = 0; i < dim_; ++i) g[i] += p * pr[k][i];
  }
  double scale = -sigma_[t] / s;
  for (int i = 0; i < dim_; ++i) eps_out[i] = scale * g[i];
}

EpsilonField make_epsilon_field(const World& w, const NoiseSchedule& ns,
                                const ConditionSelector& sel) {
  switch (sel.kind) {
    case ConditionSelector::unconditional:
      return EpsilonField(w.marginal(), ns);
    case ConditionSelector::content:
      return EpsilonField(w.content_conditional(sel.i), ns);
    case ConditionSelector::style:
      return EpsilonField(w.style_conditional(sel.j), ns);
    case ConditionSelector::joint:
      return EpsilonField(w.joint_conditional(sel.i, sel.j), ns);
  }
  throw ConstraintError("bad condition selector");
}

OracleSet make_oracle_set(const World& w, const NoiseSchedule& ns, int i, int j) {
  return OracleSet{
      EpsilonField(w.marginal(), ns),
      EpsilonField(w.content_conditional(i), ns),
      EpsilonField(w.style_conditional(j), ns),
      EpsilonField(w.joint_conditional(i, j), ns),
  };
}

}  // namespace mixguide
