#include "mixguide/world.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mixguide/errors.hpp"

namespace mixguide {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

std::vector<double> flatten_weights(const Eigen::MatrixXd& pi) {
  std::vector<double> w;
  w.reserve(pi.size());
  for (Eigen::Index i = 0; i < pi.rows(); ++i)
    for (Eigen::Index j = 0; j < pi.cols(); ++j) w.push_back(pi(i, j));
  return w;
}

}  // namespace

GaussianMixture::GaussianMixture(std::vector<double> weights,
                                 std::vector<GaussianComponent> comps) {
  if (weights.size() != comps.size() || comps.empty())
    throw ConstraintError("mixture needs one weight per component");

  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConstraintError(fmt::format("negative mixture weight {}", w));
    total += w;
  }
  if (!(total > 0.0)) throw ConstraintError("mixture weights sum to zero");

  dim_ = static_cast<int>(comps.front().mean.size());
  for (size_t k = 0; k < comps.size(); ++k) {
    if (weights[k] == 0.0) continue;  // zero-weight pairs never enter the mixture
    const auto& c = comps[k];
    if (c.mean.size() != dim_ || c.cov.rows() != dim_ || c.cov.cols() != dim_)
      throw ConstraintError("mixture component dimensions disagree");
    if (!c.cov.isApprox(c.cov.transpose(), 1e-12))
      throw ConstraintError("covariance not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
    if (llt.info() != Eigen::Success)
      throw ConstraintError("covariance not positive definite");

    double w = weights[k] / total;
    weights_.push_back(w);
    log_weights_.push_back(std::log(w));
    comps_.push_back(c);
    chol_.push_back(llt.matrixL());
    prec_.push_back(llt.solve(Eigen::MatrixXd::Identity(dim_, dim_)));
    double log_det = 0.0;
    for (int i = 0; i < dim_; ++i) log_det += 2.0 * std::log(chol_.back()(i, i));
    log_norm_.push_back(std::log(w) - 0.5 * (dim_ * kLogTwoPi + log_det));
  }
  if (comps_.empty()) throw ConstraintError("all mixture weights are zero");
}

double GaussianMixture::log_density(const Eigen::VectorXd& x) const {
  double lmax = -std::numeric_limits<double>::infinity();
  thread_local std::vector<double> l;
  l.assign(comps_.size(), 0.0);
  for (size_t k = 0; k < comps_.size(); ++k) {
    Eigen::VectorXd r = x - comps_[k].mean;
    l[k] = log_norm_[k] - 0.5 * r.dot(prec_[k] * r);
    lmax = std::max(lmax, l[k]);
  }
  double s = 0.0;
  for (double lk : l) s += std::exp(lk - lmax);
  return lmax + std::log(s);
}

Eigen::VectorXd GaussianMixture::score(const Eigen::VectorXd& x) const {
  double lmax = -std::numeric_limits<double>::infinity();
  std::vector<double> l(comps_.size());
  std::vector<Eigen::VectorXd> pr(comps_.size());
  for (size_t k = 0; k < comps_.size(); ++k) {
    Eigen::VectorXd r = comps_[k].mean - x;
    pr[k] = prec_[k] * r;
    l[k] = log_norm_[k] - 0.5 * r.dot(pr[k]);
    lmax = std::max(lmax, l[k]);
  }
  double s = 0.0;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  for (size_t k = 0; k < comps_.size(); ++k) {
    double p = std::exp(l[k] - lmax);
    s += p;
    g += p * pr[k];
  }
  return g / s;
}

void GaussianMixture::moments(Eigen::VectorXd* mean, Eigen::MatrixXd* cov) const {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim_);
  for (size_t k = 0; k < comps_.size(); ++k) m += weights_[k] * comps_[k].mean;
  if (mean) *mean = m;
  if (!cov) return;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(dim_, dim_);
  for (size_t k = 0; k < comps_.size(); ++k) {
    Eigen::VectorXd d = comps_[k].mean - m;
    c += weights_[k] * (comps_[k].cov + d * d.transpose());
  }
  *cov = c;
}

Eigen::MatrixXd GaussianMixture::sample(RandomStream& rng, int n) const {
  if (n < 1) throw ConstraintError("sample count must be >= 1");
  Eigen::MatrixXd out(n, dim_);
  Eigen::VectorXd z(dim_);
  for (int row = 0; row < n; ++row) {
    double u = rng.next_unit();
    size_t k = 0;
    double acc = weights_[0];
    while (k + 1 < weights_.size() && u >= acc) acc += weights_[++k];
    for (int i = 0; i < dim_; ++i) z[i] = rng.next_gaussian();
    out.row(row) = (comps_[k].mean + chol_[k] * z).transpose();
  }
  return out;
}

GaussianMixture GaussianMixture::diffused(const NoiseSchedule& ns, int t) const {
  if (t < 0 || t >= ns.steps)
    throw ConstraintError(fmt::format("timestep {} outside [0, {}]", t, ns.steps - 1));
  double ab = ns.alpha_bar[t];
  double sab = ns.sqrt_alpha_bar[t];
  std::vector<GaussianComponent> comps(comps_.size());
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim_, dim_);
  for (size_t k = 0; k < comps_.size(); ++k) {
    comps[k].mean = sab * comps_[k].mean;
    comps[k].cov = ab * comps_[k].cov + (1.0 - ab) * eye;
  }
  return GaussianMixture(weights_, std::move(comps));
}

World::World(Eigen::MatrixXd pair_weights, std::vector<GaussianComponent> comps,
             std::string name)
    : name_(std::move(name)),
      dim_(comps.empty() ? 0 : static_cast<int>(comps.front().mean.size())),
      pi_(std::move(pair_weights)),
      comps_(std::move(comps)),
      marginal_(flatten_weights(pi_), comps_) {
  if (static_cast<Eigen::Index>(comps_.size()) != pi_.size())
    throw ConstraintError(fmt::format("expected {} components, got {}", pi_.size(),
                                      comps_.size()));
  if ((pi_.array() < 0.0).any())
    throw ConstraintError("pair weights must be nonnegative");
  if (std::abs(pi_.sum() - 1.0) > 1e-9)
    throw ConstraintError(fmt::format("pair weights sum to {}, expected 1", pi_.sum()));
  // zero-weight components bypass the marginal's SPD validation; check here
  for (const auto& c : comps_) {
    if (c.mean.size() != dim_ || c.cov.rows() != dim_ || c.cov.cols() != dim_)
      throw ConstraintError("component dimensions disagree");
    Eigen::LLT<Eigen::MatrixXd> llt(c.cov);
    if (llt.info() != Eigen::Success)
      throw ConstraintError("component covariance not positive definite");
  }
}

void World::check_label(int i, int j) const {
  if (i < -1 || i >= content_count())
    throw ConstraintError(fmt::format("content label {} outside [0, {})", i, content_count()));
  if (j < -1 || j >= style_count())
    throw ConstraintError(fmt::format("style label {} outside [0, {})", j, style_count()));
}

GaussianMixture World::content_conditional(int i) const {
  check_label(i, 0);
  if (i < 0) throw ConstraintError("content conditional needs a label");
  double row_sum = pi_.row(i).sum();
  if (!(row_sum > 0.0))
    throw ConstraintError(fmt::format("content label {} has zero probability", i));
  std::vector<double> w;
  std::vector<GaussianComponent> comps;
  for (int j = 0; j < style_count(); ++j) {
    w.push_back(pi_(i, j) / row_sum);
    comps.push_back(component(i, j));
  }
  return GaussianMixture(std::move(w), std::move(comps));
}

GaussianMixture World::style_conditional(int j) const {
  check_label(0, j);
  if (j < 0) throw ConstraintError("style conditional needs a label");
  double col_sum = pi_.col(j).sum();
  if (!(col_sum > 0.0))
    throw ConstraintError(fmt::format("style label {} has zero probability", j));
  std::vector<double> w;
  std::vector<GaussianComponent> comps;
  for (int i = 0; i < content_count(); ++i) {
    w.push_back(pi_(i, j) / col_sum);
    comps.push_back(component(i, j));
  }
  return GaussianMixture(std::move(w), std::move(comps));
}

GaussianMixture World::joint_conditional(int i, int j) const {
  check_label(i, j);
  if (i < 0 || j < 0) throw ConstraintError("joint conditional needs both labels");
  return GaussianMixture({1.0}, {component(i, j)});
}

bool World::independent(double tol) const {
  Eigen::VectorXd row = pi_.rowwise().sum();
  Eigen::VectorXd col = pi_.colwise().sum();
  return (pi_ - row * col.transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace mixguide
