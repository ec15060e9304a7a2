#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mixguide/rng.hpp"
#include "mixguide/schedule.hpp"

namespace mixguide {

struct GaussianComponent {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Immutable after construction; all evaluation is pure and concurrently
// callable. Density arithmetic is log-space throughout (diffused tails
// underflow linear space at moderate t).
class GaussianMixture {
 public:
  // Zero weights are dropped, the rest normalized to sum 1. Covariances are
  // validated SPD via Cholesky. Throws ConstraintError.
  GaussianMixture(std::vector<double> weights, std::vector<GaussianComponent> comps);

  int dim() const { return dim_; }
  int count() const { return static_cast<int>(comps_.size()); }
  double weight(int k) const { return weights_[k]; }
  const GaussianComponent& component(int k) const { return comps_[k]; }

  double log_density(const Eigen::VectorXd& x) const;
  // exact gradient of log_density
  Eigen::VectorXd score(const Eigen::VectorXd& x) const;
  void moments(Eigen::VectorXd* mean, Eigen::MatrixXd* cov) const;
  // n rows of d columns; component by weight, draw via Cholesky factor
  Eigen::MatrixXd sample(RandomStream& rng, int n) const;

  // forward-process marginal at t: mean *= sqrt(alpha_bar), cov ->
  // alpha_bar*cov + (1-alpha_bar)*I, weights unchanged
  GaussianMixture diffused(const NoiseSchedule& ns, int t) const;

 private:
  int dim_;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<GaussianComponent> comps_;
  std::vector<Eigen::MatrixXd> prec_;   // cached inverses
  std::vector<Eigen::MatrixXd> chol_;   // cached Cholesky factors (L)
  std::vector<double> log_norm_;        // log w_k - 0.5 log det(2 pi cov_k)
};

// Joint generative model over (x, z_c, z_s): pair weights pi (nc x ns) over
// Gaussian components indexed row-major by (content, style). Zero pi entries
// are legal and mark label pairs that never occur in the data while their
// joint component stays defined.
class World {
 public:
  World(Eigen::MatrixXd pair_weights, std::vector<GaussianComponent> comps,
        std::string name = "");

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int content_count() const { return static_cast<int>(pi_.rows()); }
  int style_count() const { return static_cast<int>(pi_.cols()); }
  const Eigen::MatrixXd& pair_weights() const { return pi_; }
  const GaussianComponent& component(int i, int j) const {
    return comps_[static_cast<size_t>(i) * pi_.cols() + j];
  }

  const GaussianMixture& marginal() const { return marginal_; }
  GaussianMixture content_conditional(int i) const;
  GaussianMixture style_conditional(int j) const;
  GaussianMixture joint_conditional(int i, int j) const;

  // true iff pi factorizes as the outer product of its marginals
  bool independent(double tol = 1e-9) const;

 private:
  void check_label(int i, int j) const;

  std::string name_;
  int dim_;
  Eigen::MatrixXd pi_;
  std::vector<GaussianComponent> comps_;
  GaussianMixture marginal_;
};

}  // namespace mixguide
