#pragma once

#include <Eigen/Dense>

#include "mixguide/world.hpp"

namespace mixguide {

// Closed-form 2-Wasserstein distance between Gaussians:
//   sqrt(|m1-m2|^2 + tr(S1 + S2 - 2*(S2^{1/2} S1 S2^{1/2})^{1/2})).
// Matrix roots via symmetric eigendecomposition, eigenvalues floored at
// 1e-12; non-SPD inputs are rejected.
double gaussian_w2(const Eigen::VectorXd& m1, const Eigen::MatrixXd& s1,
                   const Eigen::VectorXd& m2, const Eigen::MatrixXd& s2);

// average log_density of the rows of `samples` under g; the realism proxy
// when g is the true joint conditional
double mean_loglik(const Eigen::MatrixXd& samples, const GaussianMixture& g);

// unbiased sample mean and covariance (n >= 2 for the covariance)
void moment_summary(const Eigen::MatrixXd& samples, Eigen::VectorXd* mean,
                    Eigen::MatrixXd* cov);

// trace of the sample covariance of the pooled rows; the diversity proxy
// when the pool spans style labels at a fixed content label
double diversity_trace(const Eigen::MatrixXd& pooled);

// Discrete KL between binned empirical frequencies and bin-integrated
// analytic mass (tensor Gauss-Legendre per bin), d <= 2. Mass outside
// [lo, hi] forms one extra cell on both sides, so the result is a proper
// KL and >= 0; empty empirical bins contribute 0.
double histogram_kl(const Eigen::MatrixXd& samples, const GaussianMixture& g, int bins,
                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

}  // namespace mixguide
