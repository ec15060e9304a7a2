#pragma once

#include <Eigen/Dense>

#include "mixguide/oracle.hpp"
#include "mixguide/rng.hpp"
#include "mixguide/schedule.hpp"
#include "mixguide/world.hpp"

namespace mixguide {

// (alpha, lambda, beta_c, beta_s): overall strength, joint-vs-independent
// tradeoff, per-condition weights. beta_c + beta_s = 1 is enforced at
// construction, never per call.
struct GuidanceConfig {
  double alpha = 1.5;
  double lambda = 0.9;
  double beta_c = 0.0;
  double beta_s = 1.0;

  static GuidanceConfig make(double alpha, double lambda, double beta_c, double beta_s);
  // throws ConstraintError naming the violated constraint
  void validate() const;
};

// eps_u + alpha*beta*(eps_c - eps_u)
void compose_cfg(const double* eps_u, const double* eps_c, double alpha, double beta,
                 int d, double* out);

// eps_u + alpha*[beta_c*(eps_c - eps_u) + beta_s*(eps_s - eps_u)]
void compose_cdm(const double* eps_u, const double* eps_c, const double* eps_s,
                 const GuidanceConfig& g, int d, double* out);

// eps_u + alpha*[lambda*(eps_j - eps_u)
//                + (1-lambda)*(beta_c*(eps_c - eps_u) + beta_s*(eps_s - eps_u))]
void compose_gcdm(const double* eps_u, const double* eps_c, const double* eps_s,
                  const double* eps_j, const GuidanceConfig& g, int d, double* out);

// timestep weighting as interpolation toward the unconditional field:
// eps_c' = eps_u + w_c(t)*(eps_c - eps_u), eps_s' mirrored. Applies to the
// single-condition fields only; the joint field is never scheduled.
void scheduled_conditionals(const double* eps_u, const double* eps_c,
                            const double* eps_s, const ConditionSchedule& s, double t,
                            int d, double* eps_c_out, double* eps_s_out);

Eigen::VectorXd compose_cfg(const Eigen::VectorXd& eps_u, const Eigen::VectorXd& eps_c,
                            double alpha, double beta);
Eigen::VectorXd compose_cdm(const Eigen::VectorXd& eps_u, const Eigen::VectorXd& eps_c,
                            const Eigen::VectorXd& eps_s, const GuidanceConfig& g);
Eigen::VectorXd compose_gcdm(const Eigen::VectorXd& eps_u, const Eigen::VectorXd& eps_c,
                             const Eigen::VectorXd& eps_s, const Eigen::VectorXd& eps_j,
                             const GuidanceConfig& g);

// Unnormalized log-density the composite score field is the gradient of:
//   (1-alpha)*log p_t(x) + alpha*[lambda*log p_t(x|i,j)
//     + (1-lambda)*(beta_c*log p_t(x|i) + beta_s*log p_t(x|j))]
// with every term the diffused density at t.
class TiltedDensity {
 public:
  TiltedDensity(const World& w, const NoiseSchedule& ns, int t, const GuidanceConfig& g,
                int i, int j);

  double operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

 private:
  double cu_, cj_, cc_, cs_;
  GaussianMixture pu_, pj_, pc_, ps_;
};

// Per-step record of the guidance decomposition at one state.
struct EpsRecord {
  Eigen::VectorXd eps_u, eps_c, eps_s, eps_j, composite;
};

// Composite GCDM epsilon over a precomputed oracle set, with optional
// timestep scheduling of the single-condition terms. Skips whole terms when
// their coefficient is exactly zero, so unconditional runs pay for one field.
class CompositeField {
 public:
  CompositeField(const OracleSet* oracles, GuidanceConfig g,
                 const ConditionSchedule* cond = nullptr);

  int dim() const { return oracles_->dim(); }
  void eval(const double* x, int t, double* out, EpsRecord* rec = nullptr) const;

  Eigen::VectorXd eval(const Eigen::VectorXd& x, int t) const {
    Eigen::VectorXd out(dim());
    eval(x.data(), t, out.data());
    return out;
  }

 private:
  const OracleSet* oracles_;
  GuidanceConfig g_;
  const ConditionSchedule* cond_;
  bool need_joint_;
  bool need_single_;
};

// Worst relative deviation between the composite score -eps/sigma_t and the
// central finite-difference gradient of the tilted log-density, probed at
// draws from the diffused marginal.
double gcdm_log_density_gradient_check(const World& w, const NoiseSchedule& ns,
                                       const GuidanceConfig& g, int t, int i, int j,
                                       int probes, RandomStream& rng);

}  // namespace mixguide
