#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mixguide/schedule.hpp"
#include "mixguide/world.hpp"

namespace mixguide {

// eps(x, t) = -sigma_t * score(p_t, x) with p_t the mixture diffused to
// noise level t. Components for every t are precomputed flat so eval() is
// allocation-free; evaluation is pure and concurrently callable.
class EpsilonField {
 public:
  static constexpr int kMaxDim = 16;
  static constexpr int kMaxComp = 64;

  EpsilonField(const GaussianMixture& g, const NoiseSchedule& ns);

  int dim() const { return dim_; }
  int steps() const { return steps_; }

  // x and eps_out are length dim()
  void eval(const double* x, int t, double* eps_out) const;

  Eigen::VectorXd eval(const Eigen::VectorXd& x, int t) const {
    Eigen::VectorXd out(dim_);
    eval(x.data(), t, out.data());
    return out;
  }

 private:
  int dim_;
  int comp_;
  int steps_;
  std::vector<double> sigma_;
  std::vector<double> mean_;   // [t][k][i]
  std::vector<double> prec_;   // [t][k][i][j]
  std::vector<double> lnorm_;  // [t][k]: log w_k - 0.5 log det(2 pi cov_tk)
};

struct ConditionSelector {
  enum Kind { unconditional, content, style, joint };
  Kind kind = unconditional;
  int i = -1;
  int j = -1;
};

EpsilonField make_epsilon_field(const World& w, const NoiseSchedule& ns,
                                const ConditionSelector& sel);

// the four fields a guided sampler consumes, for one (content, style) pair
struct OracleSet {
  EpsilonField u, c, s, j;
  int dim() const { return u.dim(); }
};

OracleSet make_oracle_set(const World& w, const NoiseSchedule& ns, int i, int j);

}  // namespace mixguide
