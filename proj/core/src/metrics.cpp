#include "mixguide/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mixguide/errors.hpp"

namespace mixguide {

namespace {

constexpr double kEigenFloor = 1e-12;

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& s, const char* who) {
  if (!s.isApprox(s.transpose(), 1e-9))
    throw ConstraintError(fmt::format("{}: covariance not symmetric", who));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.eigenvalues().minCoeff() < -1e-9)
    throw ConstraintError(fmt::format("{}: covariance not positive definite", who));
  Eigen::VectorXd root = eig.eigenvalues().cwiseMax(kEigenFloor).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGlNode[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

double bin_mass_1d(const GaussianMixture& g, double a, double b) {
  double half = 0.5 * (b - a);
  double mid = 0.5 * (a + b);
  double mass = 0.0;
  Eigen::VectorXd x(1);
  for (int q = 0; q < 8; ++q) {
    x[0] = mid + half * kGlNode[q];
    mass += kGlWeight[q] * std::exp(g.log_density(x));
  }
  return mass * half;
}

double bin_mass_2d(const GaussianMixture& g, double ax, double bx, double ay, double by) {
  double hx = 0.5 * (bx - ax), mx = 0.5 * (ax + bx);
  double hy = 0.5 * (by - ay), my = 0.5 * (ay + by);
  double mass = 0.0;
  Eigen::VectorXd x(2);
  for (int qx = 0; qx < 8; ++qx) {
    x[0] = mx + hx * kGlNode[qx];
    for (int qy = 0; qy < 8; ++qy) {
      x[1] = my + hy * kGlNode[qy];
      mass += kGlWeight[qx] * kGlWeight[qy] * std::exp(g.log_density(x));
    }
  }
  return mass * hx * hy;
}

}  // namespace

double gaussian_w2(const Eigen::VectorXd& m1, const Eigen::MatrixXd& s1,
                   const Eigen::VectorXd& m2, const Eigen::MatrixXd& s2) {
  if (m1.size() != m2.size() || s1.rows() != m1.size() || s2.rows() != m2.size())
    throw ConstraintError("gaussian_w2: dimension mismatch");
  Eigen::MatrixXd root2 = spd_sqrt(s2, "gaussian_w2");
  Eigen::MatrixXd cross = spd_sqrt(root2 * s1 * root2, "gaussian_w2");
  double tr = (s1 + s2 - 2.0 * cross).trace();
  double d2 = (m1 - m2).squaredNorm() + std::max(tr, 0.0);
  return std::sqrt(d2);
}

double mean_loglik(const Eigen::MatrixXd& samples, const GaussianMixture& g) {
  if (samples.cols() != g.dim()) throw ConstraintError("mean_loglik: dimension mismatch");
  if (samples.rows() < 1) throw ConstraintError("mean_loglik: empty sample set");
  double acc = 0.0;
  Eigen::VectorXd x(g.dim());
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    x = samples.row(r).transpose();
    acc += g.log_density(x);
  }
  return acc / double(samples.rows());
}

void moment_summary(const Eigen::MatrixXd& samples, Eigen::VectorXd* mean,
                    Eigen::MatrixXd* cov) {
  Eigen::Index n = samples.rows();
  if (n < 1) throw ConstraintError("moment_summary: empty sample set");
  Eigen::VectorXd m = samples.colwise().mean();
  if (mean) *mean = m;
  if (!cov) return;
  if (n < 2) throw ConstraintError("moment_summary: covariance needs n >= 2");
  Eigen::MatrixXd centered = samples.rowwise() - m.transpose();
  *cov = centered.transpose() * centered / double(n - 1);
}

double diversity_trace(const Eigen::MatrixXd& pooled) {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  moment_summary(pooled, &mean, &cov);
  return cov.trace();
}

double histogram_kl(const Eigen::MatrixXd& samples, const GaussianMixture& g, int bins,
                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  int d = g.dim();
  if (d > 2) throw ConstraintError("histogram_kl supports d <= 2");
  if (samples.cols() != d) throw ConstraintError("histogram_kl: dimension mismatch");
  if (bins < 1) throw ConstraintError("histogram_kl: need at least one bin");
  if (lo.size() != d || hi.size() != d || !((lo.array() < hi.array()).all()))
    throw ConstraintError("histogram_kl: invalid range");

  Eigen::Index n = samples.rows();
  int cells = d == 1 ? bins : bins * bins;
  std::vector<double> emp(cells + 1, 0.0);  // last cell = everything off-range
  std::vector<double> ana(cells + 1, 0.0);

  for (Eigen::Index r = 0; r < n; ++r) {
    int idx = cells;  // off-range unless every coordinate lands in a bin
    int bx = int(std::floor((samples(r, 0) - lo[0]) / (hi[0] - lo[0]) * bins));
    if (bx >= 0 && bx < bins) {
      if (d == 1) {
        idx = bx;
      } else {
        int by = int(std::floor((samples(r, 1) - lo[1]) / (hi[1] - lo[1]) * bins));
        if (by >= 0 && by < bins) idx = bx * bins + by;
      }
    }
    emp[idx] += 1.0;
  }
  for (double& e : emp) e /= double(n);

  double in_range = 0.0;
  if (d == 1) {
    double w = (hi[0] - lo[0]) / bins;
    for (int b = 0; b < bins; ++b) {
      ana[b] = bin_mass_1d(g, lo[0] + b * w, lo[0] + (b + 1) * w);
      in_range += ana[b];
    }
  } else {
    double wx = (hi[0] - lo[0]) / bins;
    double wy = (hi[1] - lo[1]) / bins;
    for (int bx = 0; bx < bins; ++bx)
      for (int by = 0; by < bins; ++by) {
        double m = bin_mass_2d(g, lo[0] + bx * wx, lo[0] + (bx + 1) * wx,
                               lo[1] + by * wy, lo[1] + (by + 1) * wy);
        ana[bx * bins + by] = m;
        in_range += m;
      }
  }
  ana[cells] = std::max(1.0 - in_range, 0.0);

  double kl = 0.0;
  for (int c = 0; c <= cells; ++c) {
    if (emp[c] <= 0.0) continue;  // empty empirical bins contribute 0
    kl += emp[c] * std::log(emp[c] / std::max(ana[c], 1e-300));
  }
  return std::max(kl, 0.0);
}

}  // namespace mixguide
