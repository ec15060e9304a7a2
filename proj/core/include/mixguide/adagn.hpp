#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mixguide/schedule.hpp"

namespace mixguide {

// Dense (C, H, W) feature block, channel-major.
struct FeatureTensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> v;

  FeatureTensor() = default;
  FeatureTensor(int c, int h, int w)
      : channels(c), height(h), width(w), v(size_t(c) * h * w, 0.0) {}

  double& at(int c, int y, int x) { return v[(size_t(c) * height + y) * width + x]; }
  double at(int c, int y, int x) const { return v[(size_t(c) * height + y) * width + x]; }
};

// Per-group zero mean, unit variance (population variance, eps inside the
// square root). Channels must divide evenly into groups.
FeatureTensor group_norm(const FeatureTensor& h, int groups, double eps = 1e-5);

// Deterministic stand-ins for the learned conditioning maps: phi applies a
// cellwise affine to the content grid and nearest-neighbor resamples it to
// (H, W); zeta is an affine map from the style vector to C channel gains.
struct ContentMap {
  double gain = 1.0;
  double bias = 0.0;
};

struct StyleAffine {
  Eigen::MatrixXd weight;  // C x style_dim
  Eigen::VectorXd bias;    // C
};

struct AdaGnParams {
  ContentMap phi;
  StyleAffine zeta;
  double t1 = 0.0;
  Eigen::VectorXd t2;  // C
  Eigen::VectorXd t3;  // C
};

// nearest-neighbor resample of the content grid to (height, width)
Eigen::MatrixXd resample_content(const Eigen::MatrixXd& grid, int height, int width);

// out = [1 + t1*phi(z_c)]_spatial * [1 + zeta(z_s)]_channel
//         * (t2 * GN(h) + t3)_channelwise
FeatureTensor adagn_combine(const FeatureTensor& h, const Eigen::MatrixXd& z_c,
                            const Eigen::VectorXd& z_s, const AdaGnParams& p,
                            int groups);

// adagn_combine with phi scaled by w_c(t) and zeta by w_s(t)
FeatureTensor adagn_scheduled(const FeatureTensor& h, const Eigen::MatrixXd& z_c,
                              const Eigen::VectorXd& z_s, const AdaGnParams& p,
                              int groups, const ConditionSchedule& s, double t);

// Text fixture carrying the map weights and t-terms (grammar in README).
AdaGnParams load_adagn_params(const std::string& path);

}  // namespace mixguide
