#include "mixguide/adagn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mixguide/errors.hpp"

namespace mixguide {

FeatureTensor group_norm(const FeatureTensor& h, int groups, double eps) {
  if (groups < 1 || h.channels % groups != 0)
    throw ConstraintError(
        fmt::format("channels {} not divisible into {} groups", h.channels, groups));
  int per = h.channels / groups;
  size_t group_elems = size_t(per) * h.height * h.width;

  FeatureTensor out(h.channels, h.height, h.width);
  for (int g = 0; g < groups; ++g) {
    size_t base = size_t(g) * group_elems;
    double mean = 0.0;
    for (size_t i = 0; i < group_elems; ++i) mean += h.v[base + i];
    mean /= double(group_elems);
    double var = 0.0;
    for (size_t i = 0; i < group_elems; ++i) {
      double d = h.v[base + i] - mean;
      var += d * d;
    }
    var /= double(group_elems);
    double inv = 1.0 / std::sqrt(var + eps);
    for (size_t i = 0; i < group_elems; ++i) out.v[base + i] = (h.v[base + i] - mean) * inv;
  }
  return out;
}

Eigen::MatrixXd resample_content(const Eigen::MatrixXd& grid, int height, int width) {
  if (grid.rows() < 1 || grid.cols() < 1)
    throw ConstraintError("content grid must be non-empty");
  Eigen::MatrixXd out(height, width);
  for (int y = 0; y < height; ++y) {
    int sy = int(Eigen::Index(y) * grid.rows() / height);
    for (int x = 0; x < width; ++x) {
      int sx = int(Eigen::Index(x) * grid.cols() / width);
      out(y, x) = grid(sy, sx);
    }
  }
  return out;
}

namespace {

FeatureTensor combine_impl(const FeatureTensor& h, const Eigen::MatrixXd& z_c,
                           const Eigen::VectorXd& z_s, const AdaGnParams& p, int groups,
                           double w_c, double w_s) {
  if (p.t2.size() != h.channels || p.t3.size() != h.channels)
    throw ConstraintError("t2/t3 length must equal the channel count");
  if (p.zeta.weight.rows() != h.channels)
    throw ConstraintError("style map must produce one gain per channel");
  if (p.zeta.weight.cols() != z_s.size() || p.zeta.bias.size() != h.channels)
    throw ConstraintError("style map shape does not match the style vector");

  Eigen::MatrixXd affine = ((p.phi.gain * z_c).array() + p.phi.bias).matrix();
  Eigen::MatrixXd phi = w_c * resample_content(affine, h.height, h.width);
  Eigen::VectorXd zeta = w_s * (p.zeta.weight * z_s + p.zeta.bias);

  FeatureTensor gn = group_norm(h, groups);
  FeatureTensor out(h.channels, h.height, h.width);
  for (int c = 0; c < h.channels; ++c) {
    double channel = 1.0 + zeta[c];
    for (int y = 0; y < h.height; ++y)
      for (int x = 0; x < h.width; ++x)
        out.at(c, y, x) = (1.0 + p.t1 * phi(y, x)) * channel *
                          (p.t2[c] * gn.at(c, y, x) + p.t3[c]);
  }
  return out;
}

}  // namespace

FeatureTensor adagn_combine(const FeatureTensor& h, const Eigen::MatrixXd& z_c,
                            const Eigen::VectorXd& z_s, const AdaGnParams& p,
                            int groups) {
  return combine_impl(h, z_c, z_s, p, groups, 1.0, 1.0);
}

FeatureTensor adagn_scheduled(const FeatureTensor& h, const Eigen::MatrixXd& z_c,
                              const Eigen::VectorXd& z_s, const AdaGnParams& p,
                              int groups, const ConditionSchedule& s, double t) {
  return combine_impl(h, z_c, z_s, p, groups, weight_content(s, t), weight_style(s, t));
}

AdaGnParams load_adagn_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));

  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "adagn" || version != 1)
    throw ParseError(fmt::format("'{}' is not an adagn params file (version 1)", path));

  AdaGnParams p;
  int channels = -1, style_dim = -1;
  int zeta_rows = 0;
  std::string key;
  while (in >> key) {
    if (key == "channels") {
      in >> channels;
      p.t2.resize(channels);
      p.t3.resize(channels);
      p.zeta.bias.resize(channels);
    } else if (key == "style_dim") {
      in >> style_dim;
    } else if (key == "phi_gain") {
      in >> p.phi.gain;
    } else if (key == "phi_bias") {
      in >> p.phi.bias;
    } else if (key == "t1") {
      in >> p.t1;
    } else if (key == "t2" || key == "t3" || key == "zeta_bias") {
      if (channels < 1) throw ParseError("channels must come before vector fields");
      Eigen::VectorXd& dst = key == "t2" ? p.t2 : (key == "t3" ? p.t3 : p.zeta.bias);
      for (int i = 0; i < channels; ++i) in >> dst[i];
    } else if (key == "zeta_row") {
      if (channels < 1 || style_dim < 1)
        throw ParseError("channels and style_dim must come before zeta_row");
      if (p.zeta.weight.size() == 0) {
        p.zeta.weight.resize(channels, style_dim);
        zeta_rows = 0;
      }
      if (zeta_rows >= channels) throw ParseError("too many zeta_row lines");
      for (int i = 0; i < style_dim; ++i) in >> p.zeta.weight(zeta_rows, i);
      ++zeta_rows;
    } else {
      throw ParseError(fmt::format("unknown adagn key '{}'", key));
    }
    if (!in)
      throw ParseError(fmt::format("malformed value after '{}' in '{}'", key, path));
  }
  if (channels < 1 || style_dim < 1 || zeta_rows != channels)
    throw ParseError(fmt::format("incomplete adagn params in '{}'", path));
  return p;
}

}  // namespace mixguide
