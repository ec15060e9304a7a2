#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "mixguide/rng.hpp"
#include "mixguide/world.hpp"

namespace testutil {

inline std::string data_path(const std::string& rel) {
  return std::string(MIXGUIDE_DATA_DIR) + "/" + rel;
}

inline std::filesystem::path fresh_dir(const std::string& tag) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("mixguide-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// central finite-difference gradient with per-coordinate relative step
template <typename F>
Eigen::VectorXd fd_gradient(F&& f, const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    double step = h * std::max(1.0, std::abs(x[k]));
    Eigen::VectorXd hi = x, lo = x;
    hi[k] += step;
    lo[k] -= step;
    g[k] = (f(hi) - f(lo)) / (2.0 * step);
  }
  return g;
}

inline Eigen::VectorXd random_vector(mixguide::RandomStream& rng, int d, double scale = 1.0) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = scale * rng.next_gaussian();
  return v;
}

// single isotropic-component world with one content and one style label
inline mixguide::World single_gaussian_world(double mean, double var, int d = 1) {
  Eigen::MatrixXd pi = Eigen::MatrixXd::Constant(1, 1, 1.0);
  mixguide::GaussianComponent c;
  c.mean = Eigen::VectorXd::Constant(d, mean);
  c.cov = var * Eigen::MatrixXd::Identity(d, d);
  return mixguide::World(pi, {c}, "point");
}

}  // namespace testutil
