#include "mixguide/output.hpp"

#include <fstream>

#include <fmt/format.h>

#include "mixguide/errors.hpp"
#include "mixguide/text.hpp"
#include "mixguide/version.hpp"

namespace mixguide {

std::string render_header(const OutputHeader& h) {
  std::string out = fmt::format("# mixguide {}\n", kVersion);
  if (!h.config_hash.empty()) out += fmt::format("# config {}\n", h.config_hash);
  if (!h.world.empty()) out += fmt::format("# world {}\n", h.world);
  out += fmt::format("# seed {}\n", h.seed);
  if (!h.columns.empty()) {
    out += "# columns";
    for (const std::string& c : h.columns) out += " " + c;
    out += "\n";
  }
  return out;
}

std::string render_samples(const Eigen::MatrixXd& rows, const OutputHeader& h) {
  std::string out = render_header(h);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      if (c) out += ' ';
      out += format_g17(rows(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string render_trajectories(const std::vector<Trajectory>& trajs, OutputHeader h) {
  int dim = 0;
  if (!trajs.empty()) dim = static_cast<int>(trajs[0].output.size());
  h.columns = {"traj", "t"};
  for (int k = 0; k < dim; ++k) h.columns.push_back(fmt::format("x{}", k));
  for (const char* term : {"eps_u", "eps_c", "eps_s", "eps_j", "eps"})
    h.columns.push_back(term);
  std::string out = render_header(h);

  auto emit = [&](int id, int t, const Eigen::VectorXd& x, const EpsRecord* rec) {
    out += fmt::format("{} {}", id, t);
    for (Eigen::Index k = 0; k < x.size(); ++k) out += " " + format_g17(x[k]);
    const Eigen::VectorXd* terms[5] = {nullptr, nullptr, nullptr, nullptr, nullptr};
    if (rec) {
      terms[0] = &rec->eps_u;
      terms[1] = &rec->eps_c;
      terms[2] = &rec->eps_s;
      terms[3] = &rec->eps_j;
      terms[4] = &rec->composite;
    }
    for (const Eigen::VectorXd* v : terms)
      out += " " + format_g17(v && v->size() ? v->norm() : 0.0);
    out += '\n';
  };

  for (std::size_t id = 0; id < trajs.size(); ++id) {
    const Trajectory& tr = trajs[id];
    for (std::size_t s = 0; s < tr.states.size(); ++s) {
      const EpsRecord* rec = s < tr.records.size() ? &tr.records[s].eps : nullptr;
      emit(static_cast<int>(id), tr.states[s].first, tr.states[s].second, rec);
    }
    emit(static_cast<int>(id), -1, tr.output, nullptr);
  }
  return out;
}

std::string render_metrics(const std::vector<MetricRow>& rows, const OutputHeader& h,
                           const std::vector<std::string>& footer) {
  OutputHeader hh = h;
  hh.columns = {"config", "metric", "value", "n", "seed"};
  std::string out = render_header(hh);
  for (const MetricRow& r : rows)
    out += fmt::format("{} {} {} {} {}\n", r.config_hash, r.metric, format_g17(r.value), r.n, r.seed);
  for (const std::string& line : footer) out += fmt::format("# {}\n", line);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw ParseError(fmt::format("cannot open '{}' for writing", path));
  out << content;
  if (!out) throw ParseError(fmt::format("failed writing '{}'", path));
}

}  // namespace mixguide
