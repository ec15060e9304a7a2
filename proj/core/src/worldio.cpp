#include "mixguide/worldio.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "mixguide/errors.hpp"
#include "mixguide/text.hpp"

namespace mixguide {
namespace {

struct LineReader {
  std::istringstream in;
  std::string origin;
  int line = 0;

  // next nonempty, comment-stripped line split on whitespace
  bool next(std::vector<std::string>* tokens) {
    std::string raw;
    while (std::getline(in, raw)) {
      ++line;
      std::size_t hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      *tokens = split_ws(raw);
      if (!tokens->empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(fmt::format("{}: line {}: {}", origin, line, what));
  }
};

double to_real(LineReader& r, const std::string& tok) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') r.fail(fmt::format("expected a real number, got '{}'", tok));
  return v;
}

int to_count(LineReader& r, const std::string& tok, int lo, int hi) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0' || v < lo || v > hi)
    r.fail(fmt::format("expected an integer in [{}, {}], got '{}'", lo, hi, tok));
  return static_cast<int>(v);
}

}  // namespace

World parse_world(const std::string& text, const std::string& origin) {
  LineReader r{std::istringstream(text), origin};
  std::vector<std::string> tok;

  if (!r.next(&tok) || tok.size() != 2 || tok[0] != "mixworld") r.fail("expected header 'mixworld 1'");
  if (tok[1] != "1") r.fail(fmt::format("unsupported world format version '{}'", tok[1]));

  if (!r.next(&tok) || tok[0] != "name" || tok.size() != 2) r.fail("expected 'name <identifier>'");
  std::string name = tok[1];

  if (!r.next(&tok) || tok[0] != "dim" || tok.size() != 2) r.fail("expected 'dim <d>'");
  int dim = to_count(r, tok[1], 1, 1024);

  if (!r.next(&tok) || tok[0] != "labels" || tok.size() != 3) r.fail("expected 'labels <n_content> <n_style>'");
  int nc = to_count(r, tok[1], 1, 4096);
  int ns = to_count(r, tok[2], 1, 4096);

  Eigen::MatrixXd pi(nc, ns);
  for (int i = 0; i < nc; ++i) {
    if (!r.next(&tok) || tok[0] != "pi" || static_cast<int>(tok.size()) != ns + 1)
      r.fail(fmt::format("expected 'pi' row {} with {} weights", i, ns));
    for (int j = 0; j < ns; ++j) pi(i, j) = to_real(r, tok[j + 1]);
  }

  std::vector<GaussianComponent> comps(static_cast<std::size_t>(nc) * ns);
  std::vector<bool> seen(comps.size(), false);
  while (r.next(&tok)) {
    if (tok[0] != "component" || tok.size() != 3) r.fail("expected 'component <i> <j>'");
    int i = to_count(r, tok[1], 0, nc - 1);
    int j = to_count(r, tok[2], 0, ns - 1);
    std::size_t idx = static_cast<std::size_t>(i) * ns + j;
    if (seen[idx]) r.fail(fmt::format("duplicate component ({}, {})", i, j));
    seen[idx] = true;

    GaussianComponent& c = comps[idx];
    if (!r.next(&tok) || tok[0] != "mean" || static_cast<int>(tok.size()) != dim + 1)
      r.fail(fmt::format("expected 'mean' with {} values", dim));
    c.mean.resize(dim);
    for (int k = 0; k < dim; ++k) c.mean[k] = to_real(r, tok[k + 1]);
    c.cov.resize(dim, dim);
    for (int row = 0; row < dim; ++row) {
      if (!r.next(&tok) || tok[0] != "cov" || static_cast<int>(tok.size()) != dim + 1)
        r.fail(fmt::format("expected 'cov' row {} with {} values", row, dim));
      for (int k = 0; k < dim; ++k) c.cov(row, k) = to_real(r, tok[k + 1]);
    }
  }
  for (std::size_t idx = 0; idx < seen.size(); ++idx)
    if (!seen[idx])
      r.fail(fmt::format("missing component ({}, {})", idx / ns, idx % ns));

  return World(std::move(pi), std::move(comps), std::move(name));
}

World load_world(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open world file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_world(buf.str(), path);
}

std::string serialize_world(const World& w) {
  std::string out = "mixworld 1\n";
  out += fmt::format("name {}\n", w.name().empty() ? "world" : w.name());
  out += fmt::format("dim {}\n", w.dim());
  out += fmt::format("labels {} {}\n", w.content_count(), w.style_count());
  for (int i = 0; i < w.content_count(); ++i) {
    out += "pi";
    for (int j = 0; j < w.style_count(); ++j) out += " " + format_g17(w.pair_weights()(i, j));
    out += "\n";
  }
  for (int i = 0; i < w.content_count(); ++i)
    for (int j = 0; j < w.style_count(); ++j) {
      const GaussianComponent& c = w.component(i, j);
      out += fmt::format("component {} {}\n", i, j);
      out += "mean";
      for (int k = 0; k < w.dim(); ++k) out += " " + format_g17(c.mean[k]);
      out += "\n";
      for (int row = 0; row < w.dim(); ++row) {
        out += "cov";
        for (int k = 0; k < w.dim(); ++k) out += " " + format_g17(c.cov(row, k));
        out += "\n";
      }
    }
  return out;
}

void save_world(const World& w, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError(fmt::format("cannot open '{}' for writing", path));
  out << serialize_world(w);
  if (!out) throw ParseError(fmt::format("failed writing '{}'", path));
}

}  // namespace mixguide
