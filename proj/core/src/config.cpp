#include "mixguide/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "mixguide/errors.hpp"
#include "mixguide/text.hpp"

namespace mixguide {
namespace {

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return true;
}

double parse_double(const std::string& key, const std::string& raw, int line) {
  const char* begin = raw.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError(fmt::format("line {}: key '{}': expected a real number, got '{}'", line, key, raw));
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& raw, int line) {
  const char* begin = raw.c_str();
  char* end = nullptr;
  long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ParseError(fmt::format("line {}: key '{}': expected an integer, got '{}'", line, key, raw));
  return v;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "version",        "world",          "label_content", "label_style",   "alpha",
      "lambda",         "beta_c",         "beta_s",        "schedule",      "schedule_a",
      "schedule_b",     "schedule_floor", "schedule_ceiling", "noise_steps", "noise_kind",
      "noise_beta_min", "noise_beta_max", "sampler",       "eta",           "sampler_steps",
      "step_list",      "start",          "sdedit_t0",     "x0",            "n",
      "seed",           "out"};
  return keys;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

ConfigMap ConfigMap::parse_text(const std::string& text, const std::string& origin) {
  ConfigMap out;
  out.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string s = trim(raw);
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ParseError(fmt::format("{}: line {}: expected 'key = value', got '{}'", origin, line, s));
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (!valid_key(key))
      throw ParseError(fmt::format("{}: line {}: invalid key '{}'", origin, line, key));
    if (value.empty())
      throw ParseError(fmt::format("{}: line {}: key '{}' has an empty value", origin, line, key));
    if (out.kv_.count(key))
      throw ParseError(fmt::format("{}: line {}: duplicate key '{}' (first at line {})", origin, line, key,
                                   out.kv_[key].second));
    out.kv_[key] = {value, line};
  }
  return out;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open config file '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

std::string ConfigMap::get_string(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ParseError(fmt::format("{}: missing required key '{}'", origin_, key));
  return it->second.first;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second.first;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  return parse_double(key, it->second.first, it->second.second);
}

std::int64_t ConfigMap::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  return parse_int(key, it->second.first, it->second.second);
}

std::vector<double> ConfigMap::get_doubles(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return {};
  std::vector<double> out;
  for (const std::string& tok : split_list(it->second.first))
    out.push_back(parse_double(key, tok, it->second.second));
  return out;
}

namespace {

// Every effective knob, sorted by key; location-only keys (`out`) excluded so
// the digest tracks what was computed, not where it landed.
std::string canonical_text(const ExperimentConfig& e) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("version", "1");
  if (!e.world_path.empty()) kv.emplace_back("world", e.world_path);
  kv.emplace_back("label_content", std::to_string(e.label_content));
  kv.emplace_back("label_style", std::to_string(e.label_style));
  kv.emplace_back("alpha", format_g17(e.guidance.alpha));
  kv.emplace_back("lambda", format_g17(e.guidance.lambda));
  kv.emplace_back("beta_c", format_g17(e.guidance.beta_c));
  kv.emplace_back("beta_s", format_g17(e.guidance.beta_s));
  if (e.use_condition_schedule) {
    kv.emplace_back("schedule", to_string(e.cond.kind));
    kv.emplace_back("schedule_a", format_g17(e.cond.a));
    kv.emplace_back("schedule_b", format_g17(e.cond.b));
    kv.emplace_back("schedule_floor", format_g17(e.cond.floor));
    kv.emplace_back("schedule_ceiling", format_g17(e.cond.ceiling));
  } else {
    kv.emplace_back("schedule", "none");
  }
  kv.emplace_back("noise_steps", std::to_string(e.noise_steps));
  kv.emplace_back("noise_kind", to_string(e.noise_kind));
  kv.emplace_back("noise_beta_min", format_g17(e.beta_min));
  kv.emplace_back("noise_beta_max", format_g17(e.beta_max));
  kv.emplace_back("sampler", to_string(e.sampler.kind));
  if (e.sampler.kind == SamplerKind::ddim) kv.emplace_back("eta", format_g17(e.sampler.eta));
  {
    std::string steps;
    for (std::size_t i = 0; i < e.sampler.steps.size(); ++i) {
      if (i) steps += ',';
      steps += std::to_string(e.sampler.steps[i]);
    }
    kv.emplace_back("step_list", steps);
  }
  kv.emplace_back("start", to_string(e.sampler.start));
  if (e.sampler.start == StartKind::sdedit)
    kv.emplace_back("sdedit_t0", std::to_string(e.sampler.sdedit_t0));
  if (e.sampler.start != StartKind::pure_noise) {
    std::string x0;
    for (Eigen::Index i = 0; i < e.x0.size(); ++i) {
      if (i) x0 += ',';
      x0 += format_g17(e.x0[i]);
    }
    kv.emplace_back("x0", x0);
  }
  kv.emplace_back("n", std::to_string(e.n));
  kv.emplace_back("seed", std::to_string(e.seed));
  std::sort(kv.begin(), kv.end());
  std::string text;
  for (const auto& [k, v] : kv) text += fmt::format("{} = {}\n", k, v);
  return text;
}

}  // namespace

ExperimentConfig resolve_experiment(const ConfigMap& cfg) {
  for (const auto& [key, entry] : cfg.entries())
    if (!known_keys().count(key))
      throw ParseError(fmt::format("{}: line {}: unknown key '{}'", cfg.origin(), entry.second, key));

  std::int64_t version = cfg.get_int("version", -1);
  if (!cfg.has("version")) throw ParseError(fmt::format("{}: missing required key 'version'", cfg.origin()));
  if (version != 1)
    throw ParseError(fmt::format("{}: unsupported config version {} (expected 1)", cfg.origin(), version));

  ExperimentConfig e;
  e.world_path = cfg.get_string("world", "");
  e.label_content = static_cast<int>(cfg.get_int("label_content", 0));
  e.label_style = static_cast<int>(cfg.get_int("label_style", 0));
  if (e.label_content < 0 || e.label_style < 0)
    throw ConstraintError("label_content and label_style must be nonnegative");

  double alpha = cfg.get_double("alpha", 1.5);
  double lambda = cfg.get_double("lambda", 0.9);
  double beta_c, beta_s;
  if (cfg.has("beta_c") && cfg.has("beta_s")) {
    beta_c = cfg.get_double("beta_c", 0.0);
    beta_s = cfg.get_double("beta_s", 0.0);
  } else if (cfg.has("beta_c")) {
    beta_c = cfg.get_double("beta_c", 0.0);
    beta_s = 1.0 - beta_c;
  } else {
    beta_s = cfg.get_double("beta_s", 1.0);
    beta_c = 1.0 - beta_s;
  }
  e.guidance = GuidanceConfig::make(alpha, lambda, beta_c, beta_s);

  e.noise_steps = static_cast<int>(cfg.get_int("noise_steps", 1000));
  e.noise_kind = noise_kind_from_string(cfg.get_string("noise_kind", "linear"));
  e.beta_min = cfg.get_double("noise_beta_min", 1e-4);
  e.beta_max = cfg.get_double("noise_beta_max", 0.02);
  build_noise_schedule(e.noise_steps, e.noise_kind, e.beta_min, e.beta_max);  // validates

  std::string schedule = cfg.get_string("schedule", "sigmoid");
  if (schedule == "none") {
    e.use_condition_schedule = false;
  } else {
    e.use_condition_schedule = true;
    e.cond.kind = weight_kind_from_string(schedule);
    e.cond.a = cfg.get_double("schedule_a", 0.025);
    e.cond.b = cfg.get_double("schedule_b", 550.0);
    e.cond.floor = cfg.get_double("schedule_floor", 0.0);
    e.cond.ceiling = cfg.get_double("schedule_ceiling", 1.0);
    e.cond.steps = e.noise_steps;
    validate_condition_schedule(e.cond);
  }

  e.sampler.kind = sampler_kind_from_string(cfg.get_string("sampler", "ddim"));
  e.sampler.eta = cfg.get_double("eta", 0.0);
  e.sampler.start = start_kind_from_string(cfg.get_string("start", "pure_noise"));
  e.sampler.sdedit_t0 = static_cast<int>(cfg.get_int("sdedit_t0", 600));
  if (cfg.has("step_list")) {
    e.sampler.steps.clear();
    auto it = cfg.entries().find("step_list");
    for (const std::string& tok : split_list(it->second.first))
      e.sampler.steps.push_back(static_cast<int>(parse_int("step_list", tok, it->second.second)));
    e.sampler_step_count = static_cast<int>(e.sampler.steps.size());
  } else {
    e.sampler_step_count = static_cast<int>(cfg.get_int("sampler_steps", 100));
    if (e.sampler_step_count < 1 || e.sampler_step_count > e.noise_steps)
      throw ConstraintError(
          fmt::format("sampler_steps must be in [1, {}], got {}", e.noise_steps, e.sampler_step_count));
    e.sampler.steps = uniform_steps(e.noise_steps, e.sampler_step_count);
  }
  e.sampler.validate(e.noise_steps);

  std::vector<double> x0 = cfg.get_doubles("x0");
  e.x0 = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  if (e.sampler.start != StartKind::pure_noise && e.x0.size() == 0)
    throw ConstraintError(fmt::format("start = {} requires key 'x0'", to_string(e.sampler.start)));

  e.n = static_cast<int>(cfg.get_int("n", 1000));
  if (e.n < 1) throw ConstraintError(fmt::format("n must be positive, got {}", e.n));
  std::int64_t seed = cfg.get_int("seed", 0);
  if (seed < 0) throw ConstraintError(fmt::format("seed must be nonnegative, got {}", seed));
  e.seed = static_cast<std::uint64_t>(seed);
  e.out_dir = cfg.get_string("out", ".");

  e.canonical = canonical_text(e);
  e.hash = fmt::format("{:016x}", fnv1a64(e.canonical));
  return e;
}

ExperimentConfig load_experiment(const std::string& path) {
  return resolve_experiment(ConfigMap::parse_file(path));
}

}  // namespace mixguide
