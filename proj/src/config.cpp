#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "rwrs/cli_reports.hpp"
#include "rwrs/rng.hpp"

namespace rwrs {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    fail(ErrorCode::ConfigParse, "bad value for " + key + ": '" + text + "'");
  return value;
}

// Contents of each "( ... )" group, split on commas.
std::vector<std::vector<std::string>> tuples(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    if (c != '(') fail(ErrorCode::ConfigParse, "expected '(' in '" + text + "'");
    const auto close = text.find(')', i);
    if (close == std::string::npos) fail(ErrorCode::ConfigParse, "unbalanced '(' in '" + text + "'");
    std::vector<std::string> fields;
    std::stringstream inner(text.substr(i + 1, close - i - 1));
    std::string field;
    while (std::getline(inner, field, ',')) fields.push_back(trim(field));
    out.push_back(std::move(fields));
    i = close + 1;
  }
  if (out.empty()) fail(ErrorCode::ConfigParse, "no tuples in '" + text + "'");
  return out;
}

const char* kRademacher = "(-1,1,2) (1,1,2)";

}  // namespace

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::int64_t RunConfig::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? parse_number<std::int64_t>(key, get(key, "")) : fallback;
}

std::uint64_t RunConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? parse_number<std::uint64_t>(key, get(key, "")) : fallback;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string t = trim(get(key, ""));
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigParse, "bad number for " + key + ": '" + t + "'");
  }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string t = trim(get(key, ""));
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  fail(ErrorCode::ConfigParse, "bad boolean for " + key + ": '" + t + "'");
}

std::vector<std::int64_t> RunConfig::get_int_list(const std::string& key, std::vector<std::int64_t> fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::int64_t> out;
  std::string text = get(key, "");
  std::replace(text.begin(), text.end(), ',', ' ');
  std::stringstream ss(text);
  std::string tok;
  while (ss >> tok) out.push_back(parse_number<std::int64_t>(key, tok));
  if (out.empty()) fail(ErrorCode::ConfigParse, "empty list for " + key);
  return out;
}

std::string RunConfig::experiment() const {
  if (!has("experiment.name")) fail(ErrorCode::ConfigParse, "missing experiment.name");
  return trim(get("experiment.name", ""));
}

std::uint64_t RunConfig::seed() const { return get_uint("experiment.seed", 1); }

unsigned RunConfig::workers() const { return static_cast<unsigned>(get_uint("experiment.workers", 0)); }

std::string RunConfig::out_dir() const { return trim(get("experiment.out", "artifacts")); }

ModelConfig RunConfig::model() const {
  return validate_model(parse_pmf(get("model.step", kRademacher)), parse_pmf(get("model.scenery", kRademacher)));
}

Observable RunConfig::observable(const std::string& key, const Observable& fallback) const {
  return has(key) ? parse_observable(get(key, "")) : fallback;
}

LatticePmf parse_pmf(const std::string& text) {
  const auto groups = tuples(text);
  const std::size_t width = groups.front().size();
  for (const auto& g : groups)
    if (g.size() != width) fail(ErrorCode::ConfigParse, "mixed tuple widths in '" + text + "'");
  if (width == 3) {
    std::vector<std::array<std::int64_t, 3>> triples;
    for (const auto& g : groups)
      triples.push_back({parse_number<std::int64_t>("pmf", g[0]), parse_number<std::int64_t>("pmf", g[1]),
                         parse_number<std::int64_t>("pmf", g[2])});
    return LatticePmf::from_rationals(triples);
  }
  if (width == 2) {
    std::vector<std::pair<std::int64_t, double>> pairs;
    for (const auto& g : groups) {
      RunConfig tmp;
      tmp.values["mass"] = g[1];
      pairs.emplace_back(parse_number<std::int64_t>("pmf", g[0]), tmp.get_double("mass", 0.0));
    }
    return LatticePmf::from_doubles(pairs);
  }
  fail(ErrorCode::ConfigParse, "pmf tuples need 2 or 3 fields: '" + text + "'");
}

Observable parse_observable(const std::string& text) {
  Observable f;
  for (const auto& g : tuples(text)) {
    if (g.size() != 2) fail(ErrorCode::ConfigParse, "observable tuples are (a, weight): '" + text + "'");
    RunConfig tmp;
    tmp.values["w"] = g[1];
    f[parse_number<std::int64_t>("observable", g[0])] += tmp.get_double("w", 0.0);
  }
  return f;
}

RunConfig parse_config_text(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::ConfigParse, std::string("line ") + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      // Top-level key outside any section.
      config.values["params." + section] = trim(body.data());
      continue;
    }
    for (const auto& [key, value] : body) config.values[section + "." + key] = trim(value.data());
  }
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) fail(ErrorCode::ConfigParse, "override must be key=value: " + assignment);
  std::string key = trim(assignment.substr(0, eq));
  if (key.find('.') == std::string::npos) key = "params." + key;
  config.values[key] = trim(assignment.substr(eq + 1));
}

std::string canonical_config_json(const RunConfig& config) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : config.values) {
    // Worker count and output location do not change results.
    if (k == "experiment.workers" || k == "experiment.out") continue;
    j[k] = v;
  }
  return j.dump();
}

std::string config_hash(const RunConfig& config) {
  const std::uint64_t h = experiment_id(canonical_config_json(config));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rwrs
