#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include "rwrs/cli_reports.hpp"

#ifndef RWRS_VERSION
#define RWRS_VERSION "0.0.0"
#endif

namespace rwrs {

namespace fs = std::filesystem;
using json = nlohmann::json;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ConfigParse: return 2;
    case ErrorCode::UnknownExperiment: return 3;
    case ErrorCode::IoFailure: return 4;
    case ErrorCode::EmptyDirectory: return 6;
    default: return 5;
  }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(ErrorCode::IoFailure, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::IoFailure, "cannot rename into " + target.string());
  }
}

void write_artifacts(const ExperimentArtifacts& artifacts, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoFailure, "cannot create " + dir + ": " + ec.message());
  const fs::path base = fs::path(dir) / artifacts.name;
  write_file_atomic(base.string() + ".csv", artifacts.csv);
  write_file_atomic(base.string() + ".json", artifacts.json);
}

std::string criterion_artifact_json(const CriterionOutcome& outcome, const std::string& payload_json,
                                    std::uint64_t seed) {
  const json doc = {{"experiment", "acceptance"},
                    {"seed", seed},
                    {"version", RWRS_VERSION},
                    {"payload", json::parse(payload_json)},
                    {"criteria", json::array({{{"id", outcome.id},
                                               {"name", outcome.name},
                                               {"pass", outcome.pass},
                                               {"detail", outcome.detail}}})}};
  return doc.dump(2) + "\n";
}

namespace {

RunOutcome execute(RunConfig config, const std::vector<std::string>& overrides) {
  RunOutcome out;
  for (const auto& o : overrides) apply_override(config, o);
  const ExperimentArtifacts a = run_experiment(config);
  write_artifacts(a, config.out_dir());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", a.seconds);
  out.lines.push_back(a.name + ": wrote " + (fs::path(config.out_dir()) / a.name).string() + ".{json,csv} in " + buf +
                      " s");
  for (const auto& c : a.criteria) {
    out.lines.push_back(std::string(c.pass ? "PASS " : "FAIL ") + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
    if (!c.pass) out.exit_code = kExitReportFail;
  }
  return out;
}

template <class Fn>
RunOutcome guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return RunOutcome{exit_code_for(e.code()), {std::string("error: ") + e.what()}};
  } catch (const std::exception& e) {
    return RunOutcome{5, {std::string("error: ") + e.what()}};
  }
}

}  // namespace

RunOutcome run(const std::string& config_path, const std::vector<std::string>& overrides) {
  return guarded([&] { return execute(parse_config_file(config_path), overrides); });
}

RunOutcome run_text(const std::string& config_text, const std::vector<std::string>& overrides) {
  return guarded([&] { return execute(parse_config_text(config_text), overrides); });
}

ReportOutcome report(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorCode::IoFailure, "not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  ReportOutcome out;
  std::size_t artifacts = 0;
  for (const auto& path : files) {
    std::ifstream in(path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception&) {
      continue;
    }
    if (!doc.is_object() || !doc.contains("criteria") || !doc["criteria"].is_array()) continue;
    ++artifacts;
    for (const auto& c : doc["criteria"])
      out.criteria.push_back({c.value("id", 0), c.value("name", std::string()), c.value("pass", false),
                              c.value("detail", std::string())});
  }
  if (artifacts == 0) fail(ErrorCode::EmptyDirectory, "no artifacts in " + dir);
  std::stable_sort(out.criteria.begin(), out.criteria.end(), [](const auto& a, const auto& b) {
    return a.id != b.id ? a.id < b.id : a.name < b.name;
  });

  out.all_pass = true;
  std::vector<std::string> failing;
  std::ostringstream os;
  for (const auto& c : out.criteria) {
    os << (c.pass ? "PASS" : "FAIL") << "  " << (c.id > 0 ? std::to_string(c.id) : std::string("-")) << "  " << c.name;
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
    if (!c.pass) {
      out.all_pass = false;
      failing.push_back(c.id > 0 ? std::to_string(c.id) : c.name);
    }
  }
  if (out.all_pass) {
    os << "OVERALL PASS (" << out.criteria.size() << " criteria)\n";
  } else {
    os << "OVERALL FAIL: ";
    for (std::size_t i = 0; i < failing.size(); ++i) os << (i ? ", " : "") << failing[i];
    os << '\n';
  }
  out.table = os.str();
  return out;
}

}  // namespace rwrs
