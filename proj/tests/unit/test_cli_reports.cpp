#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rwrs/cli_reports.hpp"
#include "rwrs/error.hpp"

using namespace rwrs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rwrs_test_" + name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Config, ParsesSections) {
  const auto c = parse_config_text("[experiment]\nname = lln\nseed = 7\n[model]\nstep = (-1,1,2) (1,1,2)\n"
                                   "[params]\nn = 1024, 4096\nrel_tol = 0.15\nflag = yes\n");
  EXPECT_EQ(c.experiment(), "lln");
  EXPECT_EQ(c.seed(), 7u);
  EXPECT_EQ(c.get_int_list("params.n", {}), (std::vector<std::int64_t>{1024, 4096}));
  EXPECT_DOUBLE_EQ(c.get_double("params.rel_tol", 0), 0.15);
  EXPECT_TRUE(c.get_bool("params.flag", false));
  EXPECT_EQ(c.out_dir(), "artifacts");
  EXPECT_EQ(c.model().periodicity.d, 2);
}

TEST(Config, Errors) {
  EXPECT_EQ(code_of([] { parse_config_text("[experiment\nname = x\n"); }), ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] { parse_config_text("[params]\nn = 4\n").experiment(); }), ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] { parse_config_text("[params]\nn = four\n").get_int("params.n", 0); }), ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] { parse_pmf("(-1,1,2) (1,1)"); }), ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] { parse_pmf("-1,1,2"); }), ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] { parse_observable("(0,1,2)"); }), ErrorCode::ConfigParse);
  EXPECT_EQ(code_of([] { parse_config_file("/nonexistent/config.ini"); }), ErrorCode::IoFailure);
  RunConfig c;
  EXPECT_EQ(code_of([&] { apply_override(c, "novalue"); }), ErrorCode::ConfigParse);
}

TEST(Config, OverridesAndPmfForms) {
  RunConfig c = parse_config_text("[experiment]\nname = lln\n");
  apply_override(c, "reps=50");
  apply_override(c, "model.scenery=(-1,0.25) (0,0.5) (1,0.25)");
  EXPECT_EQ(c.get_uint("params.reps", 0), 50u);
  const auto m = c.model();
  EXPECT_FALSE(m.scenery.is_rational());
  EXPECT_EQ(m.periodicity.d, 1);
  const auto f = parse_observable("(0, 1) (1, -1) (0, 0.5)");
  EXPECT_DOUBLE_EQ(f.at(0), 1.5);
}

TEST(Config, HashIgnoresWorkersAndOut) {
  RunConfig a = parse_config_text("[experiment]\nname = lln\nseed = 3\n");
  RunConfig b = a;
  apply_override(b, "experiment.workers=8");
  apply_override(b, "experiment.out=/tmp/elsewhere");
  EXPECT_EQ(config_hash(a), config_hash(b));
  apply_override(b, "experiment.seed=4");
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Experiments, ModelCheckArtifacts) {
  const auto dir = scratch("model_check");
  const auto out = run_text("[experiment]\nname = model-check\n[params]\nn = 50\nreps = 20\n",
                            {"experiment.out=" + dir.string()});
  EXPECT_EQ(out.exit_code, 0);
  const auto doc = nlohmann::json::parse(slurp(dir / "model-check.json"));
  EXPECT_EQ(doc["payload"]["d"], 2);
  EXPECT_EQ(doc["payload"]["congruence_violations"], 0);
  EXPECT_TRUE(fs::exists(dir / "model-check.csv"));
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_EQ(e.path().string().find(".tmp."), std::string::npos);
}

TEST(Experiments, ExitCodes) {
  const auto dir = scratch("exit_codes");
  const std::vector<std::string> o{"experiment.out=" + dir.string()};
  EXPECT_EQ(run_text("[experiment]\nname = nope\n", o).exit_code, 3);
  EXPECT_EQ(run_text("[experiment\n", o).exit_code, 2);
  EXPECT_EQ(run("/nonexistent.ini", o).exit_code, 4);
  EXPECT_EQ(run_text("[experiment]\nname = lln\n[model]\nstep = (0,1,2) (1,1,2)\n", o).exit_code, 5);
  EXPECT_EQ(exit_code_for(ErrorCode::EmptyDirectory), 6);
  // Nothing half-written on failure.
  EXPECT_TRUE(fs::is_empty(dir));
}

TEST(Experiments, FailingCriterionGivesTen) {
  const auto dir = scratch("fail_ten");
  const auto out = run_text("[experiment]\nname = ratio\n[params]\nn = 256\nreps = 5\nrel_tol = 0\n",
                            {"experiment.out=" + dir.string()});
  EXPECT_EQ(out.exit_code, kExitReportFail);
}

TEST(Experiments, ByteIdenticalAcrossWorkers) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::string cfg = "[experiment]\nname = green-kubo\nseed = 5\n[params]\nexact_horizon = 3\nmc_horizon = 8\nreps = 3000\n";
  ASSERT_EQ(run_text(cfg, {"experiment.out=" + a.string(), "experiment.workers=1"}).exit_code, 0);
  ASSERT_EQ(run_text(cfg, {"experiment.out=" + b.string(), "experiment.workers=4"}).exit_code, 0);
  EXPECT_EQ(slurp(a / "green-kubo.json"), slurp(b / "green-kubo.json"));
  EXPECT_EQ(slurp(a / "green-kubo.csv"), slurp(b / "green-kubo.csv"));
}

TEST(Experiments, AllNamesRun) {
  const auto dir = scratch("all_names");
  const std::map<std::string, std::string> params = {
      {"model-check", ""},
      {"exact-dist", "k = 4\n"},
      {"green-kubo", "exact_horizon = 2\nmc_horizon = 4\nreps = 200\n"},
      {"brownian", "quantity = gram\nn = 256\n"},
      {"moments", "m = 1 2\nn = 64\nreps = 50\nsandwich_budget = 50\nsandwich_n_disc = 64\n"},
      {"lln", "n = 64\nreps = 50\ntarget_paths = 50\ntarget_n_disc = 64\n"},
      {"clt", "n = 64\nreps = 50\ntarget_paths = 50\ntarget_n_disc = 64\nexact_horizon = 2\nmc_horizon = 4\n"},
      {"local-limit", "n = 64\nreps = 200\nl2_n_disc = 64\nl2_budget = 50\n"},
      {"ratio", "n = 256\nreps = 4\n"},
      {"functional", "n = 64\nreps = 100\nn_disc = 64\n"}};
  for (const auto& name : experiment_names()) {
    const auto out = run_text("[experiment]\nname = " + name + "\n[params]\n" + params.at(name),
                              {"experiment.out=" + dir.string()});
    EXPECT_EQ(out.exit_code, 0) << name << ": " << (out.lines.empty() ? "" : out.lines[0]);
    EXPECT_TRUE(fs::exists(dir / (name + ".json"))) << name;
  }
}

TEST(Report, MergesAndSorts) {
  const auto dir = scratch("report");
  write_file_atomic((dir / "b.json").string(), criterion_artifact_json({7, "seven", true, "ok"}, "{}", 1));
  write_file_atomic((dir / "a.json").string(), criterion_artifact_json({3, "three", false, "bad"}, "{\"x\":1}", 1));
  write_file_atomic((dir / "junk.json").string(), "not json");
  const auto r = report(dir.string());
  ASSERT_EQ(r.criteria.size(), 2u);
  EXPECT_EQ(r.criteria[0].id, 3);
  EXPECT_FALSE(r.all_pass);
  EXPECT_NE(r.table.find("OVERALL FAIL: 3"), std::string::npos);
  fs::remove(dir / "a.json");
  const auto ok = report(dir.string());
  EXPECT_TRUE(ok.all_pass);
  EXPECT_NE(ok.table.find("OVERALL PASS (1 criteria)"), std::string::npos);
}

TEST(Report, EmptyAndMissingDirectories) {
  const auto dir = scratch("report_empty");
  EXPECT_EQ(code_of([&] { report(dir.string()); }), ErrorCode::EmptyDirectory);
  EXPECT_EQ(code_of([] { report("/nonexistent/dir"); }), ErrorCode::IoFailure);
}
