// rwrs command-line front end. Everything goes through the C API.
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rwrs/rwrs.h"

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::vector<std::string> n;
  std::optional<std::uint64_t> reps;
  std::vector<std::string> set;
  std::optional<std::string> step;
  std::optional<std::string> scenery;
};

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (const auto& p : parts) s += (s.empty() ? "" : " ") + p;
  return s;
}

int finish(rwrs_status status, rwrs_result* result) {
  if (status != RWRS_OK) {
    std::fprintf(stderr, "%s\n", rwrs_last_error());
    return rwrs_exit_code(status);
  }
  std::fputs(rwrs_result_text(result), stdout);
  const int code = rwrs_result_exit_code(result);
  rwrs_result_destroy(result);
  return code;
}

// Flag values shared by every experiment subcommand, as overrides.
std::vector<std::string> common_overrides(const Common& c) {
  std::vector<std::string> o;
  if (c.seed) o.push_back("experiment.seed=" + std::to_string(*c.seed));
  if (c.workers) o.push_back("experiment.workers=" + std::to_string(*c.workers));
  if (c.out) o.push_back("experiment.out=" + *c.out);
  if (!c.n.empty()) o.push_back("params.n=" + join(c.n));
  if (c.reps) o.push_back("params.reps=" + std::to_string(*c.reps));
  if (c.step) o.push_back("model.step=" + *c.step);
  if (c.scenery) o.push_back("model.scenery=" + *c.scenery);
  for (const auto& s : c.set) o.push_back(s);
  return o;
}

void add_common(CLI::App* app, Common& c, bool model_flags) {
  app->add_option("--seed", c.seed, "64-bit seed");
  app->add_option("--workers", c.workers, "worker threads (0 = all cores)");
  app->add_option("--out", c.out, "artifact directory");
  app->add_option("--n", c.n, "walk length(s)");
  app->add_option("--reps", c.reps, "replicates / budget");
  app->add_option("--set", c.set, "extra section.key=value overrides");
  if (model_flags) {
    app->add_option("--step", c.step, "step law, e.g. \"(-1,1,2) (1,1,2)\"");
    app->add_option("--scenery", c.scenery, "scenery law, same form");
  }
}

int run_experiment(const std::string& name, const std::vector<std::string>& overrides) {
  const std::string text = "[experiment]\nname = " + name + "\n";
  std::vector<const char*> argv;
  for (const auto& o : overrides) argv.push_back(o.c_str());
  rwrs_result* result = nullptr;
  const rwrs_status s = rwrs_run_text(text.c_str(), argv.data(), argv.size(), &result);
  return finish(s, result);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walk in random scenery: simulation and verification toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rwrs_version()));

  Common common;
  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "config file")->required();
  add_common(run, common, true);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "consolidated acceptance table for an artifact directory");
  report->add_option("dir", report_dir, "artifact directory")->required();

  // Experiment-specific flags map onto [params] keys.
  std::map<std::string, std::map<std::string, std::string>> extra;
  std::map<std::string, CLI::App*> subs;
  const std::vector<std::pair<const char*, const char*>> experiments = {
      {"model-check", "validate a model and print its lattice data"},
      {"exact-dist", "exact law of Z_k"},
      {"green-kubo", "Green-Kubo variance of an observable"},
      {"brownian", "Brownian local-time functionals"},
      {"moments", "moments of the Kesten-Spitzer local time"},
      {"lln", "law of large numbers moments"},
      {"clt", "central limit moments"},
      {"local-limit", "local limit plateau"},
      {"ratio", "ratio ergodic theorem"},
      {"functional", "Kolmogorov-Smirnov distance to Delta_1"}};
  std::map<std::string, Common> flags;
  for (const auto& [name, help] : experiments) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, flags[name], true);
    subs[name] = sub;
  }
  auto param = [&](const char* sub, const char* flag, const char* key, const char* help) {
    subs[sub]->add_option_function<std::string>(
        flag, [&extra, sub, key](const std::string& v) { extra[sub][key] = v; }, help);
  };
  param("exact-dist", "--k", "k", "time index");
  param("green-kubo", "--f", "f", "observable \"(a,w) ...\"");
  param("green-kubo", "--exact-horizon", "exact_horizon", "exact block horizon");
  param("green-kubo", "--mc-horizon", "mc_horizon", "Monte Carlo block horizon");
  param("brownian", "--quantity", "quantity", "l2_inverse | vk | delta | gram");
  param("brownian", "--ks", "ks", "k list for vk");
  param("brownian", "--times", "times", "time fractions for gram");
  param("moments", "--m", "m", "moment orders");
  param("moments", "--tuples", "tuples", "simplex tuples per path");
  for (const char* s : {"lln", "clt", "ratio"}) param(s, "--f", "f", "observable \"(a,w) ...\"");
  for (const char* s : {"lln", "clt"}) param(s, "--max-moment", "max_moment", "highest moment");
  param("local-limit", "--a", "a", "levels");
  param("ratio", "--xi-equals", "xi_equals", "scenery value filter at the particle");
  param("functional", "--n-disc", "n_disc", "walk steps behind each Delta_1 draw");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    const auto overrides = common_overrides(common);
    std::vector<const char*> ov;
    for (const auto& o : overrides) ov.push_back(o.c_str());
    rwrs_result* result = nullptr;
    const rwrs_status s = rwrs_run_file(config_path.c_str(), ov.data(), ov.size(), &result);
    return finish(s, result);
  }
  if (report->parsed()) {
    rwrs_result* result = nullptr;
    const rwrs_status s = rwrs_report(report_dir.c_str(), &result);
    return finish(s, result);
  }
  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    auto overrides = common_overrides(flags[name]);
    for (const auto& [key, value] : extra[name]) overrides.push_back("params." + key + "=" + value);
    return run_experiment(name, overrides);
  }
  return 0;
}
