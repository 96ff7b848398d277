// Command line front end: run, validate, corpus list, corpus run.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "proxbundle/experiment/config.hpp"
#include "proxbundle/experiment/runner.hpp"
#include "proxbundle/piecewise.hpp"

namespace {

using namespace proxbundle;
using namespace proxbundle::experiment;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;

struct Overrides {
  std::string out;
  std::string params;
  std::string f2;
  long long seed = -1;
  std::string corpus_file;
};

void apply(RunConfig& config, const Overrides& o) {
  if (!o.params.empty()) apply_overrides(config, o.params);
  if (!o.f2.empty()) apply_setting(config, "f2", o.f2);
  if (o.seed >= 0) config.seed = static_cast<std::uint64_t>(o.seed);
  if (!o.corpus_file.empty()) {
    apply_setting(config, "corpus_file", o.corpus_file, std::filesystem::current_path());
  }
  if (!o.out.empty()) {
    apply_setting(config, "output_dir", o.out, std::filesystem::current_path());
  }
}

int execute(const RunConfig& config) {
  const RunSummary summary = run_experiment(config);
  for (const auto& run : summary.record["runs"]) {
    if (run.contains("F2")) {
      fmt::print("F2 = {:<6} Pi_h = {:.9g} Nm  stop = {}  serious steps = {}\n",
                 run["F2"].get<double>(), run["energy_Nm"].get<double>(),
                 run["stop_reason"].get<std::string>(), run["serious_steps"].get<int>());
    } else {
      fmt::print("{}: f = {:.9g}  stop = {}  serious steps = {}\n",
                 run["instance"].get<std::string>(), run["final_value"].get<double>(),
                 run["stop_reason"].get<std::string>(), run["serious_steps"].get<int>());
    }
    const std::string failure = run["failure"].get<std::string>();
    if (!failure.empty()) fmt::print(stderr, "solver failure: {}\n", failure);
  }
  fmt::print("artifacts written to {}\n", config.output_dir.string());
  return summary.exit_code == 0 ? kOk : kSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximity control bundle method and delamination benchmark"};
  app.require_subcommand(1);
  Overrides o;
  auto add_flags = [&](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--seed", o.seed, "Random seed recorded with the run");
    cmd->add_option("--f2", o.f2, "Comma separated load levels F2 [N/mm^2]");
    cmd->add_option("--params", o.params, "Overrides key=v,key=v (config file keys)");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Key-value config or JSON run record")->required();
  add_flags(run);

  auto* validate = app.add_subcommand("validate", "Check a config file without solving");
  validate->add_option("config", config_path, "Key-value config or JSON run record")->required();
  add_flags(validate);

  auto* corpus = app.add_subcommand("corpus", "Synthetic test instances");
  corpus->require_subcommand(1);
  corpus->add_option("--corpus", o.corpus_file, "Corpus fixtures file");
  auto* list = corpus->add_subcommand("list", "List the instances");
  std::string instance;
  auto* corpus_run = corpus->add_subcommand("run", "Solve one instance");
  corpus_run->add_option("id", instance, "Instance id")->required();
  add_flags(corpus_run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run || *validate) {
      RunConfig config = load_config(config_path);
      apply(config, o);
      if (*validate) {
        const auto issues = validate_config(config);
        for (const auto& issue : issues) fmt::print("error: {}\n", issue);
        if (!issues.empty()) return kConfigError;
        fmt::print("ok: {}\n", config_path);
        return kOk;
      }
      return execute(config);
    }

    RunConfig config = default_config();
    apply(config, o);
    if (*list) {
      for (const CorpusInstance& inst : load_corpus(config.corpus_file)) {
        fmt::print("{:<4} {:<6} n={}  {}\n", inst.id, inst.smoothness, inst.problem.dimension(),
                   inst.description);
      }
      return kOk;
    }
    config.problem = "corpus:" + instance;
    if (o.out.empty()) config.output_dir = std::filesystem::current_path() / "out" / instance;
    return execute(config);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const InfeasibleError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const Error& e) {
    fmt::print(stderr, "solver failure: {}\n", e.what());
    return kSolverFailure;
  }
}
