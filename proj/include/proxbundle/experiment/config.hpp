#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxbundle/bundle.hpp"
#include "proxbundle/fem/elasticity.hpp"
#include "proxbundle/fem/mesh.hpp"

namespace proxbundle::experiment {

struct MeshConfig {
  double length = 100.0;
  double height = 10.0;
  int nx = 40;
  int ny = 4;
  fem::BoundaryLayout layout;
};

/// Everything a run needs. Paths are absolute after loading.
struct RunConfig {
  std::string problem = "delamination";  // "delamination" or "corpus:<id>"
  std::filesystem::path corpus_file;
  std::filesystem::path law_file;
  std::vector<double> f2 = {0.2, 0.4, 0.6, 0.8, 1.0};
  MeshConfig mesh;
  fem::ElasticityParams material;
  DriverParams driver;
  OracleConfig oracle;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;

  bool is_corpus() const { return problem.rfind("corpus:", 0) == 0; }
  std::string corpus_id() const { return is_corpus() ? problem.substr(7) : std::string(); }
};

/// Defaults, with fixture paths pointing into the installed data directory.
RunConfig default_config();

/// Sets one `key = value` entry (keys as in the config file). Relative paths
/// are resolved against `base`. Throws ConfigError on unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const std::filesystem::path& base = {});

/// Applies "k=v,k=v" overrides (the --params flag).
void apply_overrides(RunConfig& config, const std::string& overrides);

/// Reads a key-value config file ('#' starts a comment) or, for a .json file,
/// the "config" object of a run record.
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

/// One line per problem found; empty when the config is usable.
std::vector<std::string> validate_config(const RunConfig& config);

}  // namespace proxbundle::experiment
