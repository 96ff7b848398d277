#include "proxbundle/experiment/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>

#include "proxbundle/fem/adhesive_law.hpp"
#include "proxbundle/piecewise.hpp"

#ifndef PROXBUNDLE_DATA_DIR
#define PROXBUNDLE_DATA_DIR "data"
#endif

namespace proxbundle::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
  }
  return v;
}

long parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", key, text));
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, text));
}

fs::path parse_path(const std::string& text, const fs::path& base) {
  fs::path p(text);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

// Items separated by commas, semicolons or blanks (';' lets a list sit inside --params).
std::vector<double> parse_list(const std::string& key, std::string text) {
  std::replace_if(
      text.begin(), text.end(),
      [](char ch) { return ch == ';' || std::isspace(static_cast<unsigned char>(ch)); }, ',');
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

std::string number(double v) { return fmt::format("{:.17g}", v); }

struct Setting {
  const char* key;
  std::function<void(RunConfig&, const std::string&, const fs::path&)> set;
  std::function<json(const RunConfig&)> get;
};

#define PB_DOUBLE(name, field)                                                      \
  Setting {                                                                         \
    name, [](RunConfig& c, const std::string& v, const fs::path&) {                 \
      c.field = parse_double(name, v);                                              \
    },                                                                              \
        [](const RunConfig& c) { return json(c.field); }                            \
  }
#define PB_INT(name, field, type)                                                   \
  Setting {                                                                         \
    name, [](RunConfig& c, const std::string& v, const fs::path&) {                 \
      c.field = static_cast<type>(parse_int(name, v));                              \
    },                                                                              \
        [](const RunConfig& c) { return json(c.field); }                            \
  }

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      {"problem", [](RunConfig& c, const std::string& v, const fs::path&) { c.problem = v; },
       [](const RunConfig& c) { return json(c.problem); }},
      {"corpus_file",
       [](RunConfig& c, const std::string& v, const fs::path& b) {
         c.corpus_file = parse_path(v, b);
       },
       [](const RunConfig& c) { return json(c.corpus_file.string()); }},
      {"law_file",
       [](RunConfig& c, const std::string& v, const fs::path& b) { c.law_file = parse_path(v, b); },
       [](const RunConfig& c) { return json(c.law_file.string()); }},
      {"f2", [](RunConfig& c, const std::string& v, const fs::path&) { c.f2 = parse_list("f2", v); },
       [](const RunConfig& c) { return json(c.f2); }},
      PB_DOUBLE("mesh.length", mesh.length),
      PB_DOUBLE("mesh.height", mesh.height),
      PB_INT("mesh.nx", mesh.nx, int),
      PB_INT("mesh.ny", mesh.ny, int),
      PB_DOUBLE("layout.clamp_fraction", mesh.layout.clamp_fraction),
      {"layout.clamp_right_edge",
       [](RunConfig& c, const std::string& v, const fs::path&) {
         c.mesh.layout.clamp_right_edge = parse_bool("layout.clamp_right_edge", v);
       },
       [](const RunConfig& c) { return json(c.mesh.layout.clamp_right_edge); }},
      PB_DOUBLE("material.young_modulus", material.young_modulus),
      PB_DOUBLE("material.poisson_ratio", material.poisson_ratio),
      PB_DOUBLE("material.thickness", material.thickness),
      PB_DOUBLE("driver.gamma", driver.gamma),
      PB_DOUBLE("driver.Gamma", driver.Gamma),
      PB_DOUBLE("driver.gamma_tilde", driver.gamma_tilde),
      PB_DOUBLE("driver.q", driver.q),
      PB_DOUBLE("driver.T", driver.T),
      PB_DOUBLE("driver.tol1", driver.tol1),
      PB_DOUBLE("driver.tol2", driver.tol2),
      PB_INT("driver.k_max", driver.k_max, int),
      PB_INT("driver.j_max", driver.j_max, int),
      PB_INT("driver.plane_budget", driver.plane_budget, std::size_t),
      PB_INT("driver.small_null_steps", driver.small_null_steps, int),
      PB_DOUBLE("driver.tau_overflow", driver.tau_overflow),
      {"oracle.variant",
       [](RunConfig& c, const std::string& v, const fs::path&) {
         c.oracle.variant = oracle_variant_from_string(v);
       },
       [](const RunConfig& c) { return json(to_string(c.oracle.variant)); }},
      PB_DOUBLE("oracle.downshift_coefficient", oracle.downshift_coefficient),
      {"output_dir",
       [](RunConfig& c, const std::string& v, const fs::path& b) {
         c.output_dir = parse_path(v, b);
       },
       [](const RunConfig& c) { return json(c.output_dir.string()); }},
      PB_INT("seed", seed, std::uint64_t),
  };
  return table;
}

#undef PB_DOUBLE
#undef PB_INT

}  // namespace

RunConfig default_config() {
  RunConfig c;
  const fs::path data(PROXBUNDLE_DATA_DIR);
  c.corpus_file = data / "corpus.json";
  c.law_file = data / "adhesive_law.json";
  // The reduced stiffness has eigenvalues up to ~1e6 N/mm; keep the exact
  // curvature unclipped.
  c.driver.q = 1e9;
  c.driver.T = 1e12;
  return c;
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value,
                   const fs::path& base) {
  for (const Setting& s : settings()) {
    if (key == s.key) {
      s.set(config, trim(value), base);
      return;
    }
  }
  throw ConfigError(fmt::format("unknown config key '{}'", key));
}

void apply_overrides(RunConfig& config, const std::string& overrides) {
  std::stringstream ss(overrides);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("override '{}' is not of the form key=value", item));
    }
    apply_setting(config, trim(item.substr(0, eq)), item.substr(eq + 1), fs::current_path());
  }
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  const fs::path base = fs::absolute(path).parent_path();

  if (path.extension() == ".json") {
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("config file '{}': {}", path.string(), e.what()));
    }
    return config_from_json(doc.contains("config") ? doc.at("config") : doc);
  }

  RunConfig config = default_config();
  config.output_dir = base / "out";
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected key = value", path.string(), line_no));
    }
    try {
      apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1), base);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return config;
}

json to_json(const RunConfig& config) {
  json j = json::object();
  for (const Setting& s : settings()) j[s.key] = s.get(config);
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config echo must be a JSON object");
  RunConfig config = default_config();
  for (const auto& [key, value] : j.items()) {
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_number_integer()) {
      text = std::to_string(value.get<long long>());
    } else if (value.is_number()) {
      text = number(value.get<double>());
    } else if (value.is_array()) {
      for (const auto& v : value) {
        if (!text.empty()) text += ",";
        text += number(v.get<double>());
      }
    } else {
      throw ConfigError(fmt::format("config key '{}' has an unsupported value", key));
    }
    apply_setting(config, key, text);
  }
  return config;
}

std::vector<std::string> validate_config(const RunConfig& config) {
  std::vector<std::string> issues;
  auto check = [&](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      issues.emplace_back(e.what());
    }
  };

  check([&] { config.driver.validate(); });
  if (config.oracle.downshift_coefficient < 0.0) {
    issues.emplace_back("oracle.downshift_coefficient must be positive (0 selects the default)");
  }

  if (config.is_corpus()) {
    check([&] {
      const auto corpus = load_corpus(config.corpus_file);
      const CorpusInstance& inst = find_instance(corpus, config.corpus_id());
      if (!inst.constraints().contains(inst.start)) {
        throw InfeasibleError(fmt::format("start point of {} lies outside its box", inst.id));
      }
    });
    return issues;
  }
  if (config.problem != "delamination") {
    issues.push_back(fmt::format("unknown problem '{}' (delamination or corpus:<id>)",
                                 config.problem));
    return issues;
  }

  if (config.f2.empty()) issues.emplace_back("f2 list is empty");
  check([&] { config.material.validate(); });
  check([&] {
    const fem::Mesh mesh = fem::build_mesh(config.mesh.length, config.mesh.height,
                                           config.mesh.nx, config.mesh.ny, config.mesh.layout);
    const auto expected_nodes = static_cast<std::size_t>((config.mesh.nx + 1) * (config.mesh.ny + 1));
    if (mesh.nodes.size() != expected_nodes ||
        mesh.triangles.size() != static_cast<std::size_t>(2 * config.mesh.nx * config.mesh.ny)) {
      throw StructuralError("mesh node or triangle count is inconsistent");
    }
    for (const auto& tri : mesh.triangles) {
      fem::strain_matrix(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
    }
  });
  // The zero start is feasible for v2 >= 0; the law is checked on load.
  check([&] { fem::AdhesiveLaw::load(config.law_file); });
  return issues;
}

}  // namespace proxbundle::experiment
