#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxbundle/experiment/config.hpp"
#include "proxbundle/fem/delamination.hpp"
#include "proxbundle/piecewise.hpp"

namespace proxbundle::experiment {

/// Displacement tolerance (mm) for piece and constraint activity in the
/// stationarity measure.
inline constexpr double kStationarityDelta = 1e-8;

struct DelaminationOutcome {
  double F2 = 0.0;
  RunHistory history;
  Vector solution;             // reduced displacement
  double energy = 0.0;         // N mm
  double stationarity = 0.0;   // dist(0, dPi + N) in N
  double stationarity_tolerance = 0.0;  // 1e-4 (1 + |g|)
  double violation = 0.0;      // max(0, -v2) over contact nodes
  double tip_opening = 0.0;    // v2 at the bottom left corner
  std::vector<fem::ReactionSample> reactions;
  double seconds = 0.0;
  std::string failure;

  double energy_Nm() const { return 1e-3 * energy; }
};

fem::DelaminationModel build_delamination(const RunConfig& config, double F2);

/// Solves from the zero displacement. Solver failures are caught and reported
/// in `failure`, keeping the iterations recorded so far.
DelaminationOutcome solve_delamination(const fem::DelaminationModel& model,
                                       const RunConfig& config);

struct CorpusOutcome {
  std::string id;
  RunHistory history;
  double seconds = 0.0;
  std::string failure;
};

CorpusOutcome solve_corpus(const CorpusInstance& instance, const DriverParams& driver,
                           const OracleConfig& oracle);

struct RunSummary {
  int exit_code = 0;  // 0 success, 3 solver failure
  nlohmann::json record;
  std::vector<std::filesystem::path> files;
};

/// Runs every solve of the config and writes history/solution/summary CSVs,
/// SVG plots and record.json into config.output_dir.
RunSummary run_experiment(const RunConfig& config);

}  // namespace proxbundle::experiment
