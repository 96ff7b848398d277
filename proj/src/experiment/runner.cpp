#include "proxbundle/experiment/runner.hpp"

#include <chrono>

#include <fmt/format.h>

#include "proxbundle/experiment/artifacts.hpp"

namespace proxbundle::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Runs the solver, keeping the outer iterations seen before any failure.
RunHistory guarded_solve(const BundleSolver& prototype, const Problem& problem,
                         const Polyhedron& constraints, const Vector& x1, std::string& failure) {
  BundleSolver solver(prototype.params(), prototype.oracle());
  std::vector<SeriousRecord> seen;
  solver.set_progress_callback([&](const SeriousRecord& r) { seen.push_back(r); });
  try {
    RunHistory h = solver.solve(problem, constraints, x1);
    failure = h.failure;
    return h;
  } catch (const Error& e) {
    failure = e.what();
    RunHistory h;
    h.iterations = std::move(seen);
    h.stop_reason = StopReason::kTauOverflow;
    h.failure = failure;
    if (!h.iterations.empty()) {
      h.final_point = h.iterations.back().point;
      h.final_value = h.iterations.back().value;
    } else {
      h.final_point = x1;
      h.final_value = problem.value(x1);
    }
    return h;
  }
}

json rows_json(const RunHistory& h) {
  json rows = json::array();
  for (const SeriousRecord& r : h.iterations) {
    rows.push_back({{"j", r.j},
                    {"f", r.value},
                    {"step_norm", r.step_norm},
                    {"inner_iterations", r.inner.size()},
                    {"tau_final", r.tau_final},
                    {"rho", r.rho},
                    {"accepted", r.accepted}});
  }
  return rows;
}

std::string stop_name(const RunHistory& h, const std::string& failure) {
  return failure.empty() ? to_string(h.stop_reason) : "failure";
}

PlotSpec convergence_plot(const RunHistory& h, const std::string& title) {
  Series s{"f(x^j)", {}, {}};
  for (const SeriousRecord& r : h.iterations) {
    s.x.push_back(r.j);
    s.y.push_back(r.value);
  }
  return {title, "serious iteration j", "f", {s}, true};
}

}  // namespace

fem::DelaminationModel build_delamination(const RunConfig& config, double F2) {
  fem::Mesh mesh = fem::build_mesh(config.mesh.length, config.mesh.height, config.mesh.nx,
                                   config.mesh.ny, config.mesh.layout);
  return fem::DelaminationModel(std::move(mesh), config.material,
                                fem::AdhesiveLaw::load(config.law_file), F2);
}

DelaminationOutcome solve_delamination(const fem::DelaminationModel& model,
                                       const RunConfig& config) {
  DelaminationOutcome out;
  out.F2 = model.F2();
  const auto start = std::chrono::steady_clock::now();
  const fem::DelaminationEnergy energy(model);
  const BundleSolver solver(config.driver, config.oracle);
  out.history = guarded_solve(solver, energy, model.contact_constraints(),
                              Vector::Zero(model.dimension()), out.failure);
  out.seconds = seconds_since(start);
  out.solution = out.history.final_point;
  out.energy = out.history.final_value;
  out.stationarity = fem::stationarity_residual(model, out.solution, kStationarityDelta);
  out.stationarity_tolerance = 1e-4 * (1.0 + model.load().norm());
  out.violation = fem::contact_violation(model, out.solution);
  const Index corner = model.dofs().reduced_of_full[2 * model.mesh().node(0, 0) + 1];
  out.tip_opening = corner >= 0 ? out.solution[corner] : 0.0;
  out.reactions = fem::recover_reaction(model, out.solution);
  return out;
}

CorpusOutcome solve_corpus(const CorpusInstance& instance, const DriverParams& driver,
                           const OracleConfig& oracle) {
  CorpusOutcome out;
  out.id = instance.id;
  const auto start = std::chrono::steady_clock::now();
  const BundleSolver solver(driver, oracle);
  out.history =
      guarded_solve(solver, instance.problem, instance.constraints(), instance.start, out.failure);
  out.seconds = seconds_since(start);
  return out;
}

RunSummary run_experiment(const RunConfig& config) {
  const auto issues = validate_config(config);
  if (!issues.empty()) throw ConfigError(issues.front());

  RunSummary summary;
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir = config.output_dir;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_text(dir / name, content);
    summary.files.push_back(dir / name);
  };
  summary.record["config"] = to_json(config);
  summary.record["runs"] = json::array();

  if (config.is_corpus()) {
    const auto corpus = load_corpus(config.corpus_file);
    const CorpusInstance& inst = find_instance(corpus, config.corpus_id());
    const CorpusOutcome out = solve_corpus(inst, config.driver, config.oracle);
    const std::string hist = fmt::format("history_{}.csv", inst.id);
    emit(hist, history_csv(out.history));
    emit(fmt::format("convergence_{}.svg", inst.id),
         render_svg(convergence_plot(out.history, fmt::format("Convergence on {}", inst.id))));
    json run = {{"instance", inst.id},
                {"stop_reason", stop_name(out.history, out.failure)},
                {"final_value", out.history.final_value},
                {"final_point", std::vector<double>(out.history.final_point.data(),
                                                    out.history.final_point.data() +
                                                        out.history.final_point.size())},
                {"oracle_value", inst.oracle_value},
                {"oracle_tolerance", inst.oracle_tolerance()},
                {"serious_steps", out.history.iterations.size()},
                {"evaluations", out.history.evaluations},
                {"wall_time_s", out.seconds},
                {"history_file", hist},
                {"failure", out.failure},
                {"rows", rows_json(out.history)}};
    summary.record["runs"].push_back(run);
    if (!out.failure.empty()) summary.exit_code = 3;
  } else {
    std::string table =
        "F2_N_per_mm2,F2_N_per_m2,Pi_h_Nmm,Pi_h_Nm,stop_reason,serious_steps,stationarity,"
        "tip_opening_mm\n";
    Series energy_curve{"Pi_h", {}, {}};
    for (double F2 : config.f2) {
      const fem::DelaminationModel model = build_delamination(config, F2);
      const DelaminationOutcome out = solve_delamination(model, config);
      const std::string tag = fmt::format("F2_{}", format_number(F2));
      const std::string hist = fmt::format("history_{}.csv", tag);
      const std::string sol = fmt::format("solution_{}.csv", tag);
      emit(hist, history_csv(out.history));
      emit(sol, solution_csv(model, out.solution, out.reactions));
      emit(fmt::format("convergence_{}.svg", tag),
           render_svg(convergence_plot(out.history,
                                       fmt::format("Energy by serious step, F2 = {}", F2))));
      Series opening{"u2", {}, {}}, traction{"residual", {}, {}}, law{"law", {}, {}};
      for (const fem::ReactionSample& s : out.reactions) {
        opening.x.push_back(s.x);
        opening.y.push_back(s.opening);
        traction.x.push_back(s.x);
        traction.y.push_back(s.residual_traction);
        law.x.push_back(s.x);
        law.y.push_back(s.law_traction);
      }
      emit(fmt::format("opening_{}.svg", tag),
           render_svg({fmt::format("Opening along the contact boundary, F2 = {}", F2),
                       "x [mm]", "u2 [mm]", {opening}, true}));
      emit(fmt::format("reaction_{}.svg", tag),
           render_svg({fmt::format("Normal reaction along the contact boundary, F2 = {}", F2),
                       "x [mm]", "-S_n [N/mm^2]", {traction, law}, true}));

      table += fmt::format("{},{},{},{},{},{},{},{}\n", format_number(F2),
                           format_number(F2 * 1e6), format_number(out.energy),
                           format_number(out.energy_Nm()), stop_name(out.history, out.failure),
                           out.history.iterations.size(), format_number(out.stationarity),
                           format_number(out.tip_opening));
      energy_curve.x.push_back(F2);
      energy_curve.y.push_back(out.energy_Nm());

      json run = {{"F2", F2},
                  {"stop_reason", stop_name(out.history, out.failure)},
                  {"energy_Nmm", out.energy},
                  {"energy_Nm", out.energy_Nm()},
                  {"serious_steps", out.history.iterations.size()},
                  {"evaluations", out.history.evaluations},
                  {"stationarity", out.stationarity},
                  {"stationarity_tolerance", out.stationarity_tolerance},
                  {"max_contact_violation", out.violation},
                  {"tip_opening_mm", out.tip_opening},
                  {"wall_time_s", out.seconds},
                  {"history_file", hist},
                  {"solution_file", sol},
                  {"failure", out.failure},
                  {"rows", rows_json(out.history)}};
      summary.record["runs"].push_back(run);
      if (!out.failure.empty()) summary.exit_code = 3;
    }
    emit("summary.csv", table);
    emit("energy.svg",
         render_svg({"Energy at the computed stationary points", "F2 [N/mm^2]", "Pi_h [Nm]",
                     {energy_curve}, true}));
  }

  summary.record["wall_time_s"] = seconds_since(start);
  emit("record.json", summary.record.dump(2) + "\n");
  return summary;
}

}  // namespace proxbundle::experiment
