#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "proxbundle/bundle.hpp"
#include "proxbundle/fem/delamination.hpp"

namespace proxbundle::experiment {

/// Nine significant digits, the format of every number in the CSV files.
std::string format_number(double v);

/// One row per outer iteration:
/// j,f,step_norm,inner_iterations,tau_final,rho,memory,accepted
std::string history_csv(const RunHistory& history);

/// One row per mesh node: node,x,y,u1,u2,contact,reaction.
/// `reaction` is the residual traction at contact nodes and 0 elsewhere.
std::string solution_csv(const fem::DelaminationModel& model, const Vector& v,
                         const std::vector<fem::ReactionSample>& reactions);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool markers = true;
};

/// Static line plot with axes, ticks and a legend.
std::string render_svg(const PlotSpec& spec);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace proxbundle::experiment
