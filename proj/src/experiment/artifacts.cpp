#include "proxbundle/experiment/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

namespace proxbundle::experiment {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // no "-0"
  return fmt::format("{:.9g}", v);
}

std::string history_csv(const RunHistory& history) {
  std::string out = "j,f,step_norm,inner_iterations,tau_final,rho,memory,accepted\n";
  for (const SeriousRecord& r : history.iterations) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.j, format_number(r.value),
                       format_number(r.step_norm), r.inner.size(), format_number(r.tau_final),
                       format_number(r.rho), format_number(r.memory), r.accepted ? 1 : 0);
  }
  return out;
}

std::string solution_csv(const fem::DelaminationModel& model, const Vector& v,
                         const std::vector<fem::ReactionSample>& reactions) {
  const Vector full = model.dofs().expand(v);
  const fem::Mesh& mesh = model.mesh();
  std::vector<double> reaction(mesh.nodes.size(), 0.0);
  std::vector<int> contact(mesh.nodes.size(), 0);
  for (const fem::ReactionSample& s : reactions) {
    reaction[s.node] = s.residual_traction;
    contact[s.node] = 1;
  }
  std::string out = "node,x,y,u1,u2,contact,reaction\n";
  for (Index n = 0; n < mesh.node_count(); ++n) {
    out += fmt::format("{},{},{},{},{},{},{}\n", n, format_number(mesh.nodes[n].x()),
                       format_number(mesh.nodes[n].y()), format_number(full[2 * n]),
                       format_number(full[2 * n + 1]), contact[n], format_number(reaction[n]));
  }
  return out;
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                   "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round step of roughly (hi - lo) / 5 from {1, 2, 5} x 10^k.
double tick_step(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0}) {
    if (f * mag >= raw) return f * mag;
  }
  return 10.0 * mag;
}

std::string coord(double v) { return fmt::format("{:.2f}", v); }

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Series& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  auto widen = [](double& lo, double& hi) {
    if (hi - lo <= 1e-12 * (1.0 + std::abs(lo) + std::abs(hi))) {
      const double pad = std::max(1e-12, 0.5 * std::abs(lo));
      lo -= pad;
      hi += pad;
    }
  };
  widen(xmin, xmax);
  widen(ymin, ymax);
  const double xs = tick_step(xmin, xmax), ys = tick_step(ymin, ymax);
  xmin = std::floor(xmin / xs) * xs;
  xmax = std::ceil(xmax / xs) * xs;
  ymin = std::floor(ymin / ys) * ys;
  ymax = std::ceil(ymax / ys) * ys;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  out += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     coord(kWidth / 2), escape(spec.title));

  // Grid and ticks.
  for (int i = 0; xmin + i * xs <= xmax + 1e-9 * xs; ++i) {
    const double x = xmin + i * xs;
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{0}\" y=\"{3}\" text-anchor=\"middle\">{4}</text>\n",
        coord(px(x)), coord(kTop), coord(kTop + ph), coord(kTop + ph + 16),
        fmt::format("{:.6g}", std::abs(x) < 1e-12 * xs ? 0.0 : x));
  }
  for (int i = 0; ymin + i * ys <= ymax + 1e-9 * ys; ++i) {
    const double y = ymin + i * ys;
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{3}\" y=\"{4}\" text-anchor=\"end\">{5}</text>\n",
        coord(kLeft), coord(py(y)), coord(kLeft + pw), coord(kLeft - 6), coord(py(y) + 4),
        fmt::format("{:.6g}", std::abs(y) < 1e-12 * ys ? 0.0 : y));
  }
  out += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
      coord(kLeft), coord(kTop), coord(pw), coord(ph));
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     coord(kLeft + pw / 2), coord(kHeight - 16), escape(spec.x_label));
  out += fmt::format(
      "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
      coord(kTop + ph / 2), escape(spec.y_label));

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const Series& s = spec.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!points.empty()) points += ' ';
      points += coord(px(s.x[i])) + "," + coord(py(s.y[i]));
    }
    out += fmt::format(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", points,
        color);
    if (spec.markers) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>\n",
                           coord(px(s.x[i])), coord(py(s.y[i])), color);
      }
    }
    if (!s.label.empty()) {
      const double ly = kTop + 14 + 16 * static_cast<double>(k);
      out += fmt::format(
          "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n"
          "<text x=\"{4}\" y=\"{5}\">{6}</text>\n",
          coord(kLeft + pw - 130), coord(ly), coord(kLeft + pw - 110), color,
          coord(kLeft + pw - 104), coord(ly + 4), escape(s.label));
    }
  }
  out += "</svg>\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw ConfigError(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace proxbundle::experiment
