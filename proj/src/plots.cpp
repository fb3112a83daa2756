#include "segconf/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "segconf/error.hpp"

namespace segconf {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string color_for(const std::string& method, std::size_t index) {
  if (method == "prethresh") return "#1f77b4";
  if (method == "mcdropout") return "#d62728";
  if (method == "tta") return "#2ca02c";
  return kPalette[index % std::size(kPalette)];
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Unit-square plot area with axes, ticks and labels.
class Canvas {
public:
  Canvas(const std::string& title, const std::string& x_label, const std::string& y_label,
         double y_max = 1.0)
      : y_max_(y_max) {
    const double w = kLeft + kWidth + kRight;
    const double h = kTop + kHeight + kBottom;
    body_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w) + "\" height=\"" +
             fmt(h) + "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) + "\">\n";
    body_ += "<rect x=\"0\" y=\"0\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
             "\" fill=\"white\"/>\n";
    body_ += "<text x=\"" + fmt(kLeft + kWidth / 2) + "\" y=\"20.00\" text-anchor=\"middle\" " +
             "font-family=\"sans-serif\" font-size=\"14\">" + escape(title) + "</text>\n";
    body_ += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(kWidth) +
             "\" height=\"" + fmt(kHeight) + "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 10; ++i) {
      const double t = i / 10.0;
      const double px = x(t);
      const double py = y(t * y_max_);
      body_ += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(kTop + kHeight) + "\" x2=\"" + fmt(px) +
               "\" y2=\"" + fmt(kTop + kHeight + 5) + "\" stroke=\"black\"/>\n";
      body_ += "<line x1=\"" + fmt(kLeft - 5) + "\" y1=\"" + fmt(py) + "\" x2=\"" + fmt(kLeft) +
               "\" y2=\"" + fmt(py) + "\" stroke=\"black\"/>\n";
      if (i % 2 == 0) {
        body_ += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(kTop + kHeight + 18) +
                 "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
                 fmt(t) + "</text>\n";
        body_ += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(py + 3) +
                 "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
                 fmt(t * y_max_) + "</text>\n";
      }
    }
    body_ += "<text x=\"" + fmt(kLeft + kWidth / 2) + "\" y=\"" + fmt(kTop + kHeight + 38) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
             escape(x_label) + "</text>\n";
    body_ += "<text x=\"15.00\" y=\"" + fmt(kTop + kHeight / 2) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" " +
             "transform=\"rotate(-90 15.00 " + fmt(kTop + kHeight / 2) + ")\">" + escape(y_label) +
             "</text>\n";
  }

  double x(double v) const { return kLeft + v * kWidth; }
  double y(double v) const { return kTop + kHeight - (v / y_max_) * kHeight; }

  void polyline(const std::vector<PlotPoint>& pts, const std::string& color,
                const std::string& extra = "") {
    if (pts.empty()) return;
    std::string coords;
    for (const auto& p : pts) {
      if (!coords.empty()) coords += ' ';
      coords += fmt(x(p.x)) + "," + fmt(y(p.y));
    }
    body_ += "<polyline points=\"" + coords + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"2\"" + extra + "/>\n";
    for (const auto& p : pts) {
      body_ += "<circle cx=\"" + fmt(x(p.x)) + "\" cy=\"" + fmt(y(p.y)) + "\" r=\"2.5\" fill=\"" +
               color + "\"/>\n";
    }
  }

  void reference_line(double x0, double y0, double x1, double y1, const std::string& label) {
    body_ += "<line x1=\"" + fmt(x(x0)) + "\" y1=\"" + fmt(y(y0)) + "\" x2=\"" + fmt(x(x1)) +
             "\" y2=\"" + fmt(y(y1)) + "\" stroke=\"#888888\" stroke-dasharray=\"6,4\"/>\n";
    legend(label, "#888888", true);
  }

  void rect(double x0, double y0, double x1, double y1, const std::string& color) {
    const double top = std::min(y(y0), y(y1));
    const double height = std::abs(y(y1) - y(y0));
    body_ += "<rect x=\"" + fmt(x(x0)) + "\" y=\"" + fmt(top) + "\" width=\"" +
             fmt(x(x1) - x(x0)) + "\" height=\"" + fmt(height) + "\" fill=\"" + color + "\"/>\n";
  }

  void legend(const std::string& label, const std::string& color, bool dashed = false) {
    const double lx = kLeft + kWidth + 15;
    const double ly = kTop + 15 + 20.0 * static_cast<double>(legend_rows_++);
    body_ += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(lx + 25) +
             "\" y2=\"" + fmt(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"" +
             (dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
    body_ += "<text x=\"" + fmt(lx + 32) + "\" y=\"" + fmt(ly + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(label) + "</text>\n";
  }

  std::string finish() { return body_ + "</svg>\n"; }

private:
  double y_max_;
  std::string body_;
  int legend_rows_ = 0;
};

void require_reports(std::span<const EvalReport> reports) {
  if (reports.empty()) throw ValidationError("plot: no reports given");
}

}  // namespace

std::vector<std::optional<PlotPoint>> calibration_points(const EvalReport& report) {
  std::vector<std::optional<PlotPoint>> out;
  for (const auto& b : report.calibration.bins) {
    if (b.fraction) {
      out.push_back(PlotPoint{(b.lower + b.upper) / 2.0, *b.fraction});
    } else {
      out.push_back(std::nullopt);
    }
  }
  return out;
}

std::string calibration_svg(std::span<const EvalReport> reports) {
  require_reports(reports);
  Canvas canvas("Calibration", "confidence", "fraction of positive pixels");
  canvas.reference_line(0.0, 0.0, 1.0, 1.0, "y = x");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto color = color_for(reports[i].method, i);
    std::vector<PlotPoint> run;
    for (const auto& p : calibration_points(reports[i])) {
      if (p) {
        run.push_back(*p);
      } else {
        canvas.polyline(run, color);
        run.clear();
      }
    }
    canvas.polyline(run, color);
    canvas.legend(reports[i].method, color);
  }
  return canvas.finish();
}

std::string roc_svg(std::span<const EvalReport> reports) {
  require_reports(reports);
  Canvas canvas("ROC (pooled)", "false positive rate", "true positive rate");
  canvas.reference_line(0.0, 0.0, 1.0, 1.0, "chance");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto color = color_for(reports[i].method, i);
    std::vector<PlotPoint> pts{{0.0, 0.0}};
    for (auto it = reports[i].roc.rbegin(); it != reports[i].roc.rend(); ++it) {
      pts.push_back({it->fpr, it->tpr});
    }
    pts.push_back({1.0, 1.0});
    canvas.polyline(pts, color);
    canvas.legend(reports[i].method + " (AUC " + fmt(reports[i].auc) + ")", color);
  }
  return canvas.finish();
}

std::string gains_svg(std::span<const EvalReport> reports) {
  require_reports(reports);
  double top = 0.05;
  for (const auto& r : reports) {
    for (const auto& g : r.gains) top = std::max(top, g.mean_gain);
  }
  const double y_max = std::ceil(top * 20.0) / 20.0;
  Canvas canvas("Average increase in IoU", "IoU at default threshold", "mean IoU gain", y_max);
  const double slot = 0.1 / static_cast<double>(reports.size() + 1);
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto color = color_for(reports[i].method, i);
    for (const auto& g : reports[i].gains) {
      const double x0 = g.lower + slot * (static_cast<double>(i) + 0.5);
      canvas.rect(x0, 0.0, x0 + slot, std::max(0.0, g.mean_gain), color);
    }
    canvas.legend(reports[i].method, color);
  }
  return canvas.finish();
}

}  // namespace segconf
