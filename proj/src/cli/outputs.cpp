#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "vrudder/cli.hpp"

namespace vrudder {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void Report::add(const std::string& key, double value) { entries_.emplace_back(key, format_number(value)); }
void Report::add(const std::string& key, long long value) { entries_.emplace_back(key, std::to_string(value)); }
void Report::add(const std::string& key, bool value) { entries_.emplace_back(key, value ? "true" : "false"); }
void Report::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

std::optional<std::string> Report::find(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string Report::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                       const std::vector<const std::vector<double>*>& columns) {
  if (header.size() != columns.size() || columns.empty()) throw std::invalid_argument("csv header/column mismatch");
  const std::size_t rows = columns.front()->size();
  for (const auto* c : columns) {
    if (c->size() != rows) throw std::invalid_argument("csv columns differ in length");
  }
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) out += (j ? "," : "") + header[j];
  out += "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) out += (j ? "," : "") + format_number((*columns[j])[i]);
    out += "\n";
  }
  write_text(path, out);
}

void write_trace_csv(const std::filesystem::path& path, const SimTrace& t) {
  write_columns_csv(path, {"t", "phi_deg", "p_dps", "beta_deg", "r_dps", "da_cmd_deg", "da_deg", "dT_cmd_lbf", "dT_lbf"},
                    {&t.time, &t.phi, &t.p, &t.beta, &t.r, &t.da_cmd, &t.da, &t.dT_cmd, &t.dT});
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1, 2, 5 steps.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& y_label,
                    const std::vector<double>& x, const std::vector<PlotSeries>& series,
                    const std::string& x_label) {
  if (x.empty() || series.empty()) throw std::invalid_argument("plot needs data");
  constexpr double W = 720, H = 420, L = 70, R = 150, T = 40, B = 50;
  const double x0 = x.front(), x1 = std::max(x.back(), x.front() + 1e-9);
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  for (const auto& s : series) {
    for (double v : *s.y) {
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
    }
  }
  if (!std::isfinite(y0)) y0 = -1, y1 = 1;
  if (y1 - y0 < 1e-12) y0 -= 1, y1 += 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";

  const double xs = nice_step(x1 - x0, 8), ys = nice_step(y1 - y0, 6);
  for (double v = std::ceil(x0 / xs) * xs; v <= x1 + 1e-9; v += xs) {
    o << "<line x1=\"" << px(v) << "\" y1=\"" << T << "\" x2=\"" << px(v) << "\" y2=\"" << H - B
      << "\" stroke=\"#ddd\"/>\n<text x=\"" << px(v) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
      << format_number(std::abs(v) < 1e-12 ? 0.0 : v) << "</text>\n";
  }
  for (double v = std::ceil(y0 / ys) * ys; v <= y1 + 1e-9; v += ys) {
    o << "<line x1=\"" << L << "\" y1=\"" << py(v) << "\" x2=\"" << W - R << "\" y2=\"" << py(v)
      << "\" stroke=\"#ddd\"/>\n<text x=\"" << L - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
      << format_number(std::abs(v) < 1e-9 * ys ? 0.0 : v) << "</text>\n";
  }
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& y = *series[k].y;
    const char* color = colors[k % std::size(colors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    // Thin long traces to about 2000 points.
    const std::size_t stride = std::max<std::size_t>(1, y.size() / 2000);
    for (std::size_t i = 0; i < y.size() && i < x.size(); i += stride) {
      if (!std::isfinite(y[i])) continue;
      char pt[64];
      std::snprintf(pt, sizeof pt, "%.2f,%.2f ", px(x[i]), py(std::clamp(y[i], y0, y1)));
      o << pt;
    }
    o << "\"/>\n";
    const double ly = T + 16 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly - 4
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n<text x=\"" << W - R + 36 << "\" y=\"" << ly << "\">"
      << escape(series[k].name) << "</text>\n";
  }
  o << "</svg>\n";
  write_text(path, o.str());
}

}  // namespace vrudder
