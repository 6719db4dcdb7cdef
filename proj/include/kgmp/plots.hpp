#pragma once
// SVG figures from an artifact directory: landscape heatmaps, distance-vs-ε, solution cross-sections.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgmp/artifacts.hpp"

namespace kgmp {

struct PlotReport {
  std::vector<std::string> written;
  std::vector<std::string> skipped;  ///< plot kinds whose input artifact was absent or unreadable
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// Blue (low) to red (high); a flat field maps to the middle colour.
inline std::string heat_colour(double v, double lo, double hi) {
  const double t = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.5;
  const int r = static_cast<int>(std::lround(255 * t)), b = static_cast<int>(std::lround(255 * (1 - t)));
  const int g = static_cast<int>(std::lround(255 * (1 - std::fabs(2 * t - 1)) * 0.8));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

class Svg {
 public:
  Svg(int w, int h) : w_(w), h_(h) {}
  void rect(double x, double y, double w, double h, const std::string& fill) {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
          << "\" fill=\"" << fill << "\"/>\n";
  }
  void text(double x, double y, const std::string& s, int size = 12) {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size
          << "\" font-family=\"sans-serif\">" << s << "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, bool dashed = false) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\""
          << (dashed ? " stroke-dasharray=\"4 3\"" : "") << " points=\"";
    for (const auto& [x, y] : pts) body_ << num(x) << ',' << num(y) << ' ';
    body_ << "\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& fill) {
    body_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r) << "\" fill=\"" << fill
          << "\"/>\n";
  }
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_ << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
  }

 private:
  int w_, h_;
  std::ostringstream body_;
};

/// Axis-aligned frame mapping data coordinates into a pixel box.
struct Frame {
  double x0, y0, w, h, xmin, xmax, ymin, ymax;
  double px(double x) const { return x0 + (xmax > xmin ? (x - xmin) / (xmax - xmin) : 0.5) * w; }
  double py(double y) const { return y0 + h - (ymax > ymin ? (y - ymin) / (ymax - ymin) : 0.5) * h; }
};

inline void heatmap(Svg& svg, const CsvTable& t, int col, double x0, double y0, double size, const std::string& title) {
  const int c1 = t.column("xi1"), c2 = t.column("xi2");
  std::vector<double> xs, ys;
  double lo = 1e300, hi = -1e300;
  for (const auto& r : t.rows) {
    xs.push_back(r[c1]);
    ys.push_back(r[c2]);
    lo = std::min(lo, r[col]);
    hi = std::max(hi, r[col]);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  const double cw = size / std::max<std::size_t>(1, xs.size()), ch = size / std::max<std::size_t>(1, ys.size());
  for (const auto& r : t.rows) {
    const auto i = std::lower_bound(xs.begin(), xs.end(), r[c1]) - xs.begin();
    const auto j = std::lower_bound(ys.begin(), ys.end(), r[c2]) - ys.begin();
    svg.rect(x0 + i * cw, y0 + size - (j + 1) * ch, cw, ch, heat_colour(r[col], lo, hi));
  }
  svg.text(x0, y0 - 8, title + " [" + num(lo) + ", " + num(hi) + "]");
}

inline std::vector<std::filesystem::path> files_matching(const std::filesystem::path& dir, const std::string& prefix,
                                                         const std::string& suffix) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind(prefix, 0) == 0 && name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string stem_of(const std::filesystem::path& p) { return p.stem().string(); }

}  // namespace detail

inline PlotReport emit_plots(const std::filesystem::path& dir) {
  PlotReport rep;
  if (!std::filesystem::is_directory(dir)) {
    rep.warnings.push_back("artifact directory " + dir.string() + " does not exist");
    return rep;
  }
  using detail::Frame;
  using detail::num;
  using detail::Svg;

  const auto landscapes = detail::files_matching(dir, "landscape_eps_", ".csv");
  if (landscapes.empty()) rep.skipped.push_back("landscape heatmap (no landscape_eps_*.csv)");
  for (const auto& path : landscapes) {
    try {
      const CsvTable t = read_csv(path);
      const int cg = t.column("Gamma"), ci = t.column("I_tilde");
      if (cg < 0 || ci < 0 || t.column("xi1") < 0 || t.column("xi2") < 0 || t.rows.empty())
        throw ConfigError("missing columns");
      Svg svg(660, 360);
      detail::heatmap(svg, t, cg, 20, 40, 300, "Gamma");
      detail::heatmap(svg, t, ci, 340, 40, 300, "I_tilde");
      const auto out = dir / (detail::stem_of(path) + ".svg");
      svg.save(out);
      rep.written.push_back(out.string());
    } catch (const std::exception& e) {
      rep.skipped.push_back(path.string() + ": " + e.what());
    }
  }

  const auto cont = dir / "continuation.json";
  if (!std::filesystem::exists(cont)) {
    rep.skipped.push_back("distance plot (no continuation.json)");
  } else {
    try {
      std::ifstream in(cont);
      const auto j = nlohmann::json::parse(in);
      std::vector<std::pair<double, double>> pts, ref;
      for (const auto& st : j.at("results").at("stages")) {
        if (st.value("failed", false)) continue;
        const double e = st.at("epsilon").get<double>();
        pts.push_back({std::log10(e), std::log10(std::max(st.at("distance").get<double>(), 1e-16))});
        ref.push_back({std::log10(e), std::log10(2 * e)});
      }
      if (pts.empty()) throw ConfigError("no completed stages");
      Frame f{60, 30, 420, 260, 1e300, -1e300, 1e300, -1e300};
      for (const auto* set : {&pts, &ref})
        for (const auto& [x, y] : *set) {
          f.xmin = std::min(f.xmin, x);
          f.xmax = std::max(f.xmax, x);
          f.ymin = std::min(f.ymin, y);
          f.ymax = std::max(f.ymax, y);
        }
      Svg svg(520, 340);
      std::vector<std::pair<double, double>> a, b;
      for (const auto& [x, y] : pts) a.push_back({f.px(x), f.py(y)});
      for (const auto& [x, y] : ref) b.push_back({f.px(x), f.py(y)});
      svg.polyline(a, "#1f5fbf");
      for (const auto& [x, y] : a) svg.circle(x, y, 3, "#1f5fbf");
      svg.polyline(b, "#888888", true);
      svg.text(60, 20, "log10 distance vs log10 epsilon (dashed: 2 epsilon)");
      svg.text(60, 320, "log10 eps in [" + num(f.xmin) + ", " + num(f.xmax) + "], log10 d in [" + num(f.ymin) +
                            ", " + num(f.ymax) + "]");
      const auto out = dir / "continuation_distance.svg";
      svg.save(out);
      rep.written.push_back(out.string());
    } catch (const std::exception& e) {
      rep.skipped.push_back(cont.string() + ": " + e.what());
    }
  }

  const auto fields = detail::files_matching(dir, "field_eps_", ".csv");
  if (fields.empty()) rep.skipped.push_back("cross-section (no field_eps_*.csv)");
  for (const auto& path : fields) {
    try {
      const CsvTable t = read_csv(path);
      const int cx = t.column("x"), cy = t.column("y"), cu = t.column("u"), cp = t.column("psi");
      if (cx < 0 || cy < 0 || cu < 0 || cp < 0 || t.rows.empty()) throw ConfigError("missing columns");
      std::size_t kmax = 0;
      for (std::size_t k = 0; k < t.rows.size(); ++k)
        if (t.rows[k][cu] > t.rows[kmax][cu]) kmax = k;
      const double yrow = t.rows[kmax][cy];
      std::vector<std::pair<double, double>> su, sp;
      for (const auto& r : t.rows)
        if (r[cy] == yrow) {
          su.push_back({r[cx], r[cu]});
          sp.push_back({r[cx], r[cp]});
        }
      std::sort(su.begin(), su.end());
      std::sort(sp.begin(), sp.end());
      Frame f{60, 30, 420, 260, su.front().first, su.back().first, 0.0, 0.0};
      for (const auto* set : {&su, &sp})
        for (const auto& [x, y] : *set) {
          f.ymin = std::min(f.ymin, y);
          f.ymax = std::max(f.ymax, y);
        }
      Svg svg(520, 340);
      std::vector<std::pair<double, double>> a, b;
      for (const auto& [x, y] : su) a.push_back({f.px(x), f.py(y)});
      for (const auto& [x, y] : sp) b.push_back({f.px(x), f.py(y)});
      svg.polyline(a, "#c0392b");
      svg.polyline(b, "#27ae60", true);
      svg.text(60, 20, "u (solid) and psi (dashed) along y = " + num(yrow));
      svg.text(60, 320, "x in [" + num(f.xmin) + ", " + num(f.xmax) + "], value in [" + num(f.ymin) + ", " +
                            num(f.ymax) + "]");
      const auto out = dir / (detail::stem_of(path) + "_section.svg");
      svg.save(out);
      rep.written.push_back(out.string());
    } catch (const std::exception& e) {
      rep.skipped.push_back(path.string() + ": " + e.what());
    }
  }
  if (rep.written.empty()) rep.warnings.push_back("no plottable artifacts in " + dir.string());
  return rep;
}

}  // namespace kgmp
