#include "xrouter/metricspipe/charts.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "xrouter/common/error.h"
#include "xrouter/metricspipe/metrics.h"

namespace xrouter::metricspipe {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

double nice_max(double v) {
  if (v <= 0) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (v <= m * p) return m * p;
  }
  return 10 * p;
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<ChartSeries>& series) {
  const double W = 720, H = 440, L = 70, R = 170, T = 40, B = 55;
  const double pw = W - L - R, ph = H - T - B;
  double xmin = 0, xmax = 0, ymax = 0;
  bool any = false;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!any) xmin = xmax = s.x[i];
      any = true;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymax = std::max(ymax, i < s.hi.size() ? s.hi[i] : s.y[i]);
    }
    ymax = std::max(ymax, s.mean_line);
  }
  if (xmax == xmin) {
    xmin -= 1;
    xmax += 1;
  }
  ymax = nice_max(ymax);
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return T + ph - y / ymax * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<title>" << esc(title) << "</title>\n<desc>series,x,y,lo,hi\n";
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size(); ++i) {
      o << esc(s.name) << ',' << s.x[i] << ',' << s.y[i] << ','
        << (i < s.lo.size() ? num(s.lo[i]) : "") << ',' << (i < s.hi.size() ? num(s.hi[i]) : "")
        << '\n';
    }
  }
  o << "</desc>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(title)
    << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double yv = ymax * i / 5.0;
    o << "<line x1=\"" << L << "\" x2=\"" << L + pw << "\" y1=\"" << py(yv) << "\" y2=\""
      << py(yv) << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << num(yv)
      << "</text>\n";
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    o << "<text x=\"" << px(xv) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">"
      << num(xv) << "</text>\n";
  }
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#333\"/>\n";
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << esc(x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << esc(y_label) << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    if (!s.x.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (size_t i = 0; i < s.x.size(); ++i) o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      o << "\"/>\n";
    }
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (i < s.lo.size() && i < s.hi.size()) {
        o << "<line x1=\"" << px(s.x[i]) << "\" x2=\"" << px(s.x[i]) << "\" y1=\"" << py(s.lo[i])
          << "\" y2=\"" << py(s.hi[i]) << "\" stroke=\"" << color << "\" opacity=\"0.6\"/>\n";
      }
      o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\""
        << color << "\"/>\n";
    }
    if (s.mean_line >= 0) {
      o << "<line x1=\"" << L << "\" x2=\"" << L + pw << "\" y1=\"" << py(s.mean_line)
        << "\" y2=\"" << py(s.mean_line) << "\" stroke=\"" << color
        << "\" stroke-dasharray=\"6 4\"/>\n";
      o << "<text x=\"" << L + pw + 4 << "\" y=\"" << py(s.mean_line) + 4 << "\" fill=\"" << color
        << "\">&#8592; mean " << num(s.mean_line) << "</text>\n";
    }
    const double ly = T + 14 + 18 * static_cast<double>(si);
    o << "<rect x=\"" << L + pw + 10 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
      << color << "\"/>\n<text x=\"" << L + pw + 26 << "\" y=\"" << ly << "\">" << esc(s.name)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string heatmap_chart(const std::string& title, const std::vector<std::string>& rows,
                          const std::vector<std::string>& cols,
                          const std::vector<std::vector<double>>& values,
                          const std::vector<std::vector<std::string>>& labels) {
  const double cw = 110, ch = 26, L = 190, T = 60;
  const double W = L + cw * static_cast<double>(cols.size()) + 20;
  const double H = T + ch * static_cast<double>(rows.size()) + 30;
  double lo = 0, hi = 0;
  bool any = false;
  for (const auto& r : values) {
    for (double v : r) {
      if (!any) lo = hi = v;
      any = true;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<title>" << esc(title) << "</title>\n<desc>row,col,value\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < cols.size(); ++j) {
      o << esc(rows[i]) << ',' << esc(cols[j]) << ',' << values[i][j] << '\n';
    }
  }
  o << "</desc>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title)
    << "</text>\n";
  for (size_t j = 0; j < cols.size(); ++j) {
    o << "<text x=\"" << L + cw * (static_cast<double>(j) + 0.5) << "\" y=\"" << T - 8
      << "\" text-anchor=\"middle\">" << esc(cols[j]) << "</text>\n";
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    const double y = T + ch * static_cast<double>(i);
    o << "<text x=\"" << L - 6 << "\" y=\"" << y + ch / 2 + 4 << "\" text-anchor=\"end\">"
      << esc(rows[i]) << "</text>\n";
    for (size_t j = 0; j < cols.size(); ++j) {
      const double f = hi > lo ? (values[i][j] - lo) / (hi - lo) : 0.0;
      const int r = static_cast<int>(255 - 40 * f), g = static_cast<int>(245 - 170 * f),
                b = static_cast<int>(230 - 200 * f);
      o << "<rect x=\"" << L + cw * static_cast<double>(j) << "\" y=\"" << y << "\" width=\"" << cw
        << "\" height=\"" << ch << "\" fill=\"rgb(" << r << ',' << g << ',' << b
        << ")\" stroke=\"white\"/>\n";
      o << "<text x=\"" << L + cw * (static_cast<double>(j) + 0.5) << "\" y=\"" << y + ch / 2 + 4
        << "\" text-anchor=\"middle\">" << esc(labels[i][j]) << "</text>\n";
    }
  }
  o << "</svg>\n";
  return o.str();
}

void write_charts(const std::vector<RunSummary>& runs, const std::string& out_dir) {
  namespace fs = std::filesystem;
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + name);
    out << body;
  };

  std::map<std::string, std::vector<const RunSummary*>> by_scenario;
  for (const auto& r : runs) by_scenario[r.scenario].push_back(&r);
  for (auto& [_, list] : by_scenario) {
    std::stable_sort(list.begin(), list.end(),
                     [](auto* a, auto* b) { return a->concurrency < b->concurrency; });
  }

  auto per_level = [&](auto value, bool whiskers, const std::string& title, const std::string& y) {
    std::vector<ChartSeries> series;
    for (const auto& [name, list] : by_scenario) {
      ChartSeries s;
      s.name = name.empty() ? "run" : name;
      for (const auto* r : list) {
        const auto [mid, lo, hi] = value(*r);
        s.x.push_back(r->concurrency);
        s.y.push_back(mid);
        if (whiskers) {
          s.lo.push_back(lo);
          s.hi.push_back(hi);
        }
      }
      series.push_back(std::move(s));
    }
    return line_chart(title, "concurrent users", y, series);
  };
  using T3 = std::tuple<double, double, double>;
  write("ttft.svg", per_level([](const RunSummary& r) { return T3{r.ttft.median, r.ttft.min, r.ttft.max}; },
                              true, "Time to first token (median, min-max)", "seconds"));
  write("tpot.svg", per_level([](const RunSummary& r) { return T3{r.tpot.median, r.tpot.min, r.tpot.max}; },
                              true, "Time per output token (median, min-max)", "seconds"));
  write("user_throughput.svg",
        per_level([](const RunSummary& r) {
          const auto& u = r.user_throughput;
          return T3{u.mean, std::max(0.0, u.mean - u.std), u.mean + u.std};
        }, true, "User throughput (mean +/- std)", "tokens/s"));
  write("p99_response.svg",
        per_level([](const RunSummary& r) { return T3{r.p99_response_s, 0, 0}; }, false,
                  "p99 response time", "seconds"));

  for (const auto& [name, list] : by_scenario) {
    std::vector<ChartSeries> series;
    for (const auto* r : list) {
      ChartSeries s;
      s.name = "N=" + std::to_string(r->concurrency);
      const auto& st = r->system_throughput;
      for (size_t i = 0; i < st.series.size(); ++i) {
        s.x.push_back(st.window_s * (static_cast<double>(i) + 0.5));
        s.y.push_back(st.series[i]);
      }
      s.mean_line = st.mean;
      series.push_back(std::move(s));
    }
    std::string file = name.empty() ? "run" : name;
    for (auto& c : file) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    write("throughput_" + file + ".svg",
          line_chart("System throughput over time (" + (name.empty() ? "run" : name) + ")",
                     "time since first request (s)", "tokens/s", series));
  }
}

}  // namespace xrouter::metricspipe
