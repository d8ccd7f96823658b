#include "xrouter/metricspipe/metrics.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "xrouter/common/error.h"
#include "xrouter/metricspipe/charts.h"

namespace xrouter::metricspipe {

namespace fs = std::filesystem;

double ttft(const SessionRecord& r) {
  if (r.stamps.empty()) throw Error(ErrorCode::kNoTokens, r.request_id + ": no tokens");
  return static_cast<double>(r.stamps.front() - r.t_send_ns) / 1e9;
}

double tpot(const SessionRecord& r) {
  if (r.stamps.size() < 2) throw Error(ErrorCode::kTooFewTokens, r.request_id + ": < 2 tokens");
  return static_cast<double>(r.stamps.back() - r.stamps.front()) /
         static_cast<double>(r.stamps.size() - 1) / 1e9;
}

double user_throughput(const SessionRecord& r) {
  if (r.t_end_ns <= r.t_send_ns) {
    throw Error(ErrorCode::kZeroDuration, r.request_id + ": zero duration");
  }
  return static_cast<double>(r.stamps.size()) / (static_cast<double>(r.t_end_ns - r.t_send_ns) / 1e9);
}

double response_time(const SessionRecord& r) {
  return static_cast<double>(r.t_end_ns - r.t_send_ns) / 1e9;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "percentile of no values");
  if (!(p > 0.0 && p <= 100.0)) throw Error(ErrorCode::kInvalidArgument, "p must be in (0, 100]");
  std::sort(values.begin(), values.end());
  // p * n / 100 keeps integer-valued products exact (0.99 * 100 would not be).
  const double rank = std::ceil(p * static_cast<double>(values.size()) / 100.0);
  const size_t idx = static_cast<size_t>(std::max(rank, 1.0)) - 1;
  return values[std::min(idx, values.size() - 1)];
}

Quantiles quantiles(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "quantiles of no values");
  std::sort(values.begin(), values.end());
  Quantiles q;
  q.min = values.front();
  q.max = values.back();
  q.p25 = percentile(values, 25);
  q.median = percentile(values, 50);
  q.p75 = percentile(values, 75);
  return q;
}

MeanStd mean_std(std::vector<double> values) {
  MeanStd m;
  if (values.empty()) return m;
  // Summing in sorted order makes the result independent of session order.
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - m.mean) * (v - m.mean);
  m.std = std::sqrt(sq / static_cast<double>(values.size()));
  return m;
}

WindowSeries windowed_throughput(const TokenEventLog& log, double window_s) {
  if (!(window_s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "window must be > 0");
  if (log.records.empty()) throw Error(ErrorCode::kEmptyLog, "empty log");
  int64_t first = std::numeric_limits<int64_t>::max();
  int64_t last = std::numeric_limits<int64_t>::min();
  for (const auto& r : log.records) {
    first = std::min(first, r.t_send_ns);
    if (!r.stamps.empty()) last = std::max(last, r.stamps.back());
  }
  WindowSeries w;
  w.window_s = window_s;
  w.origin_ns = first;
  const int64_t window_ns = std::llround(window_s * 1e9);
  const int64_t span = std::max<int64_t>(0, last - first);
  const int64_t k = std::max<int64_t>(1, (span + window_ns - 1) / window_ns);
  w.counts.assign(static_cast<size_t>(k), 0);
  for (const auto& r : log.records) {
    for (int64_t t : r.stamps) {
      const int64_t idx = std::clamp<int64_t>((t - first) / window_ns, 0, k - 1);
      ++w.counts[static_cast<size_t>(idx)];
    }
  }
  double total = 0.0;
  w.series.reserve(w.counts.size());
  for (int64_t c : w.counts) {
    w.series.push_back(static_cast<double>(c) / window_s);
    total += w.series.back();
  }
  w.mean = total / static_cast<double>(k);
  return w;
}

RunSummary summarize_log(const TokenEventLog& log, double window_s) {
  RunSummary s;
  s.scenario = log.scenario;
  s.concurrency = log.concurrency;
  s.sessions = static_cast<int64_t>(log.records.size());
  std::vector<double> ttfts, tpots, tputs, responses;
  for (const auto& r : log.records) {
    if (!r.ok()) {
      ++s.errors;
      continue;
    }
    responses.push_back(response_time(r));
    if (!r.stamps.empty()) ttfts.push_back(ttft(r));
    if (r.stamps.size() >= 2) tpots.push_back(tpot(r));
    if (r.t_end_ns > r.t_send_ns) tputs.push_back(user_throughput(r));
  }
  if (!ttfts.empty()) s.ttft = quantiles(ttfts);
  if (!tpots.empty()) s.tpot = quantiles(tpots);
  s.user_throughput = mean_std(tputs);
  if (!responses.empty()) s.p99_response_s = percentile(responses, 99);
  s.system_throughput = windowed_throughput(log, window_s);
  return s;
}

namespace {

nlohmann::ordered_json quantiles_json(const Quantiles& q) {
  nlohmann::ordered_json j;
  j["min"] = q.min;
  j["p25"] = q.p25;
  j["median"] = q.median;
  j["p75"] = q.p75;
  j["max"] = q.max;
  return j;
}

}  // namespace

std::string summary_json(const std::vector<RunSummary>& runs) {
  nlohmann::ordered_json root;
  auto& arr = root["runs"];
  arr = nlohmann::ordered_json::array();
  for (const auto& r : runs) {
    nlohmann::ordered_json j;
    j["run"] = fs::path(r.run_dir).filename().string();
    j["concurrency"] = r.concurrency;
    j["scenario"] = r.scenario;
    j["sessions"] = r.sessions;
    j["errors"] = r.errors;
    j["ttft"] = quantiles_json(r.ttft);
    j["tpot"] = quantiles_json(r.tpot);
    j["user_throughput"] = {{"mean", r.user_throughput.mean}, {"std", r.user_throughput.std}};
    j["p99_response_s"] = r.p99_response_s;
    nlohmann::ordered_json st;
    st["window_s"] = r.system_throughput.window_s;
    st["series"] = r.system_throughput.series;
    st["mean"] = r.system_throughput.mean;
    j["system_throughput"] = st;
    arr.push_back(j);
  }
  return root.dump(2) + "\n";
}

std::string summary_csv(const std::vector<RunSummary>& runs) {
  std::ostringstream out;
  out.precision(17);
  out << "concurrency,scenario,sessions,errors,ttft_min,ttft_p25,ttft_median,ttft_p75,ttft_max,"
         "tpot_min,tpot_p25,tpot_median,tpot_p75,tpot_max,user_tput_mean,user_tput_std,"
         "p99_response_s,sys_tput_mean,sys_tput_peak,window_s\n";
  for (const auto& r : runs) {
    const auto& st = r.system_throughput.series;
    const double peak = st.empty() ? 0.0 : *std::max_element(st.begin(), st.end());
    out << r.concurrency << ',' << r.scenario << ',' << r.sessions << ',' << r.errors << ','
        << r.ttft.min << ',' << r.ttft.p25 << ',' << r.ttft.median << ',' << r.ttft.p75 << ','
        << r.ttft.max << ',' << r.tpot.min << ',' << r.tpot.p25 << ',' << r.tpot.median << ','
        << r.tpot.p75 << ',' << r.tpot.max << ',' << r.user_throughput.mean << ','
        << r.user_throughput.std << ',' << r.p99_response_s << ',' << r.system_throughput.mean
        << ',' << peak << ',' << r.system_throughput.window_s << '\n';
  }
  return out.str();
}

SummaryReport summarize(const std::vector<std::string>& run_dirs, double window_s,
                        const std::string& out_dir) {
  SummaryReport report;
  for (const auto& dir : run_dirs) {
    try {
      auto s = summarize_log(loadgen::read_run(dir), window_s);
      s.run_dir = dir;
      report.runs.push_back(std::move(s));
    } catch (const Error& e) {
      report.skipped.push_back(dir + ": " + e.what());
    }
  }
  if (report.runs.empty()) throw Error(ErrorCode::kEmptyInput, "no readable runs to summarize");
  if (out_dir.empty()) return report;

  fs::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + name);
    out << body;
  };
  write("summary.json", summary_json(report.runs));
  write("summary.csv", summary_csv(report.runs));
  write_charts(report.runs, out_dir);
  return report;
}

}  // namespace xrouter::metricspipe
