#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xrouter/loadgen/event_log.h"

namespace xrouter::metricspipe {

using loadgen::SessionRecord;
using loadgen::TokenEventLog;

/// Seconds from send to the first token. Throws Error(kNoTokens).
double ttft(const SessionRecord& r);
/// Mean gap between consecutive tokens, seconds. Throws Error(kTooFewTokens).
double tpot(const SessionRecord& r);
/// Tokens per second over [send, end]. Throws Error(kZeroDuration).
double user_throughput(const SessionRecord& r);
/// Seconds from send to end.
double response_time(const SessionRecord& r);

/// Nearest-rank percentile: the element at index ceil(p/100 * n) - 1 of the
/// sorted values. Throws Error(kEmptyInput), or kInvalidArgument unless 0 < p <= 100.
double percentile(std::vector<double> values, double p);

struct Quantiles {
  double min = 0, p25 = 0, median = 0, p75 = 0, max = 0;
};
/// Throws Error(kEmptyInput).
Quantiles quantiles(std::vector<double> values);

struct MeanStd {
  double mean = 0, std = 0;  // population standard deviation
};
MeanStd mean_std(std::vector<double> values);

struct WindowSeries {
  double window_s = 2.0;
  int64_t origin_ns = 0;          // first send in the log
  std::vector<int64_t> counts;    // tokens per window
  std::vector<double> series;     // tokens per second per window
  double mean = 0.0;
};

/// Counts every token of every session into fixed windows starting at the
/// first send; K = ceil(span / window) with span = last token - first send
/// (at least one window; a token exactly at the end of the span falls in the
/// last window). Throws Error(kEmptyLog).
WindowSeries windowed_throughput(const TokenEventLog& log, double window_s = 2.0);

struct RunSummary {
  std::string run_dir;
  std::string scenario;
  int concurrency = 0;
  int64_t sessions = 0;
  int64_t errors = 0;
  Quantiles ttft;
  Quantiles tpot;
  MeanStd user_throughput;
  double p99_response_s = 0.0;
  WindowSeries system_throughput;
};

/// Metrics of one run. Sessions that ended in error are left out of the user
/// metrics but their tokens still count towards system throughput.
RunSummary summarize_log(const TokenEventLog& log, double window_s = 2.0);

struct SummaryReport {
  std::vector<RunSummary> runs;
  std::vector<std::string> skipped;  // "dir: reason"
};

/// Summarizes each run directory and, when `out_dir` is non-empty, writes
/// summary.json, summary.csv and SVG charts there. Unreadable runs are
/// skipped and listed. Throws Error(kEmptyInput) if no run could be read.
SummaryReport summarize(const std::vector<std::string>& run_dirs, double window_s,
                        const std::string& out_dir);

std::string summary_json(const std::vector<RunSummary>& runs);
std::string summary_csv(const std::vector<RunSummary>& runs);

}  // namespace xrouter::metricspipe
