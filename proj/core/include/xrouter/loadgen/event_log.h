#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xrouter::loadgen {

/// One request as observed by its user. Times are nanoseconds on the run's
/// clock (monotonic wall time for live runs, virtual time for simulated ones).
struct SessionRecord {
  int user_id = 0;
  std::string request_id;
  int category = 0;
  int64_t input_tokens = 0;
  int64_t t_send_ns = 0;
  std::vector<int64_t> stamps;
  int64_t t_end_ns = 0;
  std::string end_reason;  // eos | cap | error
  std::string error_code;  // set when end_reason == "error"
  int64_t frames = 0;      // frames received
  int64_t bytes = 0;       // bytes received
  uint32_t crc = 0;        // crc32 of received bytes

  bool ok() const { return end_reason != "error"; }
};

struct TokenEventLog {
  std::string run_id;
  std::string scenario;
  std::string clock = "monotonic";  // or "virtual"
  int concurrency = 0;
  uint64_t seed = 0;
  int64_t epoch_ns = 0;          // clock reading that t = 0 corresponds to
  double wall_duration_s = 0.0;
  std::string workload_json;     // the WorkloadSpec used
  std::vector<SessionRecord> records;
};

/// Writes events.csv, sessions.csv and run.json into `dir` (created).
void write_run(const TokenEventLog& log, const std::string& dir);

/// Reads a run directory back. Throws Error(kParse) naming the bad line.
TokenEventLog read_run(const std::string& dir);

}  // namespace xrouter::loadgen
