#include "xrouter/loadgen/event_log.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "xrouter/common/error.h"

namespace xrouter::loadgen {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
T to_int(std::string_view s, const std::string& where) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParse, where + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

}  // namespace

void write_run(const TokenEventLog& log, const std::string& dir) {
  fs::create_directories(dir);
  {
    auto out = open_out(fs::path(dir) / "events.csv");
    out << "run_id,concurrency,user_id,request_id,category,event,token_index,t_ns\n";
    for (const auto& r : log.records) {
      const std::string prefix = log.run_id + ',' + std::to_string(log.concurrency) + ',' +
                                 std::to_string(r.user_id) + ',' + r.request_id + ',' +
                                 std::to_string(r.category) + ',';
      out << prefix << "send,-1," << r.t_send_ns << '\n';
      for (size_t i = 0; i < r.stamps.size(); ++i) {
        out << prefix << "tok," << i << ',' << r.stamps[i] << '\n';
      }
      out << prefix << (r.ok() ? "end," : "err,") << r.stamps.size() << ',' << r.t_end_ns
          << '\n';
    }
  }
  {
    auto out = open_out(fs::path(dir) / "sessions.csv");
    out << "request_id,input_tokens,end_reason,error_code,frames,bytes,crc32\n";
    for (const auto& r : log.records) {
      out << r.request_id << ',' << r.input_tokens << ',' << r.end_reason << ','
          << r.error_code << ',' << r.frames << ',' << r.bytes << ',' << r.crc << '\n';
    }
  }
  nlohmann::ordered_json meta;
  meta["run_id"] = log.run_id;
  meta["scenario"] = log.scenario;
  meta["clock"] = log.clock;
  meta["concurrency"] = log.concurrency;
  meta["seed"] = log.seed;
  meta["clock_epoch_ns"] = log.epoch_ns;
  meta["wall_duration_s"] = log.wall_duration_s;
  meta["sessions"] = log.records.size();
  meta["spec"] = log.workload_json.empty() ? nlohmann::ordered_json()
                                           : nlohmann::ordered_json::parse(log.workload_json);
  auto out = open_out(fs::path(dir) / "run.json");
  out << meta.dump(2) << '\n';
}

TokenEventLog read_run(const std::string& dir) {
  TokenEventLog log;
  {
    std::ifstream in(fs::path(dir) / "run.json");
    if (!in) throw Error(ErrorCode::kIo, "missing run.json in " + dir);
    try {
      const auto meta = nlohmann::json::parse(in);
      log.run_id = meta.at("run_id").get<std::string>();
      log.scenario = meta.value("scenario", "");
      log.clock = meta.value("clock", "monotonic");
      log.concurrency = meta.at("concurrency").get<int>();
      log.seed = meta.value("seed", uint64_t{0});
      log.epoch_ns = meta.value("clock_epoch_ns", int64_t{0});
      log.wall_duration_s = meta.value("wall_duration_s", 0.0);
      if (meta.contains("spec") && !meta.at("spec").is_null()) log.workload_json = meta.at("spec").dump();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, dir + "/run.json: " + e.what());
    }
  }

  const std::string events_path = (fs::path(dir) / "events.csv").string();
  std::ifstream in(events_path);
  if (!in) throw Error(ErrorCode::kIo, "missing events.csv in " + dir);
  std::string line;
  std::getline(in, line);
  if (line != "run_id,concurrency,user_id,request_id,category,event,token_index,t_ns") {
    throw Error(ErrorCode::kParse, events_path + ":1: unexpected header");
  }
  std::map<std::string, size_t> index;
  int64_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = events_path + ":" + std::to_string(lineno);
    const auto f = split(line, ',');
    if (f.size() != 8) throw Error(ErrorCode::kParse, where + ": expected 8 fields");
    const std::string id(f[3]);
    auto it = index.find(id);
    if (it == index.end()) {
      it = index.emplace(id, log.records.size()).first;
      SessionRecord r;
      r.user_id = to_int<int>(f[2], where);
      r.request_id = id;
      r.category = to_int<int>(f[4], where);
      log.records.push_back(std::move(r));
    }
    auto& r = log.records[it->second];
    const int64_t t = to_int<int64_t>(f[7], where);
    if (f[5] == "send") {
      r.t_send_ns = t;
    } else if (f[5] == "tok") {
      r.stamps.push_back(t);
    } else if (f[5] == "end" || f[5] == "err") {
      r.t_end_ns = t;
      if (f[5] == "err") r.end_reason = "error";
    } else {
      throw Error(ErrorCode::kParse, where + ": unknown event '" + std::string(f[5]) + "'");
    }
  }

  std::ifstream sin(fs::path(dir) / "sessions.csv");
  if (sin) {
    std::getline(sin, line);
    lineno = 1;
    while (std::getline(sin, line)) {
      ++lineno;
      if (line.empty()) continue;
      const std::string where = dir + "/sessions.csv:" + std::to_string(lineno);
      const auto f = split(line, ',');
      if (f.size() != 7) throw Error(ErrorCode::kParse, where + ": expected 7 fields");
      const auto it = index.find(std::string(f[0]));
      if (it == index.end()) continue;
      auto& r = log.records[it->second];
      r.input_tokens = to_int<int64_t>(f[1], where);
      r.end_reason = std::string(f[2]);
      r.error_code = std::string(f[3]);
      r.frames = to_int<int64_t>(f[4], where);
      r.bytes = to_int<int64_t>(f[5], where);
      r.crc = to_int<uint32_t>(f[6], where);
    }
  }
  return log;
}

}  // namespace xrouter::loadgen
