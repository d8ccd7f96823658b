#include "xrouter/benchctl/sweep.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "xrouter/benchctl/corpus_io.h"
#include "xrouter/benchctl/cosim.h"
#include "xrouter/common/error.h"
#include "xrouter/metricspipe/charts.h"

namespace xrouter::benchctl {

namespace fs = std::filesystem;

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << body;
}

}  // namespace

simbackend::ModelProfile sweep_profile(const SweepVariant& variant, int tp, int batch_size) {
  auto p = simbackend::load_profile(variant.profile);
  p.name = variant.name + "_tp" + std::to_string(tp) + "_bs" + std::to_string(batch_size);
  p.tp_degree = tp;
  p.max_batch = batch_size;
  p.kv_cache_gb = variant.kv_cache_gb.at(tp);
  p.validate();
  return p;
}

double total_time_s(const loadgen::TokenEventLog& log) {
  if (log.records.empty()) throw Error(ErrorCode::kEmptyLog, "run has no sessions");
  int64_t first = std::numeric_limits<int64_t>::max();
  int64_t last = std::numeric_limits<int64_t>::min();
  for (const auto& r : log.records) {
    first = std::min(first, r.t_send_ns);
    last = std::max(last, r.t_end_ns);
  }
  return static_cast<double>(last - first) / 1e9;
}

SweepReport run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const fs::path out = cfg.output_dir;
  fs::create_directories(out / "raw");
  write_file(out / "config.json", sweep_to_json(cfg) + "\n");

  CorpusBundle corpus;
  try {
    corpus = ingest_corpus(cfg.corpus);
  } catch (const Error& e) {
    throw Error(ErrorCode::kLaunchFailure, e.what());
  }
  const loadgen::PromptSource source(corpus);

  loadgen::WorkloadSpec workload;
  workload.input_length = cfg.input_length;
  workload.max_tokens = cfg.max_tokens;
  workload.requests_per_user = cfg.requests_per_user;
  const auto to_zero = [](const std::string&) { return 0; };

  SweepReport report;
  report.output_dir = out.string();
  for (int tp : cfg.tp_degrees) {
    for (const auto& variant : cfg.variants) {
      for (int bs : cfg.batch_sizes) {
        Topology topo;
        try {
          topo.backends.push_back({"sweep", variant.profile, sweep_profile(variant, tp, bs)});
        } catch (const Error& e) {
          throw Error(ErrorCode::kLaunchFailure, variant.name + ": " + e.what());
        }
        topo.routes[0] = {0};
        const std::string config = topo.backends[0].profile.name;
        report.configs.push_back(config);

        std::vector<SweepCell> cells;
        for (int level : cfg.concurrency_levels) cells.push_back({config, level, {}, 0.0, 0.0});
        for (int rep = 0; rep < cfg.repeats; ++rep) {
          std::string raw = "level,sessions,first_send_ns,last_end_ns,total_s\n";
          for (auto& cell : cells) {
            CosimOptions o;
            o.users = cell.level;
            o.workload = workload;
            o.seed = cfg.seed + static_cast<uint64_t>(rep);
            o.run_id = config + "_N" + std::to_string(cell.level) + "_r" + std::to_string(rep);
            o.scenario = config;
            const auto log = cosimulate(topo, to_zero, source, o).log;
            int64_t first = std::numeric_limits<int64_t>::max();
            int64_t last = std::numeric_limits<int64_t>::min();
            for (const auto& r : log.records) {
              first = std::min(first, r.t_send_ns);
              last = std::max(last, r.t_end_ns);
            }
            const double total = total_time_s(log);
            cell.total_s.push_back(total);
            raw += std::to_string(cell.level) + "," + std::to_string(log.records.size()) + "," +
                   std::to_string(first) + "," + std::to_string(last) + "," + exact(total) + "\n";
          }
          write_file(out / "raw" / (config + "_r" + std::to_string(rep) + ".csv"), raw);
        }
        for (auto& cell : cells) {
          double sum = 0.0;
          for (double v : cell.total_s) sum += v;
          cell.mean = sum / static_cast<double>(cell.total_s.size());
          double sq = 0.0;
          for (double v : cell.total_s) sq += (v - cell.mean) * (v - cell.mean);
          cell.std = std::sqrt(sq / static_cast<double>(cell.total_s.size()));
          report.cells.push_back(std::move(cell));
        }
      }
    }
  }

  std::string csv = "config";
  for (int level : cfg.concurrency_levels) {
    csv += ",N" + std::to_string(level) + "_mean,N" + std::to_string(level) + "_std";
  }
  csv += "\n";
  const size_t per_row = cfg.concurrency_levels.size();
  for (size_t row = 0; row < report.configs.size(); ++row) {
    csv += report.configs[row];
    for (size_t c = 0; c < per_row; ++c) {
      const auto& cell = report.cells[row * per_row + c];
      csv += "," + exact(cell.mean) + "," + exact(cell.std);
    }
    csv += "\n";
  }
  write_file(out / "heatmap.csv", csv);

  std::vector<std::string> cols;
  for (int level : cfg.concurrency_levels) cols.push_back(std::to_string(level));
  const size_t rows_per_tp = cfg.variants.size() * cfg.batch_sizes.size();
  for (size_t t = 0; t < cfg.tp_degrees.size(); ++t) {
    std::vector<std::string> rows;
    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::string>> labels;
    for (size_t r = t * rows_per_tp; r < (t + 1) * rows_per_tp; ++r) {
      rows.push_back(report.configs[r]);
      values.emplace_back();
      labels.emplace_back();
      for (size_t c = 0; c < per_row; ++c) {
        const auto& cell = report.cells[r * per_row + c];
        values.back().push_back(cell.mean);
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.1f±%.1f", cell.mean, cell.std);
        labels.back().push_back(buf);
      }
    }
    const std::string tp = std::to_string(cfg.tp_degrees[t]);
    write_file(out / ("heatmap_tp" + tp + ".svg"),
               metricspipe::heatmap_chart("Total time [s], TP" + tp, rows, cols, values, labels));
  }
  return report;
}

}  // namespace xrouter::benchctl
