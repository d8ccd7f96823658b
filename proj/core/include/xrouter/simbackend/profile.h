#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "xrouter/common/rng.h"

namespace xrouter::simbackend {

/// Capacity and latency parameterization of one simulated model server.
/// Memory figures are in GB; every latency coefficient is in nanoseconds.
struct ModelProfile {
  std::string name;
  int tp_degree = 1;
  double weights_gb = 0.0;
  double kv_cache_gb = 0.0;
  int max_batch = 1;
  double kv_tokens_per_gb = 0.0;
  double prefill_coef_ns_per_token = 0.0;
  double prefill_base_ns = 0.0;
  double decode_base_ns = 0.0;
  double decode_batch_coef_ns = 0.0;
  double tp_comm_overhead_ns = 0.0;
  double eos_prob = 1.0;
  int max_output_tokens = 1000;

  int64_t kv_capacity_tokens() const;

  /// Throws Error(kInvalidArgument) naming the first violated invariant.
  void validate() const;
};

/// Reads a profile JSON file holding exactly the ModelProfile fields
/// (max_output_tokens may be omitted and defaults to 1000).
ModelProfile load_profile(const std::string& path);
ModelProfile parse_profile(const std::string& json_text);
std::string profile_to_json(const ModelProfile& profile);

/// prefill_base_ns + prefill_coef_ns_per_token * n_input / tp_degree.
int64_t prefill_time(const ModelProfile& p, int64_t n_input);

/// One decode iteration over `batch_size` requests plus, when requests join
/// at this boundary, a single prefill over their combined input tokens.
int64_t iteration_time(const ModelProfile& p, int64_t batch_size,
                       std::optional<int64_t> joining_prefill_tokens = std::nullopt);

struct OutputDraw {
  int length = 1;
  bool capped = false;  // the geometric draw exceeded `cap`
};

/// Geometric output length with per-token stop probability eos_prob,
/// clamped to [1, cap].
OutputDraw draw_output_length(Rng& rng, const ModelProfile& p, int cap);

/// draw_output_length with cap = max_output_tokens.
int sample_output_length(Rng& rng, const ModelProfile& p);

}  // namespace xrouter::simbackend
