#include "xrouter/simbackend/profile.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "xrouter/common/error.h"

namespace xrouter::simbackend {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, "invalid model profile: " + what);
}

}  // namespace

int64_t ModelProfile::kv_capacity_tokens() const {
  return static_cast<int64_t>(std::floor(kv_cache_gb * kv_tokens_per_gb));
}

void ModelProfile::validate() const {
  require(tp_degree >= 1, "tp_degree must be >= 1");
  require(max_batch >= 1, "max_batch must be >= 1");
  require(max_output_tokens >= 1, "max_output_tokens must be >= 1");
  for (double v : {weights_gb, kv_cache_gb, kv_tokens_per_gb, prefill_coef_ns_per_token,
                   prefill_base_ns, decode_base_ns, decode_batch_coef_ns,
                   tp_comm_overhead_ns}) {
    require(std::isfinite(v) && v >= 0.0, "GB and ns coefficients must be finite and >= 0");
  }
  require(eos_prob > 0.0 && eos_prob <= 1.0, "eos_prob must be in (0, 1]");
}

ModelProfile parse_profile(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("profile: ") + e.what());
  }
  static const std::set<std::string> known = {
      "name", "tp_degree", "weights_gb", "kv_cache_gb", "max_batch",
      "kv_tokens_per_gb", "prefill_coef_ns_per_token", "prefill_base_ns",
      "decode_base_ns", "decode_batch_coef_ns", "tp_comm_overhead_ns", "eos_prob",
      "max_output_tokens"};
  if (!j.is_object()) throw Error(ErrorCode::kParse, "profile must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw Error(ErrorCode::kParse, "unknown profile field '" + key + "'");
  }
  ModelProfile p;
  try {
    p.name = j.at("name").get<std::string>();
    p.tp_degree = j.at("tp_degree").get<int>();
    p.weights_gb = j.at("weights_gb").get<double>();
    p.kv_cache_gb = j.at("kv_cache_gb").get<double>();
    p.max_batch = j.at("max_batch").get<int>();
    p.kv_tokens_per_gb = j.at("kv_tokens_per_gb").get<double>();
    p.prefill_coef_ns_per_token = j.at("prefill_coef_ns_per_token").get<double>();
    p.prefill_base_ns = j.at("prefill_base_ns").get<double>();
    p.decode_base_ns = j.at("decode_base_ns").get<double>();
    p.decode_batch_coef_ns = j.at("decode_batch_coef_ns").get<double>();
    p.tp_comm_overhead_ns = j.at("tp_comm_overhead_ns").get<double>();
    p.eos_prob = j.at("eos_prob").get<double>();
    p.max_output_tokens = j.value("max_output_tokens", 1000);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("profile: ") + e.what());
  }
  p.validate();
  return p;
}

ModelProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open profile " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_profile(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string profile_to_json(const ModelProfile& p) {
  nlohmann::ordered_json j;
  j["name"] = p.name;
  j["tp_degree"] = p.tp_degree;
  j["weights_gb"] = p.weights_gb;
  j["kv_cache_gb"] = p.kv_cache_gb;
  j["max_batch"] = p.max_batch;
  j["kv_tokens_per_gb"] = p.kv_tokens_per_gb;
  j["prefill_coef_ns_per_token"] = p.prefill_coef_ns_per_token;
  j["prefill_base_ns"] = p.prefill_base_ns;
  j["decode_base_ns"] = p.decode_base_ns;
  j["decode_batch_coef_ns"] = p.decode_batch_coef_ns;
  j["tp_comm_overhead_ns"] = p.tp_comm_overhead_ns;
  j["eos_prob"] = p.eos_prob;
  j["max_output_tokens"] = p.max_output_tokens;
  return j.dump(2);
}

int64_t prefill_time(const ModelProfile& p, int64_t n_input) {
  return std::llround(p.prefill_base_ns + p.prefill_coef_ns_per_token *
                                              static_cast<double>(n_input) /
                                              static_cast<double>(p.tp_degree));
}

int64_t iteration_time(const ModelProfile& p, int64_t batch_size,
                       std::optional<int64_t> joining_prefill_tokens) {
  int64_t t = std::llround(p.decode_base_ns +
                           p.decode_batch_coef_ns * static_cast<double>(batch_size) +
                           p.tp_comm_overhead_ns * static_cast<double>(p.tp_degree - 1));
  if (joining_prefill_tokens) t += prefill_time(p, *joining_prefill_tokens);
  return t;
}

OutputDraw draw_output_length(Rng& rng, const ModelProfile& p, int cap) {
  cap = std::max(cap, 1);
  if (p.eos_prob >= 1.0) {
    rng.next_u64();  // keep the stream position independent of eos_prob
    return {1, false};
  }
  // Inverse CDF: P(L > k) = (1 - p)^k.
  const double u = rng.uniform_open_low();
  const double draw = 1.0 + std::floor(std::log(u) / std::log1p(-p.eos_prob));
  if (draw > static_cast<double>(cap)) return {cap, true};
  return {static_cast<int>(draw), false};
}

int sample_output_length(Rng& rng, const ModelProfile& p) {
  return draw_output_length(rng, p, p.max_output_tokens).length;
}

}  // namespace xrouter::simbackend
