#include "xrouter/loadgen/workload.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "xrouter/common/error.h"

namespace xrouter::loadgen {

void WorkloadSpec::validate() const {
  auto bad = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, "invalid workload: " + what);
  };
  if (categories.kind == CategoryDistribution::Kind::kNormal && !(categories.sigma > 0.0)) {
    bad("category sigma must be > 0");
  }
  if (input_length.kind == LengthDistribution::Kind::kLognormal && !(input_length.sigma > 0.0)) {
    bad("lognormal sigma must be > 0");
  }
  if (input_length.kind == LengthDistribution::Kind::kNormal && !(input_length.sigma >= 0.0)) {
    bad("normal std must be >= 0");
  }
  if (input_length.min < 0 || input_length.max < input_length.min) bad("length bounds");
  if (requests_per_user < 1) bad("requests_per_user must be >= 1");
  if (max_tokens < 1) bad("max_tokens must be >= 1");
}

WorkloadSpec parse_workload(const std::string& json_text) {
  WorkloadSpec spec;
  try {
    const auto j = nlohmann::json::parse(json_text);
    if (j.contains("category_distribution")) {
      const auto& c = j.at("category_distribution");
      const auto kind = c.at("kind").get<std::string>();
      if (kind == "uniform") {
        spec.categories.kind = CategoryDistribution::Kind::kUniform;
      } else if (kind == "normal") {
        spec.categories.kind = CategoryDistribution::Kind::kNormal;
        spec.categories.mu = c.value("mu", 3.5);
        spec.categories.sigma = c.value("sigma", 1.5);
      } else {
        throw Error(ErrorCode::kParse, "unknown category distribution '" + kind + "'");
      }
    }
    if (j.contains("input_length_distribution")) {
      const auto& l = j.at("input_length_distribution");
      const auto kind = l.at("kind").get<std::string>();
      auto& d = spec.input_length;
      if (kind == "lognormal") {
        d.kind = LengthDistribution::Kind::kLognormal;
        d.mu = l.at("mu").get<double>();
        d.sigma = l.at("sigma").get<double>();
        d.min = l.value("min", int64_t{16});
        d.max = l.value("max", int64_t{2048});
      } else if (kind == "normal") {
        d.kind = LengthDistribution::Kind::kNormal;
        d.mu = l.at("mean").get<double>();
        d.sigma = l.at("std").get<double>();
        d.min = l.value("min", int64_t{1});
        d.max = l.value("max", std::numeric_limits<int64_t>::max());
      } else {
        throw Error(ErrorCode::kParse, "unknown input length distribution '" + kind + "'");
      }
    }
    spec.requests_per_user = j.value("requests_per_user", 1);
    spec.max_tokens = j.value("max_tokens", 1000);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("workload: ") + e.what());
  }
  spec.validate();
  return spec;
}

WorkloadSpec load_workload(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open workload spec " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_workload(buf.str());
}

std::string workload_to_json(const WorkloadSpec& spec) {
  nlohmann::ordered_json j;
  auto& c = j["category_distribution"];
  if (spec.categories.kind == CategoryDistribution::Kind::kUniform) {
    c["kind"] = "uniform";
  } else {
    c["kind"] = "normal";
    c["mu"] = spec.categories.mu;
    c["sigma"] = spec.categories.sigma;
  }
  auto& l = j["input_length_distribution"];
  const auto& d = spec.input_length;
  if (d.kind == LengthDistribution::Kind::kLognormal) {
    l["kind"] = "lognormal";
    l["mu"] = d.mu;
    l["sigma"] = d.sigma;
    l["min"] = d.min;
    l["max"] = d.max;
  } else {
    l["kind"] = "normal";
    l["mean"] = d.mu;
    l["std"] = d.sigma;
    l["min"] = d.min;
    if (d.max != std::numeric_limits<int64_t>::max()) l["max"] = d.max;
  }
  j["requests_per_user"] = spec.requests_per_user;
  j["max_tokens"] = spec.max_tokens;
  return j.dump(2);
}

std::array<double, kNumCategories> category_weights(const CategoryDistribution& dist) {
  std::array<double, kNumCategories> w{};
  if (dist.kind == CategoryDistribution::Kind::kUniform) {
    w.fill(1.0 / kNumCategories);
    return w;
  }
  double total = 0.0;
  for (int i = 0; i < kNumCategories; ++i) {
    const double z = (i - dist.mu) / dist.sigma;
    w[i] = std::exp(-0.5 * z * z);  // the pdf's constant cancels in normalization
    total += w[i];
  }
  for (auto& x : w) x /= total;
  return w;
}

int sample_category(const WorkloadSpec& spec, Rng& rng) {
  if (spec.categories.kind == CategoryDistribution::Kind::kUniform) {
    return static_cast<int>(rng.index(kNumCategories));
  }
  const auto w = category_weights(spec.categories);
  const double u = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < kNumCategories; ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  return kNumCategories - 1;
}

int64_t sample_input_length(const WorkloadSpec& spec, Rng& rng) {
  const auto& d = spec.input_length;
  const double z = rng.normal();
  const double x = d.kind == LengthDistribution::Kind::kLognormal
                       ? std::exp(d.mu + d.sigma * z)
                       : d.mu + d.sigma * z;
  const double lo = static_cast<double>(d.min);
  const double hi = static_cast<double>(d.max);
  return static_cast<int64_t>(std::clamp(std::round(x), lo, hi));
}

PromptSource::PromptSource(const CorpusBundle& corpus) : words_(kNumCategories) {
  for (const auto& doc : corpus.documents) {
    if (doc.category < 0 || doc.category >= kNumCategories) continue;
    std::istringstream in(doc.text);
    std::string w;
    while (in >> w) words_[doc.category].push_back(w);
  }
}

std::string PromptSource::build_prompt(int category, int64_t n_tokens, Rng& rng) const {
  if (category < 0 || category >= kNumCategories || words_[category].empty()) {
    throw Error(ErrorCode::kEmptyCategory,
                "no words available for category " + std::to_string(category));
  }
  const auto& pool = words_[category];
  size_t pos = rng.index(pool.size());
  std::string out;
  for (int64_t i = 0; i < n_tokens; ++i) {
    if (i) out += ' ';
    out += pool[pos];
    pos = (pos + 1) % pool.size();
  }
  return out;
}

std::string request_id(int user, int seq) {
  return "u" + std::to_string(user) + "-" + std::to_string(seq);
}

std::vector<RequestPlan> plan_user(const WorkloadSpec& spec, const PromptSource& source,
                                   uint64_t seed, int user) {
  Rng rng(mix_seed(seed, static_cast<uint64_t>(user)));
  std::vector<RequestPlan> plans;
  plans.reserve(static_cast<size_t>(spec.requests_per_user));
  for (int k = 0; k < spec.requests_per_user; ++k) {
    RequestPlan p;
    p.user = user;
    p.seq = k;
    p.request_id = request_id(user, k);
    p.category = sample_category(spec, rng);
    p.input_tokens = sample_input_length(spec, rng);
    p.prompt = source.build_prompt(p.category, p.input_tokens, rng);
    plans.push_back(std::move(p));
  }
  return plans;
}

}  // namespace xrouter::loadgen
