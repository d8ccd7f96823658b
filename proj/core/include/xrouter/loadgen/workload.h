#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "xrouter/common/corpus.h"
#include "xrouter/common/rng.h"

namespace xrouter::loadgen {

struct CategoryDistribution {
  enum class Kind { kUniform, kNormal } kind = Kind::kUniform;
  double mu = 3.5;     // normal only, over category indices
  double sigma = 1.5;
};

struct LengthDistribution {
  enum class Kind { kLognormal, kNormal } kind = Kind::kLognormal;
  double mu = 6.214608098422191;  // lognormal: ln(500); normal: mean
  double sigma = 0.6;             // lognormal sigma; normal standard deviation
  int64_t min = 16;
  int64_t max = 2048;
};

struct WorkloadSpec {
  CategoryDistribution categories;
  LengthDistribution input_length;
  int requests_per_user = 1;
  int max_tokens = 1000;

  /// Throws Error(kInvalidArgument).
  void validate() const;
};

/// JSON form:
/// {"category_distribution": {"kind": "uniform"} | {"kind": "normal", "mu", "sigma"},
///  "input_length_distribution": {"kind": "lognormal", "mu", "sigma", "min", "max"}
///                             | {"kind": "normal", "mean", "std", "min"[, "max"]},
///  "requests_per_user": int, "max_tokens": int}
WorkloadSpec parse_workload(const std::string& json_text);
WorkloadSpec load_workload(const std::string& path);
std::string workload_to_json(const WorkloadSpec& spec);

/// Per-category probabilities; normal weights are the Gaussian pdf at each
/// index, normalized.
std::array<double, kNumCategories> category_weights(const CategoryDistribution& dist);

int sample_category(const WorkloadSpec& spec, Rng& rng);
int64_t sample_input_length(const WorkloadSpec& spec, Rng& rng);

/// Word pools per category for prompt construction.
class PromptSource {
 public:
  explicit PromptSource(const CorpusBundle& corpus);

  /// Exactly `n_tokens` consecutive words starting at a random position in
  /// the category's documents, wrapping around. Throws Error(kEmptyCategory).
  std::string build_prompt(int category, int64_t n_tokens, Rng& rng) const;

 private:
  std::vector<std::vector<std::string>> words_;
};

/// One planned request of the closed-loop schedule.
struct RequestPlan {
  int user = 0;
  int seq = 0;
  std::string request_id;
  int category = 0;
  int64_t input_tokens = 0;
  std::string prompt;
};

std::string request_id(int user, int seq);

/// The full request sequence of one user; a pure function of its arguments.
std::vector<RequestPlan> plan_user(const WorkloadSpec& spec, const PromptSource& source,
                                   uint64_t seed, int user);

}  // namespace xrouter::loadgen
