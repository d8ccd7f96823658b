#pragma once

#include <string>
#include <vector>

namespace xrouter {

inline constexpr int kNumCategories = 8;

struct Document {
  std::string text;
  int category = 0;
};

/// Categorized prompt source. Every category in [0, kNumCategories) is
/// non-empty once validated by benchctl::ingest_corpus.
struct CorpusBundle {
  std::vector<Document> documents;

  std::vector<std::string> texts() const;
  /// Indices into `documents`, grouped by category.
  std::vector<std::vector<size_t>> by_category() const;
};

}  // namespace xrouter
