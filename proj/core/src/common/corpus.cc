#include "xrouter/common/corpus.h"

namespace xrouter {

std::vector<std::string> CorpusBundle::texts() const {
  std::vector<std::string> out;
  out.reserve(documents.size());
  for (const auto& d : documents) out.push_back(d.text);
  return out;
}

std::vector<std::vector<size_t>> CorpusBundle::by_category() const {
  std::vector<std::vector<size_t>> groups(kNumCategories);
  for (size_t i = 0; i < documents.size(); ++i) {
    const int c = documents[i].category;
    if (c >= 0 && c < kNumCategories) groups[c].push_back(i);
  }
  return groups;
}

}  // namespace xrouter
