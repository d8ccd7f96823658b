#include "xrouter/benchctl/corpus_io.h"

#include <fstream>

#include "json.hpp"
#include "xrouter/common/error.h"

namespace xrouter::benchctl {

CorpusBundle ingest_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus " + path);
  CorpusBundle bundle;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::kParse,
                  path + ":" + std::to_string(line_no) + ": " + why);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
    if (!j.is_object()) fail("expected an object");
    if (!j.contains("text") || !j["text"].is_string()) fail("missing string field 'text'");
    if (!j.contains("category") || !j["category"].is_number_integer())
      fail("missing integer field 'category'");
    const auto category = j["category"].get<int64_t>();
    if (category < 0 || category >= kNumCategories)
      fail("category " + std::to_string(category) + " outside [0," +
           std::to_string(kNumCategories) + ")");
    bundle.documents.push_back({j["text"].get<std::string>(), static_cast<int>(category)});
  }
  const auto groups = bundle.by_category();
  for (int c = 0; c < kNumCategories; ++c) {
    if (groups[c].empty())
      throw Error(ErrorCode::kMissingCategory,
                  "MissingCategory(" + std::to_string(c) + "): corpus " + path +
                      " has no documents in category " + std::to_string(c));
  }
  return bundle;
}

}  // namespace xrouter::benchctl
