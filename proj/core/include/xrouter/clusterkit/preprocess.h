#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace xrouter::clusterkit {

/// Replacement token for all-digit tokens.
inline constexpr std::string_view kNumToken = "<num>";

/// The English stopword list shipped with the pipeline artifact (179 terms).
const std::vector<std::string>& default_stopwords();

class Preprocessor {
 public:
  explicit Preprocessor(std::vector<std::string> stopwords = default_stopwords());

  /// Lowercased maximal runs of >= 2 word characters (ASCII alphanumerics and
  /// UTF-8 continuation bytes), stopwords removed, all-digit tokens mapped to
  /// "<num>". The literal "<num>" in the input is kept as a token so the
  /// transformation is idempotent on its own rendered output.
  std::vector<std::string> operator()(std::string_view text) const;

  const std::vector<std::string>& stopwords() const { return stopwords_; }

 private:
  std::vector<std::string> stopwords_;
  std::unordered_set<std::string> lookup_;
};

std::vector<std::string> preprocess(std::string_view text);

}  // namespace xrouter::clusterkit
