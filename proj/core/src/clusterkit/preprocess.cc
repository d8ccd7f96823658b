#include "xrouter/clusterkit/preprocess.h"

#include <algorithm>

namespace xrouter::clusterkit {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

char lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a')
                                : static_cast<char>(c);
}

}  // namespace

const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> words = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you",
      "you're", "you've", "you'll", "you'd", "your", "yours", "yourself",
      "yourselves", "he", "him", "his", "himself", "she", "she's", "her",
      "hers", "herself", "it", "it's", "its", "itself", "they", "them",
      "their", "theirs", "themselves", "what", "which", "who", "whom", "this",
      "that", "that'll", "these", "those", "am", "is", "are", "was", "were",
      "be", "been", "being", "have", "has", "had", "having", "do", "does",
      "did", "doing", "a", "an", "the", "and", "but", "if", "or", "because",
      "as", "until", "while", "of", "at", "by", "for", "with", "about",
      "against", "between", "into", "through", "during", "before", "after",
      "above", "below", "to", "from", "up", "down", "in", "out", "on", "off",
      "over", "under", "again", "further", "then", "once", "here", "there",
      "when", "where", "why", "how", "all", "any", "both", "each", "few",
      "more", "most", "other", "some", "such", "no", "nor", "not", "only",
      "own", "same", "so", "than", "too", "very", "s", "t", "can", "will",
      "just", "don", "don't", "should", "should've", "now", "d", "ll", "m",
      "o", "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't",
      "didn", "didn't", "doesn", "doesn't", "hadn", "hadn't", "hasn",
      "hasn't", "haven", "haven't", "isn", "isn't", "ma", "mightn",
      "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
      "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won",
      "won't", "wouldn", "wouldn't"};
  return words;
}

Preprocessor::Preprocessor(std::vector<std::string> stopwords)
    : stopwords_(std::move(stopwords)),
      lookup_(stopwords_.begin(), stopwords_.end()) {}

std::vector<std::string> Preprocessor::operator()(std::string_view text) const {
  std::vector<std::string> tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    if (text.compare(i, kNumToken.size(), kNumToken) == 0) {
      tokens.emplace_back(kNumToken);
      i += kNumToken.size();
      continue;
    }
    if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < n && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
    if (j - i >= 2) {
      std::string token;
      token.reserve(j - i);
      bool digits = true;
      for (size_t k = i; k < j; ++k) {
        const auto c = static_cast<unsigned char>(text[k]);
        digits = digits && c >= '0' && c <= '9';
        token.push_back(lower(c));
      }
      if (digits) {
        tokens.emplace_back(kNumToken);
      } else if (!lookup_.contains(token)) {
        tokens.push_back(std::move(token));
      }
    }
    i = j;
  }
  return tokens;
}

std::vector<std::string> preprocess(std::string_view text) {
  static const Preprocessor p;
  return p(text);
}

}  // namespace xrouter::clusterkit
