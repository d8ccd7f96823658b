#include "xrouter/clusterkit/tfidf.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "xrouter/common/error.h"

namespace xrouter::clusterkit {

Vectorizer::Vectorizer(std::vector<std::string> terms, std::vector<double> idf,
                       int64_t n_docs)
    : terms_(std::move(terms)), idf_(std::move(idf)), n_docs_(n_docs) {
  if (terms_.size() != idf_.size())
    throw Error(ErrorCode::kInvalidArgument, "vocabulary/idf size mismatch");
  index_.reserve(terms_.size());
  for (size_t i = 0; i < terms_.size(); ++i)
    index_.emplace(terms_[i], static_cast<int>(i));
}

Vectorizer Vectorizer::fit(std::span<const TokenList> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus has no documents");
  std::map<std::string, int64_t> df;
  for (const auto& doc : corpus) {
    TokenList unique(doc.begin(), doc.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (auto& t : unique) ++df[t];
  }
  const auto n = static_cast<double>(corpus.size());
  std::vector<std::string> terms;
  std::vector<double> idf;
  terms.reserve(df.size());
  idf.reserve(df.size());
  for (const auto& [term, count] : df) {
    terms.push_back(term);
    idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return Vectorizer(std::move(terms), std::move(idf),
                    static_cast<int64_t>(corpus.size()));
}

int Vectorizer::index_of(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : it->second;
}

SparseRow Vectorizer::transform(std::span<const std::string> tokens) const {
  std::map<int, double> counts;
  for (const auto& t : tokens) {
    if (int col = index_of(t); col >= 0) counts[col] += 1.0;
  }
  SparseRow row(static_cast<Eigen::Index>(terms_.size()));
  row.reserve(static_cast<Eigen::Index>(counts.size()));
  double norm2 = 0.0;
  for (auto& [col, c] : counts) {
    c *= idf_[col];
    norm2 += c * c;
  }
  if (norm2 == 0.0) return row;
  const double inv = 1.0 / std::sqrt(norm2);
  for (const auto& [col, v] : counts) row.insertBack(col) = v * inv;
  return row;
}

SparseMatrix Vectorizer::transform_all(std::span<const TokenList> docs) const {
  std::vector<Eigen::Triplet<double>> triplets;
  for (size_t r = 0; r < docs.size(); ++r) {
    const SparseRow row = transform(docs[r]);
    for (SparseRow::InnerIterator it(row); it; ++it)
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(it.index()), it.value());
  }
  SparseMatrix m(static_cast<Eigen::Index>(docs.size()),
                 static_cast<Eigen::Index>(terms_.size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace xrouter::clusterkit
