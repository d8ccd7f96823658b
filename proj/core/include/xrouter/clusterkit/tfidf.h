#pragma once

#include <Eigen/SparseCore>

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace xrouter::clusterkit {

using SparseRow = Eigen::SparseVector<double>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using TokenList = std::vector<std::string>;

/// Smoothed TF-IDF: idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1, rows
/// L2-normalized. Vocabulary indices follow lexicographic term order.
class Vectorizer {
 public:
  Vectorizer() = default;
  Vectorizer(std::vector<std::string> terms, std::vector<double> idf, int64_t n_docs);

  /// Throws Error(kEmptyCorpus) when `corpus` is empty.
  static Vectorizer fit(std::span<const TokenList> corpus);

  SparseRow transform(std::span<const std::string> tokens) const;
  SparseMatrix transform_all(std::span<const TokenList> docs) const;

  size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  int64_t n_docs() const { return n_docs_; }

  /// Column of `term`, or -1 when out of vocabulary.
  int index_of(const std::string& term) const;

 private:
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  int64_t n_docs_ = 0;
  std::unordered_map<std::string, int> index_;
};

}  // namespace xrouter::clusterkit
