#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xrouter/clusterkit/pipeline.h"
#include "xrouter/common/corpus.h"

namespace xrouter::benchctl {

struct TrainResult {
  clusterkit::ClusterPipeline pipeline;
  std::vector<int> assignments;                // final cluster per document
  std::vector<std::vector<int64_t>> confusion;  // k x kNumCategories
  std::vector<double> purity;                  // per cluster: majority share
  double overall_purity = 0.0;                 // sum of majorities / n
  bool aligned = false;                        // cluster ids permuted onto categories
};

/// Confusion matrix of cluster (row) against category (column).
std::vector<std::vector<int64_t>> confusion_matrix(const std::vector<int>& clusters,
                                                   const std::vector<int>& categories, int k);

/// Majority share per row; empty rows score 0.
std::vector<double> cluster_purity(const std::vector<std::vector<int64_t>>& confusion);

/// Cluster permutation maximizing the diagonal of the confusion matrix;
/// order[j] is the old cluster that becomes cluster j. Requires a square
/// matrix of size <= 9 (exhaustive search; first optimum in lexicographic order).
std::vector<int> best_alignment(const std::vector<std::vector<int64_t>>& confusion);

/// Fits the classifier on the corpus. When k equals the category count the
/// cluster ids are permuted so cluster c is the cluster that best covers
/// category c; the route tables rely on this.
TrainResult train(const CorpusBundle& corpus, int k, uint64_t seed, int dim = 100);

/// Human-readable confusion matrix with per-cluster purity.
std::string format_confusion(const TrainResult& result);

}  // namespace xrouter::benchctl
