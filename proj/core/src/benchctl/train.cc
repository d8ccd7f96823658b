#include "xrouter/benchctl/train.h"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "xrouter/common/error.h"

namespace xrouter::benchctl {

std::vector<std::vector<int64_t>> confusion_matrix(const std::vector<int>& clusters,
                                                   const std::vector<int>& categories, int k) {
  std::vector<std::vector<int64_t>> m(static_cast<size_t>(k),
                                      std::vector<int64_t>(kNumCategories, 0));
  for (size_t i = 0; i < clusters.size(); ++i) ++m[clusters[i]][categories[i]];
  return m;
}

std::vector<double> cluster_purity(const std::vector<std::vector<int64_t>>& confusion) {
  std::vector<double> out;
  for (const auto& row : confusion) {
    const int64_t total = std::accumulate(row.begin(), row.end(), int64_t{0});
    const int64_t top = row.empty() ? 0 : *std::max_element(row.begin(), row.end());
    out.push_back(total ? static_cast<double>(top) / static_cast<double>(total) : 0.0);
  }
  return out;
}

std::vector<int> best_alignment(const std::vector<std::vector<int64_t>>& confusion) {
  const size_t k = confusion.size();
  if (k > 9) throw Error(ErrorCode::kInvalidArgument, "alignment supports at most 9 clusters");
  for (const auto& row : confusion) {
    if (row.size() != k) throw Error(ErrorCode::kInvalidArgument, "confusion must be square");
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> best = order;
  int64_t best_score = -1;
  do {
    int64_t score = 0;
    for (size_t j = 0; j < k; ++j) score += confusion[order[j]][j];
    if (score > best_score) {
      best_score = score;
      best = order;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

TrainResult train(const CorpusBundle& corpus, int k, uint64_t seed, int dim) {
  clusterkit::FitReport report;
  const auto texts = corpus.texts();
  auto pipeline = clusterkit::ClusterPipeline::fit(
      texts, clusterkit::FitOptions{.k = k, .dim = dim, .seed = seed}, &report);
  std::vector<int> categories;
  categories.reserve(corpus.documents.size());
  for (const auto& d : corpus.documents) categories.push_back(d.category);

  TrainResult result{std::move(pipeline), report.assignments, {}, {}, 0.0, false};
  if (k == kNumCategories) {
    const auto order = best_alignment(confusion_matrix(result.assignments, categories, k));
    std::vector<int> inverse(order.size());
    for (size_t j = 0; j < order.size(); ++j) inverse[order[j]] = static_cast<int>(j);
    result.pipeline = result.pipeline.with_cluster_order(order);
    for (auto& a : result.assignments) a = inverse[a];
    result.aligned = true;
  }
  result.confusion = confusion_matrix(result.assignments, categories, k);
  result.purity = cluster_purity(result.confusion);
  int64_t majority = 0;
  for (const auto& row : result.confusion) majority += *std::max_element(row.begin(), row.end());
  result.overall_purity =
      corpus.documents.empty() ? 0.0
                               : static_cast<double>(majority) /
                                     static_cast<double>(corpus.documents.size());
  return result;
}

std::string format_confusion(const TrainResult& r) {
  std::ostringstream o;
  o << "cluster \\ category";
  for (int c = 0; c < kNumCategories; ++c) o << std::setw(6) << c;
  o << "   purity\n";
  for (size_t i = 0; i < r.confusion.size(); ++i) {
    o << std::setw(18) << i;
    for (auto v : r.confusion[i]) o << std::setw(6) << v;
    o << "   " << std::fixed << std::setprecision(3) << r.purity[i] << '\n';
  }
  o << "overall purity " << std::fixed << std::setprecision(3) << r.overall_purity << '\n';
  return o.str();
}

}  // namespace xrouter::benchctl
