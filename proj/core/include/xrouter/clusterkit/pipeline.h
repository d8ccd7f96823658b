#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xrouter/clusterkit/kmeans.h"
#include "xrouter/clusterkit/preprocess.h"
#include "xrouter/clusterkit/svd.h"
#include "xrouter/clusterkit/tfidf.h"

namespace xrouter::clusterkit {

inline constexpr uint32_t kPipelineFormatVersion = 1;
inline constexpr std::string_view kPipelineMagic = "XRPIPE01";

/// Per-dimension standardization; zero-variance dimensions get scale 1.
struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Scaler fit(const RowMatrix& samples);
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    return (x - mean).cwiseQuotient(scale);
  }
};

struct FitOptions {
  int k = 8;
  int dim = 100;
  uint64_t seed = 0;
};

/// Training-time by-products, useful for diagnostics and oracles.
struct FitReport {
  RowMatrix embeddings;  // standardized training embeddings, n_docs x dim
  std::vector<int> assignments;
  std::vector<double> inertia;
};

/// Trained prompt classifier: preprocess -> TF-IDF -> truncated SVD ->
/// standardize -> nearest centroid. Immutable once built, so one instance
/// can serve any number of threads.
class ClusterPipeline {
 public:
  static ClusterPipeline fit(std::span<const std::string> documents,
                             const FitOptions& options, FitReport* report = nullptr);

  /// Builds a pipeline from already-trained parts.
  static ClusterPipeline assemble(Preprocessor preprocessor, Vectorizer vectorizer,
                                  Projection projection, Scaler scaler,
                                  RowMatrix centroids);

  Eigen::VectorXd embed(std::string_view text) const;
  Eigen::VectorXd embed_tokens(std::span<const std::string> tokens) const;
  int classify(std::string_view text) const;

  /// Copy with centroid rows permuted: new cluster j is old cluster order[j].
  ClusterPipeline with_cluster_order(std::span<const int> order) const;

  std::string serialize() const;
  static ClusterPipeline deserialize(std::string_view bytes);
  void save(const std::string& path) const;
  static ClusterPipeline load(const std::string& path);

  int k() const { return static_cast<int>(centroids_.rows()); }
  int dim() const { return projection_.dim(); }
  uint32_t version() const { return version_; }
  const Preprocessor& preprocessor() const { return preprocessor_; }
  const Vectorizer& vectorizer() const { return vectorizer_; }
  const Projection& projection() const { return projection_; }
  const Scaler& scaler() const { return scaler_; }
  const RowMatrix& centroids() const { return centroids_; }

 private:
  ClusterPipeline() = default;

  Preprocessor preprocessor_;
  Vectorizer vectorizer_;
  Projection projection_;
  Scaler scaler_;
  RowMatrix centroids_;
  uint32_t version_ = kPipelineFormatVersion;
};

}  // namespace xrouter::clusterkit
