#pragma once

#include <cstdint>
#include <vector>

#include "xrouter/clusterkit/svd.h"

namespace xrouter::clusterkit {

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-4;  // max Euclidean centroid shift
  /// Independent seedings; the run with the lowest final inertia wins.
  int n_init = 10;
};

struct KMeansResult {
  RowMatrix centroids;             // k x dim
  std::vector<int> assignments;    // final nearest-centroid labels
  std::vector<double> inertia;     // one entry per Lloyd assignment step
  int iterations = 0;
};

/// Index of the nearest row of `centroids`; ties go to the lowest index.
int nearest_centroid(const RowMatrix& centroids, const Eigen::VectorXd& x);

/// k-means++ seeding then Lloyd iterations, repeated `n_init` times. Empty clusters are re-seeded to
/// the point farthest from its assigned centroid. Throws Error(kTooFewPoints)
/// if there are fewer rows than k.
KMeansResult kmeans_fit(const RowMatrix& points, int k, uint64_t seed,
                        const KMeansOptions& options = {});

}  // namespace xrouter::clusterkit
