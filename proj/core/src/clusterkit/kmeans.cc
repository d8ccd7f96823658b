#include "xrouter/clusterkit/kmeans.h"

#include <cmath>
#include <limits>

#include "xrouter/common/error.h"
#include "xrouter/common/rng.h"

namespace xrouter::clusterkit {

namespace {

double squared_distance(const RowMatrix& a, Eigen::Index i, const RowMatrix& b,
                        Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

// Greedy k-means++: each new center is the best of `trials` D^2-weighted
// candidates, judged by the resulting potential.
RowMatrix seed_plus_plus(const RowMatrix& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  RowMatrix centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.index(n)));
  std::vector<double> d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = squared_distance(points, i, centroids, 0);
  std::vector<double> candidate_d2(n), best_d2(n);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index best = -1;
    double best_potential = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
      Eigen::Index pick = static_cast<Eigen::Index>(rng.index(n));
      if (total > 0.0) {
        const double target = rng.uniform() * total;
        double acc = 0.0;
        pick = n - 1;
        for (Eigen::Index i = 0; i < n; ++i) {
          acc += d2[i];
          if (acc > target && d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
      double potential = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        candidate_d2[i] = std::min(d2[i], (points.row(i) - points.row(pick)).squaredNorm());
        potential += candidate_d2[i];
      }
      if (potential < best_potential) {
        best_potential = potential;
        best = pick;
        best_d2.swap(candidate_d2);
      }
    }
    centroids.row(c) = points.row(best);
    d2.swap(best_d2);
  }
  return centroids;
}

}  // namespace

int nearest_centroid(const RowMatrix& centroids, const Eigen::VectorXd& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
    const double d = (centroids.row(j).transpose() - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

namespace {

KMeansResult lloyd(const RowMatrix& points, int k, Rng& rng,
                   const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  KMeansResult result;
  result.centroids = seed_plus_plus(points, k, rng);
  result.assignments.assign(n, 0);
  std::vector<double> dist(n);

  auto assign = [&] {
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j) {
        const double d = squared_distance(points, i, result.centroids, j);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      result.assignments[i] = best;
      dist[i] = best_d;
      inertia += best_d;
    }
    result.inertia.push_back(inertia);
  };

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    assign();
    ++result.iterations;

    RowMatrix next = RowMatrix::Zero(k, points.cols());
    std::vector<int64_t> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      next.row(result.assignments[i]) += points.row(i);
      ++counts[result.assignments[i]];
    }
    for (int j = 0; j < k; ++j) {
      if (counts[j] > 0) {
        next.row(j) /= static_cast<double>(counts[j]);
        continue;
      }
      Eigen::Index far = 0;
      for (Eigen::Index i = 1; i < n; ++i)
        if (dist[i] > dist[far]) far = i;
      next.row(j) = points.row(far);
      dist[far] = -1.0;  // not reused by another empty cluster this round
    }
    double shift = 0.0;
    for (int j = 0; j < k; ++j)
      shift = std::max(shift, (next.row(j) - result.centroids.row(j)).norm());
    result.centroids = std::move(next);
    if (shift < options.tolerance) break;
  }
  // Final labels against the returned centroids.
  assign();
  return result;
}

}  // namespace

KMeansResult kmeans_fit(const RowMatrix& points, int k, uint64_t seed,
                        const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (n < k)
    throw Error(ErrorCode::kTooFewPoints, "k-means needs at least k points, got " +
                                              std::to_string(n) + " < " +
                                              std::to_string(k));
  Rng rng(seed);
  KMeansResult best;
  for (int run = 0; run < std::max(1, options.n_init); ++run) {
    KMeansResult r = lloyd(points, k, rng, options);
    if (run == 0 || r.inertia.back() < best.inertia.back()) best = std::move(r);
  }
  return best;
}

}  // namespace xrouter::clusterkit
