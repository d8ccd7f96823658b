#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "xrouter/clusterkit/tfidf.h"

namespace xrouter::clusterkit {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Truncated right-singular basis of a document-term matrix.
struct Projection {
  RowMatrix components;             // dim x vocab, orthonormal rows
  Eigen::VectorXd singular_values;  // dim, non-increasing

  int dim() const { return static_cast<int>(components.rows()); }

  Eigen::VectorXd project(const SparseRow& x) const { return components * x; }
};

struct SvdOptions {
  int oversampling = 10;
  int min_power_iterations = 2;
  int max_power_iterations = 30;
  /// Subspace iteration stops once the leading `dim` Ritz values change by
  /// less than this relative amount between iterations.
  double tolerance = 1e-12;
};

/// Randomized range-finder SVD with seeded Gaussian sketch and subspace
/// (power) iteration. `dim` is clamped to min(dim, rows, cols). Each
/// component's largest-magnitude entry is made positive so the result is
/// sign-deterministic.
Projection svd_fit(const SparseMatrix& matrix, int dim, uint64_t seed,
                   const SvdOptions& options = {});
Projection svd_fit(const Eigen::MatrixXd& matrix, int dim, uint64_t seed,
                   const SvdOptions& options = {});

}  // namespace xrouter::clusterkit
