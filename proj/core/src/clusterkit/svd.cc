#include "xrouter/clusterkit/svd.h"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "xrouter/common/rng.h"

namespace xrouter::clusterkit {

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

double max_relative_change(const Eigen::VectorXd& prev, const Eigen::VectorXd& cur) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < cur.size(); ++i) {
    const double scale = std::max(std::abs(prev[i]), 1e-300);
    worst = std::max(worst, std::abs(cur[i] - prev[i]) / scale);
  }
  return worst;
}

}  // namespace

Projection svd_fit(const SparseMatrix& a, int dim, uint64_t seed,
                   const SvdOptions& options) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  const Eigen::Index small = std::min(rows, cols);
  const Eigen::Index k = std::min<Eigen::Index>(std::max(dim, 0), small);
  Projection out;
  if (k == 0) {
    out.components.resize(0, cols);
    out.singular_values.resize(0);
    return out;
  }
  const Eigen::Index width = std::min<Eigen::Index>(k + options.oversampling, small);

  Rng rng(seed);
  Eigen::MatrixXd omega(cols, width);
  for (Eigen::Index j = 0; j < width; ++j)
    for (Eigen::Index i = 0; i < cols; ++i) omega(i, j) = rng.normal();

  const SparseMatrix at = a.transpose();
  Eigen::MatrixXd q = orthonormal_basis(a * omega);

  // A sketch as wide as the short side spans the whole row space, so a single
  // pass is exact.
  const int max_iter = width == small ? 0 : options.max_power_iterations;
  Eigen::MatrixXd bt;
  Eigen::VectorXd prev_ritz;
  for (int iter = 0;; ++iter) {
    // B^T = A^T Q (cols x width); its left singular vectors are the right
    // singular vectors of A restricted to span(Q).
    bt = at * q;
    if (iter >= max_iter) break;
    // Ritz values from the small Gram matrix are enough to detect convergence.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(bt.transpose() * bt,
                                                       Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ritz = eig.eigenvalues().reverse().head(k);
    if (iter >= options.min_power_iterations &&
        max_relative_change(prev_ritz, ritz) < options.tolerance)
      break;
    prev_ritz = ritz;
    const Eigen::MatrixXd z = orthonormal_basis(bt);
    q = orthonormal_basis(a * z);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(bt, Eigen::ComputeThinU);
  const Eigen::VectorXd sigma = svd.singularValues().head(k);
  const Eigen::MatrixXd right_vectors = svd.matrixU().leftCols(k);

  out.components = right_vectors.transpose();
  out.singular_values = sigma;
  for (Eigen::Index r = 0; r < out.components.rows(); ++r) {
    Eigen::Index arg = 0;
    out.components.row(r).cwiseAbs().maxCoeff(&arg);
    if (out.components(r, arg) < 0) out.components.row(r) *= -1.0;
  }
  return out;
}

Projection svd_fit(const Eigen::MatrixXd& matrix, int dim, uint64_t seed,
                   const SvdOptions& options) {
  const SparseMatrix sparse = matrix.sparseView();
  return svd_fit(sparse, dim, seed, options);
}

}  // namespace xrouter::clusterkit
