#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace mfss {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

inline void symmetrize(Mat& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = j + 1; i < m.rows(); ++i) {
      const double avg = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = avg;
      m(j, i) = avg;
    }
  }
}

// Elementwise |a - b| / max(1, |a|, |b|), maximised over all entries.
// NaN entries in both inputs at the same position are skipped.
inline double max_rel_diff(const Mat& a, const Mat& b) {
  double worst = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      const double x = a(i, j);
      const double y = b(i, j);
      if (std::isnan(x) && std::isnan(y)) continue;
      if (std::isnan(x) || std::isnan(y)) return INFINITY;
      const double scale = std::max({1.0, std::abs(x), std::abs(y)});
      worst = std::max(worst, std::abs(x - y) / scale);
    }
  }
  return worst;
}

inline IndexList iota_list(Index first, Index count) {
  IndexList out(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = first + i;
  return out;
}

// Moore-Penrose pseudo-inverse of a symmetric PSD matrix applied to a vector.
// Eigenvalues below rel_tol * max eigenvalue are treated as zero. Returns the
// number of eigen-directions dropped through `dropped` when non-null.
Vec psd_pinv_solve(const Mat& p, const Vec& rhs, double rel_tol = 1e-9,
                   Index* dropped = nullptr);

// Symmetric square root factor L with L L' = m for a PSD matrix (eigen based,
// tolerant of exact zeros).
Mat psd_sqrt(const Mat& m);

}  // namespace mfss
