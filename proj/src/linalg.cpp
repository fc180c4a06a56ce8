#include "mfss/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace mfss {

Vec psd_pinv_solve(const Mat& p, const Vec& rhs, double rel_tol, Index* dropped) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(p);
  const Vec& lam = eig.eigenvalues();
  const Mat& u = eig.eigenvectors();
  const double top = lam.size() > 0 ? lam.cwiseAbs().maxCoeff() : 0.0;
  const double cut = rel_tol * top;
  Vec coef = u.transpose() * rhs;
  Index n_drop = 0;
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > cut) {
      coef(i) /= lam(i);
    } else {
      coef(i) = 0.0;
      ++n_drop;
    }
  }
  if (dropped) *dropped = n_drop;
  return u * coef;
}

Mat psd_sqrt(const Mat& m) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Mat> eig(m);
  const Vec root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace mfss
