#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace ragkit {

/// Log-density of N(mean, cov) at x. cov must be symmetric positive definite.
template <typename DerivedX, typename DerivedM, typename DerivedC>
typename DerivedX::Scalar gaussian_log_density(const Eigen::MatrixBase<DerivedX>& x,
                                               const Eigen::MatrixBase<DerivedM>& mean,
                                               const Eigen::MatrixBase<DerivedC>& cov) {
  using Scalar = typename DerivedX::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::LLT<Mat> llt(cov);
  const auto diff = (x - mean).eval();
  const Scalar maha = llt.matrixL().solve(diff).squaredNorm();
  const Scalar log_det = Scalar(2) * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const Scalar d = static_cast<Scalar>(x.size());
  return Scalar(-0.5) * (d * std::log(Scalar(2) * std::numbers::pi_v<Scalar>) + log_det + maha);
}

/// Gradient of ln N(x; mean, cov) with respect to the mean: cov^{-1} (x - mean).
template <typename DerivedX, typename DerivedM, typename DerivedC>
auto gaussian_mean_gradient(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedM>& mean,
                            const Eigen::MatrixBase<DerivedC>& cov) {
  using Scalar = typename DerivedX::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  return Eigen::LLT<Mat>(cov).solve((x - mean).eval()).eval();
}

/// Cached Cholesky factor for repeated density evaluations of one law.
template <typename Scalar>
class GaussianEvaluator {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  GaussianEvaluator(const Vec& mean, const Mat& cov) : mean_(mean), llt_(cov) {
    const Scalar log_det = Scalar(2) * llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
    norm_ = Scalar(-0.5) * (static_cast<Scalar>(mean.size()) *
                                std::log(Scalar(2) * std::numbers::pi_v<Scalar>) +
                            log_det);
  }

  template <typename Derived>
  Scalar log_density(const Eigen::MatrixBase<Derived>& x) const {
    return norm_ - Scalar(0.5) * llt_.matrixL().solve((x - mean_).eval()).squaredNorm();
  }

 private:
  Vec mean_;
  Eigen::LLT<Mat> llt_;
  Scalar norm_;
};

/// Symmetrizes cov and raises every eigenvalue to at least floor.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> floor_eigenvalues(
    const Eigen::MatrixBase<Derived>& cov, typename Derived::Scalar floor) {
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Mat sym = (cov + cov.transpose()) / 2;
  const Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  if (eig.eigenvalues().minCoeff() >= floor) return sym;
  const auto lambda = eig.eigenvalues().cwiseMax(floor);
  Mat out = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  return (out + out.transpose()) / 2;
}

}  // namespace ragkit
