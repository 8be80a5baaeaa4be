#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <stdexcept>

namespace lrfs {

/// Unscented sigma-point set: 2d+1 points with matching weights.
template <typename Scalar = double>
struct SigmaPoints {
    Eigen::MatrixX<Scalar> points;   // d x (2d+1)
    Eigen::VectorX<Scalar> weights;  // 2d+1, sums to one
};

/// Standard unscented points with spread kappa = 3 - d (the default keeps
/// d + kappa = 3 for every dimension). Center weight kappa/(d+kappa) may be
/// negative for d > 3.
template <typename Scalar>
SigmaPoints<Scalar> sigma_points(const Eigen::VectorX<Scalar>& mean,
                                 const Eigen::MatrixX<Scalar>& cov) {
    const Eigen::Index d = mean.size();
    const Scalar kappa = Scalar(3) - Scalar(d);
    const Scalar scale = Scalar(d) + kappa;  // = 3

    Eigen::LLT<Eigen::MatrixX<Scalar>> llt((scale * cov).eval());
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("sigma_points: covariance not positive definite");
    Eigen::MatrixX<Scalar> sqrt = llt.matrixL();

    SigmaPoints<Scalar> sp;
    sp.points.resize(d, 2 * d + 1);
    sp.weights.resize(2 * d + 1);
    sp.points.col(0) = mean;
    sp.weights(0) = kappa / scale;
    for (Eigen::Index i = 0; i < d; ++i) {
        sp.points.col(1 + i) = mean + sqrt.col(i);
        sp.points.col(1 + d + i) = mean - sqrt.col(i);
        sp.weights(1 + i) = Scalar(0.5) / scale;
        sp.weights(1 + d + i) = Scalar(0.5) / scale;
    }
    return sp;
}

}  // namespace lrfs
