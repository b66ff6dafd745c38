#pragma once

#include <Eigen/Dense>

namespace hm {

enum class KernelFamily { squared_exponential, matern52 };

/// Stationary covariance kernel with per-dimension lengthscales.
struct KernelSpec {
    KernelFamily family = KernelFamily::squared_exponential;
    Eigen::VectorXd lengthscales;  // d, input units, all > 0
    double signal_variance = 1.0;  // output units^2, > 0
    double nugget = 0.0;           // output units^2, >= 0

    void validate() const;
};

double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b);

/// Training covariance, nugget included on the diagonal.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& points);

/// Cross-covariances k(x, points_i), no nugget.
Eigen::VectorXd kernel_cross(const KernelSpec& spec, const Eigen::MatrixXd& points,
                             const Eigen::VectorXd& x);

}  // namespace hm
