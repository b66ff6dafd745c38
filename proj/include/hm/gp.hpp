#pragma once

#include <Eigen/Dense>

#include "hm/kernel.hpp"
#include "hm/training.hpp"

namespace hm {

/// Cached Cholesky factorization of the training covariance for one
/// hyperparameter vector, plus the solved weights K^{-1} y.
struct GpFactorization {
    Eigen::MatrixXd chol_lower;  // L with L L^T = K + jitter I
    Eigen::VectorXd weights;     // K^{-1} (y - mean_offset)
    double mean_offset = 0.0;    // subtracted from outputs before solving
    double jitter = 0.0;         // diagonal term actually applied
    double log_det = 0.0;        // log |K + jitter I|
};

/// Factorize kernel_matrix(spec, inputs). On failure, escalates jitter from
/// 1e-10 * signal_variance by factors of 10 up to 1e-4 * signal_variance,
/// then throws FactorizationError.
GpFactorization factorize(const KernelSpec& spec, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& outputs, double mean_offset = 0.0);

/// log p(y | X, theta) for the zero-mean GP.
double log_marginal_likelihood(const TrainingSet& training, const KernelSpec& theta);

/// Posterior mean/variance at x for one hyperparameter vector. The variance
/// is the latent-function variance (training nugget excluded) clamped at 0.
struct GpPrediction {
    double mean = 0.0;
    double variance = 0.0;
};

GpPrediction gp_predict(const KernelSpec& spec, const Eigen::MatrixXd& inputs,
                        const GpFactorization& fac, const Eigen::VectorXd& x);

}  // namespace hm
