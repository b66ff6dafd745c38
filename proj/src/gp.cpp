#include "hm/gp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>

#include "hm/errors.hpp"

namespace hm {

GpFactorization factorize(const KernelSpec& spec, const Eigen::MatrixXd& inputs,
                          const Eigen::VectorXd& outputs, double mean_offset) {
    spec.validate();
    const Eigen::MatrixXd k = kernel_matrix(spec, inputs);
    const Eigen::Index n = inputs.rows();

    double jitter = 0.0;
    for (;;) {
        Eigen::MatrixXd kj = k;
        if (jitter > 0.0) kj.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(kj);
        if (llt.info() == Eigen::Success) {
            GpFactorization fac;
            fac.chol_lower = llt.matrixL();
            fac.mean_offset = mean_offset;
            fac.jitter = jitter;
            fac.weights = llt.solve((outputs.array() - mean_offset).matrix().eval());
            fac.log_det = 0.0;
            for (Eigen::Index i = 0; i < n; ++i)
                fac.log_det += 2.0 * std::log(fac.chol_lower(i, i));
            return fac;
        }
        if (jitter == 0.0)
            jitter = 1e-10 * spec.signal_variance;
        else if (jitter < 1e-4 * spec.signal_variance)
            jitter *= 10.0;
        else
            throw FactorizationError("covariance factorization failed after max jitter");
    }
}

double log_marginal_likelihood(const TrainingSet& training, const KernelSpec& theta) {
    const GpFactorization fac = factorize(theta, training.inputs, training.outputs);
    const Eigen::Index n = training.size();
    const double quad = training.outputs.dot(fac.weights);
    return -0.5 * quad - 0.5 * fac.log_det -
           0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

GpPrediction gp_predict(const KernelSpec& spec, const Eigen::MatrixXd& inputs,
                        const GpFactorization& fac, const Eigen::VectorXd& x) {
    const Eigen::VectorXd kx = kernel_cross(spec, inputs, x);
    GpPrediction out;
    out.mean = kx.dot(fac.weights) + fac.mean_offset;
    // latent-function variance: prior minus explained, nugget not added back
    const Eigen::VectorXd v =
        fac.chol_lower.triangularView<Eigen::Lower>().solve(kx);
    out.variance = spec.signal_variance - v.squaredNorm();
    if (out.variance < 0.0) out.variance = 0.0;
    return out;
}

}  // namespace hm
