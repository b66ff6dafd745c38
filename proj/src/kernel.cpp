#include "hm/kernel.hpp"

#include <cmath>

#include "hm/errors.hpp"

namespace hm {

void KernelSpec::validate() const {
    if (lengthscales.size() < 1) throw ConfigError("kernel: empty lengthscales");
    if ((lengthscales.array() <= 0.0).any())
        throw ConfigError("kernel: lengthscales must be positive");
    if (!(signal_variance > 0.0)) throw ConfigError("kernel: signal_variance must be positive");
    if (nugget < 0.0) throw ConfigError("kernel: nugget must be nonnegative");
}

namespace {

double scaled_sq_dist(const KernelSpec& spec, const Eigen::VectorXd& a,
                      const Eigen::VectorXd& b) {
    double r2 = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double t = (a[j] - b[j]) / spec.lengthscales[j];
        r2 += t * t;
    }
    return r2;
}

double corr_from_r2(KernelFamily family, double r2) {
    switch (family) {
        case KernelFamily::squared_exponential:
            return std::exp(-0.5 * r2);
        case KernelFamily::matern52: {
            const double r = std::sqrt(r2);
            const double s = std::sqrt(5.0) * r;
            return (1.0 + s + 5.0 * r2 / 3.0) * std::exp(-s);
        }
    }
    return 0.0;
}

}  // namespace

double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b) {
    return spec.signal_variance * corr_from_r2(spec.family, scaled_sq_dist(spec, a, b));
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = spec.signal_variance + spec.nugget;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = kernel_value(spec, points.row(i), points.row(j));
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

Eigen::VectorXd kernel_cross(const KernelSpec& spec, const Eigen::MatrixXd& points,
                             const Eigen::VectorXd& x) {
    const Eigen::Index n = points.rows();
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) k[i] = kernel_value(spec, points.row(i), x);
    return k;
}

}  // namespace hm
