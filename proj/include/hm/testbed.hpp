#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hm/nroy.hpp"

namespace hm {

/// Franke's bivariate test function on the unit square.
double franke(const Eigen::VectorXd& x);

/// Analytic implausibility on [-20,40]^3 whose three-sigma band forms four
/// blobs on a torus section.
double torus_implausibility(const Eigen::VectorXd& x);

SearchBox torus_box();

/// Deterministic implausibility -> [0,1] sampler objective: 1 on the band
/// I <= k, decaying as 1/(1 + (I-k)) outside. Polynomial tails keep the
/// tempering weights representable far from the band.
double band_score(double implausibility, double k);

struct RandomFunctionSpec {
    int dim = 2;
    std::uint64_t seed = 0;
    int n_seeds = 0;  // 0 means 100 * dim
    double lengthscale_lo = 0.0;
    double lengthscale_hi = 2.0;
    double signal_sd = 10.0;
    double target_quantile = 0.95;
};

/// Random draw from a Matern-5/2 GP prior, evaluated by kriging through its
/// own seed values.
class RandomFunction {
public:
    explicit RandomFunction(const RandomFunctionSpec& spec);

    double operator()(const Eigen::VectorXd& x) const;

    /// Empirical target_quantile of the seed values (type-7 interpolation).
    double target_z() const { return target_z_; }
    const Eigen::MatrixXd& seeds() const { return seeds_; }
    const Eigen::VectorXd& seed_values() const { return values_; }

private:
    Eigen::MatrixXd seeds_;      // n x d
    Eigen::VectorXd values_;     // f at the seeds
    Eigen::VectorXd weights_;    // K^{-1} f
    Eigen::VectorXd lengthscales_;
    double signal_variance_ = 0.0;
    double target_z_ = 0.0;
};

enum class TableInterpolation { nearest, exact };

/// Archive of precomputed simulator runs standing in for an expensive code.
struct TabulatedSimulator {
    Eigen::MatrixXd inputs;   // rows x d, native units
    Eigen::MatrixXd outputs;  // rows x q
    SearchBox input_box;
    TableInterpolation interpolation = TableInterpolation::nearest;
};

/// CSV with d input columns then q output columns, header row required.
TabulatedSimulator load_tabulated(const std::string& path, int input_dim,
                                  TableInterpolation interpolation);
void save_tabulated(const TabulatedSimulator& sim, const std::string& path);

Eigen::VectorXd eval_tabulated(const TabulatedSimulator& sim, const Eigen::VectorXd& x);

}  // namespace hm
