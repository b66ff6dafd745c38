#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hm/gp.hpp"
#include "hm/kernel.hpp"
#include "hm/mixture.hpp"
#include "hm/training.hpp"

namespace hm {

struct HyperSample {
    KernelSpec theta;
    double weight = 0.0;
    GpFactorization factorization;
};

/// Posterior draws of the GP hyperparameters with their trained
/// factorizations. Immutable after fitting; safe for concurrent prediction.
struct PosteriorEnsemble {
    std::vector<HyperSample> samples;
    TrainingSet training;

    void validate() const;  // weights sum to 1 within 1e-12, at least one sample
};

/// Weakly informative hyperprior: independent log-normals on lengthscales
/// and signal variance. signal_median <= 0 means "use the sample variance
/// of the outputs".
struct HyperPrior {
    double lengthscale_median = 0.5;
    double lengthscale_log_sd = 1.0;
    double signal_median = -1.0;
    double signal_log_sd = 1.0;
    double nugget = 1e-8;
    KernelFamily family = KernelFamily::squared_exponential;
};

struct McmcConfig {
    int burn_in = 300;
    int thin = 10;
    double initial_step = 0.3;
    double target_accept = 0.25;
};

/// Adaptive random-walk Metropolis in log-lengthscale / log-signal-variance
/// space: one independent chain per draw, each started from an overdispersed
/// hyperprior sample so multiple posterior modes are represented. Returns
/// n_samples draws with equal weights 1/n_samples. Outputs are centered by
/// their sample mean before fitting.
PosteriorEnsemble sample_hyperposterior(const TrainingSet& training,
                                        const HyperPrior& prior, int n_samples,
                                        std::uint64_t seed,
                                        const McmcConfig& mcmc = {});

/// Mixture predictive distribution at x: one Gaussian per posterior draw.
PredictiveMixture predict(const PosteriorEnsemble& ensemble, const Eigen::VectorXd& x);

}  // namespace hm
