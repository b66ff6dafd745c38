#include "hm/ensemble.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "hm/errors.hpp"
#include "hm/math_util.hpp"

namespace hm {

void PosteriorEnsemble::validate() const {
    if (samples.empty()) throw ConfigError("ensemble has no samples");
    double sum = 0.0;
    for (const auto& s : samples) sum += s.weight;
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("ensemble weights must sum to 1");
}

namespace {

struct LogPosterior {
    const TrainingSet& training;   // outputs already centered
    const HyperPrior& prior;
    double signal_log_median;

    // state: [log l_1 .. log l_d, log sv]
    double operator()(const Eigen::VectorXd& state) const {
        const Eigen::Index d = training.dim();
        KernelSpec spec;
        spec.family = prior.family;
        spec.lengthscales = state.head(d).array().exp();
        spec.signal_variance = std::exp(state[d]);
        spec.nugget = prior.nugget;

        double lp = 0.0;
        const double mu_l = std::log(prior.lengthscale_median);
        for (Eigen::Index j = 0; j < d; ++j) {
            const double u = (state[j] - mu_l) / prior.lengthscale_log_sd;
            lp += -0.5 * u * u;
        }
        const double us = (state[d] - signal_log_median) / prior.signal_log_sd;
        lp += -0.5 * us * us;

        try {
            lp += log_marginal_likelihood(training, spec);
        } catch (const FactorizationError&) {
            return -std::numeric_limits<double>::infinity();
        }
        return lp;
    }
};

}  // namespace

PosteriorEnsemble sample_hyperposterior(const TrainingSet& training,
                                        const HyperPrior& prior, int n_samples,
                                        std::uint64_t seed, const McmcConfig& mcmc) {
    if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
    training.validate();

    const Eigen::Index d = training.dim();
    const double y_mean = training.outputs.mean();

    TrainingSet centered = training;
    centered.outputs.array() -= y_mean;

    double sig_med = prior.signal_median;
    if (sig_med <= 0.0) {
        const double n = static_cast<double>(training.size());
        sig_med = n > 1 ? centered.outputs.squaredNorm() / (n - 1.0) : 1.0;
        if (sig_med <= 0.0) sig_med = 1.0;
    }
    const LogPosterior target{centered, prior, std::log(sig_med)};
    const double mu_l = std::log(prior.lengthscale_median);

    PosteriorEnsemble out;
    out.training = training;
    out.samples.reserve(static_cast<std::size_t>(n_samples));

    // one independent chain per draw, each started from an overdispersed
    // hyperprior sample: the hyperposterior is often multimodal at small n
    // (short- vs long-lengthscale explanations of the same data), and a
    // single chain sat in one mode understates code uncertainty
    for (int c = 0; c < n_samples; ++c) {
        std::mt19937_64 rng(mix_seed(seed, 0xC7A1u, static_cast<std::uint64_t>(c)));
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> unif;

        Eigen::VectorXd state(d + 1);
        double lp = -std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt < 20 && !std::isfinite(lp); ++attempt) {
            for (Eigen::Index j = 0; j < d; ++j)
                state[j] = mu_l + prior.lengthscale_log_sd * normal(rng);
            state[d] = std::log(sig_med) + prior.signal_log_sd * normal(rng);
            lp = target(state);
        }
        if (!std::isfinite(lp)) {
            state.head(d).setConstant(mu_l);
            state[d] = std::log(sig_med);
            lp = target(state);
        }
        if (!std::isfinite(lp))
            throw InitializationError("non-finite log-posterior at initialization");

        double step = mcmc.initial_step;
        const int total = mcmc.burn_in + std::max(1, mcmc.thin);
        for (int it = 0; it < total; ++it) {
            Eigen::VectorXd prop = state;
            for (Eigen::Index j = 0; j < state.size(); ++j)
                prop[j] += step * normal(rng);
            const double lp_prop = target(prop);
            const bool accept =
                std::isfinite(lp_prop) && std::log(unif(rng)) < lp_prop - lp;
            if (accept) {
                state = prop;
                lp = lp_prop;
            }
            if (it < mcmc.burn_in) {
                // Robbins-Monro scale adaptation toward the target acceptance rate
                const double gamma = 1.0 / std::sqrt(1.0 + it);
                step *= std::exp(gamma * ((accept ? 1.0 : 0.0) - mcmc.target_accept));
            }
        }

        HyperSample hs;
        hs.theta.family = prior.family;
        hs.theta.lengthscales = state.head(d).array().exp();
        hs.theta.signal_variance = std::exp(state[d]);
        hs.theta.nugget = prior.nugget;
        hs.weight = 1.0 / static_cast<double>(n_samples);
        hs.factorization =
            factorize(hs.theta, training.inputs, training.outputs, y_mean);
        out.samples.push_back(std::move(hs));
    }
    out.validate();
    return out;
}

PredictiveMixture predict(const PosteriorEnsemble& ensemble, const Eigen::VectorXd& x) {
    PredictiveMixture mix;
    mix.components.reserve(ensemble.samples.size());
    for (const auto& s : ensemble.samples) {
        const GpPrediction p =
            gp_predict(s.theta, ensemble.training.inputs, s.factorization, x);
        mix.components.push_back({s.weight, p.mean, p.variance});
    }
    return mix;
}

}  // namespace hm
