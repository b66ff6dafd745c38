#include "hm/implausibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hm/errors.hpp"
#include "hm/math_util.hpp"

namespace hm {

double implausibility_pointwise(double mean, double variance,
                                const UncertaintyBudget& budget,
                                const TargetDatum& target) {
    if (variance < 0.0) throw DegenerateVarianceError("negative predictive variance");
    const double total = variance + budget.var_md + budget.var_me;
    if (!(total > 0.0)) throw DegenerateVarianceError("zero total variance");
    return std::abs(target.z - mean) / std::sqrt(total);
}

namespace {

double component_band_prob(const MixtureComponent& c, const UncertaintyBudget& budget,
                           double z) {
    const double v2 = c.variance + budget.var_md + budget.var_me;
    const double sigma = std::sqrt(c.variance);
    if (sigma == 0.0) {
        if (!(v2 > 0.0)) throw DegenerateVarianceError("component with zero total variance");
        return std::abs(z - c.mean) <= budget.k * std::sqrt(v2) ? 1.0 : 0.0;
    }
    const double band = budget.k * std::sqrt(v2);
    return norm_cdf((z - c.mean + band) / sigma) - norm_cdf((z - c.mean - band) / sigma);
}

}  // namespace

double prob_nonimplausible(const PredictiveMixture& mix, const UncertaintyBudget& budget,
                           const TargetDatum& target) {
    mix.validate();
    double p = 0.0;
    for (const auto& c : mix.components)
        p += c.weight * component_band_prob(c, budget, target.z);
    return std::clamp(p, 0.0, 1.0);
}

double second_max_implausibility(const std::vector<double>& values) {
    if (values.size() < 2)
        throw ArityError("second max implausibility needs at least 2 outputs");
    double first = -std::numeric_limits<double>::infinity();
    double second = first;
    for (double v : values) {
        if (v > first) {
            second = first;
            first = v;
        } else if (v > second) {
            second = v;
        }
    }
    return second;
}

SecondMaxResult prob_second_max_nonimplausible(const std::vector<PredictiveMixture>& mixes,
                                               const std::vector<UncertaintyBudget>& budgets,
                                               const std::vector<TargetDatum>& targets,
                                               int n_draws, std::uint64_t seed) {
    if (mixes.size() < 2) throw ArityError("second max needs at least 2 outputs");
    if (mixes.size() != budgets.size() || mixes.size() != targets.size())
        throw ArityError("mixes/budgets/targets size mismatch");
    if (n_draws < 1) throw ConfigError("n_draws must be >= 1");
    for (const auto& m : mixes) m.validate();

    const std::size_t q = mixes.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif;
    std::normal_distribution<double> normal;

    std::vector<double> imp(q);
    long long inside = 0;
    bool order_ok = true;
    for (int t = 0; t < n_draws; ++t) {
        for (std::size_t o = 0; o < q; ++o) {
            // pick a mixture component, then draw from it
            const double u = unif(rng);
            double acc = 0.0;
            const MixtureComponent* comp = &mixes[o].components.back();
            for (const auto& c : mixes[o].components) {
                acc += c.weight;
                if (u <= acc) {
                    comp = &c;
                    break;
                }
            }
            const double sigma = std::sqrt(comp->variance);
            const double f = comp->mean + sigma * normal(rng);
            const double v2 = comp->variance + budgets[o].var_md + budgets[o].var_me;
            if (!(v2 > 0.0))
                throw DegenerateVarianceError("component with zero total variance");
            imp[o] = std::abs(targets[o].z - f) / std::sqrt(v2);
        }
        const double i2 = second_max_implausibility(imp);
        const double i1 = *std::max_element(imp.begin(), imp.end());
        if (i2 > i1) order_ok = false;
        if (i2 <= budgets.front().k) ++inside;
    }
    return {static_cast<double>(inside) / static_cast<double>(n_draws), order_ok};
}

}  // namespace hm
