#include "hm/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hm/errors.hpp"
#include "hm/math_util.hpp"

namespace hm {

double crps_gaussian_helper(double m, double var) {
    if (var == 0.0) return std::abs(m);
    const double sigma = std::sqrt(var);
    const double t = m / sigma;
    return 2.0 * sigma * norm_pdf(t) + m * (2.0 * norm_cdf(t) - 1.0);
}

double crps_mixture(const PredictiveMixture& mix, double z) {
    mix.validate();
    double score = 0.0;
    for (const auto& c : mix.components)
        score += c.weight * crps_gaussian_helper(z - c.mean, c.variance);
    for (const auto& ck : mix.components)
        for (const auto& cl : mix.components)
            score -= 0.5 * ck.weight * cl.weight *
                     crps_gaussian_helper(ck.mean - cl.mean, ck.variance + cl.variance);
    return std::max(score, 0.0);
}

WaveMetrics wave_metrics(const std::vector<PredictiveMixture>& mixes,
                         const TargetDatum& target, ExecMode exec) {
    const std::size_t n = mixes.size();
    if (n == 0) throw DegenerateVarianceError("wave metrics need at least one sample");
    std::vector<double> sd(n), crps(n);
    for_each_index(n, exec, [&](std::size_t i) {
        sd[i] = std::sqrt(mixture_moments(mixes[i]).variance);
        crps[i] = crps_mixture(mixes[i], target.z);
    });
    WaveMetrics out;
    out.max_predicted_error = *std::max_element(sd.begin(), sd.end());
    std::sort(crps.begin(), crps.end());
    out.median_crps = n % 2 == 1 ? crps[n / 2] : 0.5 * (crps[n / 2 - 1] + crps[n / 2]);
    return out;
}

}  // namespace hm
