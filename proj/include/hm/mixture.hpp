#pragma once

#include <vector>

namespace hm {

struct MixtureComponent {
    double weight = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

/// Weighted Gaussian mixture predictive distribution at a single point.
struct PredictiveMixture {
    std::vector<MixtureComponent> components;

    void validate() const;  // weights sum to 1 within 1e-12, variances >= 0
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Law-of-total-variance moments of the mixture. Small negative variances
/// (> -1e-12) are clamped to 0; anything larger is a hard failure.
Moments mixture_moments(const PredictiveMixture& mix);

}  // namespace hm
