#include "hm/mixture.hpp"

#include <cmath>
#include <stdexcept>

#include "hm/errors.hpp"

namespace hm {

void PredictiveMixture::validate() const {
    if (components.empty()) throw ConfigError("mixture has no components");
    double sum = 0.0;
    for (const auto& c : components) {
        if (!(c.weight > 0.0)) throw ConfigError("mixture weight must be positive");
        if (c.variance < 0.0) throw ConfigError("mixture variance must be nonnegative");
        sum += c.weight;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("mixture weights must sum to 1");
}

Moments mixture_moments(const PredictiveMixture& mix) {
    Moments out;
    for (const auto& c : mix.components) out.mean += c.weight * c.mean;
    for (const auto& c : mix.components) {
        const double dm = c.mean - out.mean;
        out.variance += c.weight * (dm * dm + c.variance);
    }
    if (out.variance < 0.0) {
        if (out.variance < -1e-12)
            throw std::logic_error("mixture variance significantly negative");
        out.variance = 0.0;
    }
    return out;
}

}  // namespace hm
