#pragma once

#include <vector>

#include "hm/implausibility.hpp"
#include "hm/mixture.hpp"
#include "hm/parallel.hpp"

namespace hm {

/// A(m, var) = 2 sigma phi(m/sigma) + m (2 Phi(m/sigma) - 1); |m| at var = 0.
double crps_gaussian_helper(double m, double var);

/// CRPS of a Gaussian mixture against the observation z; same units as the
/// simulator output.
double crps_mixture(const PredictiveMixture& mix, double z);

struct WaveMetrics {
    double max_predicted_error = 0.0;  // max mixture predictive sd
    double median_crps = 0.0;
};

/// Diagnostics over a set of per-sample predictive mixtures for one output.
WaveMetrics wave_metrics(const std::vector<PredictiveMixture>& mixes,
                         const TargetDatum& target, ExecMode exec = default_exec());

}  // namespace hm
