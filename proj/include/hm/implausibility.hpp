#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hm/mixture.hpp"

namespace hm {

/// Model-discrepancy and measurement-error variances plus the
/// standard-deviation threshold (three-sigma rule by default).
struct UncertaintyBudget {
    double var_md = 0.0;
    double var_me = 0.0;
    double k = 3.0;
};

struct TargetDatum {
    double z = 0.0;
    std::string output_id = "y";
};

/// |z - m| / sqrt(var + var_md + var_me).
double implausibility_pointwise(double mean, double variance,
                                const UncertaintyBudget& budget,
                                const TargetDatum& target);

/// P{ I_GP(x) <= k } under the mixture, averaged per component. A component
/// with zero predictive sd contributes an indicator of the band.
double prob_nonimplausible(const PredictiveMixture& mix, const UncertaintyBudget& budget,
                           const TargetDatum& target);

/// Second-largest entry; needs at least 2 outputs.
double second_max_implausibility(const std::vector<double>& values);

struct SecondMaxResult {
    double probability = 0.0;
    /// true iff I^(2) <= I^(1) held on every draw (always true; exposed for
    /// the multi-output diagnostics).
    bool order_ok = true;
};

/// Monte Carlo estimate of P{ I^(2)(x) <= k } with independent per-output
/// emulator draws; reproducible for a fixed seed.
SecondMaxResult prob_second_max_nonimplausible(const std::vector<PredictiveMixture>& mixes,
                                               const std::vector<UncertaintyBudget>& budgets,
                                               const std::vector<TargetDatum>& targets,
                                               int n_draws, std::uint64_t seed);

}  // namespace hm
