#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hm/implausibility.hpp"
#include "hm/mixture.hpp"
#include "hm/parallel.hpp"

namespace hm {

enum class CriterionId { eci, risk, entropy, lhs };

CriterionId parse_criterion(const std::string& name);
std::string criterion_name(CriterionId id);

struct CriterionInput {
    double mean = 0.0;
    double sigma = 0.0;  // GP predictive sd at x, >= 0
    UncertaintyBudget budget;
    double z = 0.0;
};

struct CriterionScore {
    double value = 0.0;
    CriterionId criterion_id = CriterionId::lhs;
};

struct CriterionOptions {
    /// Evaluate on the moment-matched (m, sigma) of the mixture (default) or
    /// as the weighted average over mixture components.
    bool per_component = false;
    /// Band half-width in the improvement function: full uncertainty model
    /// k*v(x) (default) or GP-only k*sigma(x).
    bool eci_gp_only = false;
};

/// Expected contour improvement. sigma = 0 falls back to the deterministic
/// improvement eps^2 - min((m-z)^2, eps^2).
CriterionScore eci(const CriterionInput& c, bool gp_only_band = false);

/// Expected one-sided misclassification loss; sign(0) := +1.
CriterionScore expected_risk(const CriterionInput& c);

/// Absolute entropy mass of the predictive density within k predictive
/// standard deviations of the target.
CriterionScore entropic_profile(const CriterionInput& c);

struct RankedSample {
    Eigen::VectorXd point;
    CriterionScore score;
};

/// Scores every sample and sorts descending, ties broken by lexicographic
/// point order. The lhs criterion scores everything 1.0.
std::vector<RankedSample> rank_samples(CriterionId id,
                                       const std::vector<Eigen::VectorXd>& points,
                                       const std::vector<PredictiveMixture>& mixes,
                                       const UncertaintyBudget& budget, double z,
                                       const CriterionOptions& options = {},
                                       ExecMode exec = default_exec());

}  // namespace hm
