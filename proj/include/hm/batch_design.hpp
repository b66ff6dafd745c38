#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hm/criteria.hpp"

namespace hm {

struct SelectionConfig {
    double cutoff_alpha = 0.5;  // fraction of the best score to retain
    int batch_size = 1;
};

/// Samples scoring at least cutoff_alpha * max score. Always contains the
/// top-ranked sample.
std::vector<RankedSample> cutoff_filter(const std::vector<RankedSample>& ranked,
                                        const SelectionConfig& config);

struct MaximinResult {
    std::vector<Eigen::VectorXd> batch;
    /// Set when the cutoff starved the candidate pool and the filter was
    /// relaxed to the top batch_size ranked samples.
    bool relaxed = false;
};

/// Greedy maximin selection seeded at the top-ranked candidate; each later
/// pick maximizes the min Euclidean distance to existing + selected points.
/// Distance ties break by lexicographic point order.
MaximinResult maximin_select(const std::vector<RankedSample>& candidates,
                             const Eigen::MatrixXd& existing, const SelectionConfig& config);

/// cutoff_filter then maximin_select, relaxing the filter if it retains
/// fewer than batch_size candidates.
MaximinResult select_batch(const std::vector<RankedSample>& ranked,
                           const Eigen::MatrixXd& existing, const SelectionConfig& config);

}  // namespace hm
