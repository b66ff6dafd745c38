#include "hm/batch_design.hpp"

#include <algorithm>
#include <limits>

#include "hm/errors.hpp"

namespace hm {

namespace {

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (a[j] < b[j]) return true;
        if (a[j] > b[j]) return false;
    }
    return false;
}

}  // namespace

std::vector<RankedSample> cutoff_filter(const std::vector<RankedSample>& ranked,
                                        const SelectionConfig& config) {
    if (ranked.empty()) throw ConfigError("cutoff_filter: empty ranked list");
    if (!(config.cutoff_alpha > 0.0 && config.cutoff_alpha <= 1.0))
        throw ConfigError("cutoff_alpha must be in (0,1]");
    const double threshold = config.cutoff_alpha * ranked.front().score.value;
    std::vector<RankedSample> out;
    for (const auto& rs : ranked)
        if (rs.score.value >= threshold) out.push_back(rs);
    return out;
}

MaximinResult maximin_select(const std::vector<RankedSample>& candidates,
                             const Eigen::MatrixXd& existing, const SelectionConfig& config) {
    if (candidates.empty()) throw InsufficientCandidatesError("no candidates");
    if (config.batch_size > static_cast<int>(candidates.size()))
        throw InsufficientCandidatesError("batch_size exceeds candidate count");

    const std::size_t m = candidates.size();
    // min distance of each candidate to existing ∪ selected so far
    std::vector<double> min_dist(m, std::numeric_limits<double>::infinity());
    std::vector<bool> taken(m, false);
    for (std::size_t i = 0; i < m; ++i)
        for (Eigen::Index r = 0; r < existing.rows(); ++r) {
            const double d = (candidates[i].point - existing.row(r).transpose()).norm();
            min_dist[i] = std::min(min_dist[i], d);
        }

    MaximinResult out;
    auto take = [&](std::size_t idx) {
        taken[idx] = true;
        out.batch.push_back(candidates[idx].point);
        for (std::size_t i = 0; i < m; ++i) {
            if (taken[i]) continue;
            const double d = (candidates[i].point - candidates[idx].point).norm();
            min_dist[i] = std::min(min_dist[i], d);
        }
    };

    take(0);  // seed: the top-ranked candidate
    while (static_cast<int>(out.batch.size()) < config.batch_size) {
        std::size_t best = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (taken[i]) continue;
            if (best == m || min_dist[i] > min_dist[best] ||
                (min_dist[i] == min_dist[best] &&
                 lex_less(candidates[i].point, candidates[best].point)))
                best = i;
        }
        take(best);
    }
    return out;
}

MaximinResult select_batch(const std::vector<RankedSample>& ranked,
                           const Eigen::MatrixXd& existing, const SelectionConfig& config) {
    std::vector<RankedSample> candidates = cutoff_filter(ranked, config);
    bool relaxed = false;
    if (static_cast<int>(candidates.size()) < config.batch_size) {
        // cutoff starved the pool: fall back to the top batch_size ranked
        candidates.assign(ranked.begin(),
                          ranked.begin() + std::min<std::size_t>(ranked.size(),
                                                                 config.batch_size));
        relaxed = true;
    }
    MaximinResult out = maximin_select(candidates, existing, config);
    out.relaxed = relaxed;
    return out;
}

}  // namespace hm
