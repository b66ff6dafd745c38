#include "hm/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hm/errors.hpp"
#include "hm/math_util.hpp"

namespace hm {

CriterionId parse_criterion(const std::string& name) {
    if (name == "eci") return CriterionId::eci;
    if (name == "risk") return CriterionId::risk;
    if (name == "entropy") return CriterionId::entropy;
    if (name == "lhs") return CriterionId::lhs;
    throw ConfigError("criterion: unknown name '" + name + "'");
}

std::string criterion_name(CriterionId id) {
    switch (id) {
        case CriterionId::eci: return "eci";
        case CriterionId::risk: return "risk";
        case CriterionId::entropy: return "entropy";
        case CriterionId::lhs: return "lhs";
    }
    return "?";
}

CriterionScore eci(const CriterionInput& c, bool gp_only_band) {
    if (c.sigma < 0.0) throw DegenerateVarianceError("negative sigma");
    const double var_total = c.sigma * c.sigma + c.budget.var_md + c.budget.var_me;
    const double eps = c.budget.k * (gp_only_band ? c.sigma : std::sqrt(var_total));
    if (c.sigma == 0.0) {
        if (eps == 0.0) throw DegenerateVarianceError("sigma and band both zero");
        const double miss = (c.mean - c.z) * (c.mean - c.z);
        return {eps * eps - std::min(miss, eps * eps), CriterionId::eci};
    }
    const double z1 = (c.z - c.mean - eps) / c.sigma;
    const double z2 = (c.z - c.mean + eps) / c.sigma;
    const double dm = c.mean - c.z;
    double value = (eps * eps - dm * dm - c.sigma * c.sigma) * (norm_cdf(z2) - norm_cdf(z1));
    value += c.sigma * c.sigma * (z2 * norm_pdf(z2) - z1 * norm_pdf(z1));
    value += 2.0 * dm * c.sigma * (norm_pdf(z2) - norm_pdf(z1));
    if (value < 0.0) {
        if (value < -1e-9) throw std::logic_error("eci significantly negative");
        value = 0.0;
    }
    return {value, CriterionId::eci};
}

CriterionScore expected_risk(const CriterionInput& c) {
    if (c.sigma < 0.0) throw DegenerateVarianceError("negative sigma");
    if (c.sigma == 0.0) return {0.0, CriterionId::risk};
    const double zbar = (c.z - c.mean) / c.sigma;
    const double s = zbar >= 0.0 ? 1.0 : -1.0;  // sign(0) := +1
    double value = c.sigma * (-s * zbar * norm_cdf(-s * zbar) + norm_pdf(zbar));
    if (value < 0.0) value = 0.0;
    return {value, CriterionId::risk};
}

CriterionScore entropic_profile(const CriterionInput& c) {
    if (!(c.sigma > 0.0)) throw DegenerateVarianceError("entropic profile needs sigma > 0");
    // band half-width is k emulator standard deviations
    const double z1 = (c.z - c.mean - c.budget.k * c.sigma) / c.sigma;
    const double z2 = (c.z - c.mean + c.budget.k * c.sigma) / c.sigma;
    const double value =
        std::abs((std::log(std::sqrt(2.0 * std::numbers::pi) * c.sigma) + 0.5) *
                     (norm_cdf(z2) - norm_cdf(z1)) -
                 0.5 * (z2 * norm_pdf(z2) - z1 * norm_pdf(z1)));
    return {value, CriterionId::entropy};
}

namespace {

CriterionScore score_one(CriterionId id, const CriterionInput& c,
                         const CriterionOptions& options) {
    switch (id) {
        case CriterionId::eci: return eci(c, options.eci_gp_only);
        case CriterionId::risk: return expected_risk(c);
        case CriterionId::entropy: return entropic_profile(c);
        case CriterionId::lhs: return {1.0, CriterionId::lhs};
    }
    throw ConfigError("criterion: bad id");
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (a[j] < b[j]) return true;
        if (a[j] > b[j]) return false;
    }
    return false;
}

}  // namespace

std::vector<RankedSample> rank_samples(CriterionId id,
                                       const std::vector<Eigen::VectorXd>& points,
                                       const std::vector<PredictiveMixture>& mixes,
                                       const UncertaintyBudget& budget, double z,
                                       const CriterionOptions& options, ExecMode exec) {
    if (points.empty()) throw ConfigError("rank_samples: empty sample list");
    if (points.size() != mixes.size())
        throw ConfigError("rank_samples: points/mixes size mismatch");

    std::vector<RankedSample> out(points.size());
    for_each_index(points.size(), exec, [&](std::size_t i) {
        RankedSample rs;
        rs.point = points[i];
        if (id == CriterionId::lhs) {
            rs.score = {1.0, CriterionId::lhs};
        } else if (options.per_component) {
            double acc = 0.0;
            for (const auto& comp : mixes[i].components) {
                CriterionInput ci{comp.mean, std::sqrt(comp.variance), budget, z};
                acc += comp.weight * score_one(id, ci, options).value;
            }
            rs.score = {acc, id};
        } else {
            const Moments mom = mixture_moments(mixes[i]);
            CriterionInput ci{mom.mean, std::sqrt(mom.variance), budget, z};
            rs.score = score_one(id, ci, options);
        }
        out[i] = std::move(rs);
    });

    std::stable_sort(out.begin(), out.end(), [](const RankedSample& a, const RankedSample& b) {
        if (a.score.value != b.score.value) return a.score.value > b.score.value;
        return lex_less(a.point, b.point);
    });
    return out;
}

}  // namespace hm
