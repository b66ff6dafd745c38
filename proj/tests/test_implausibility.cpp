#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hm/errors.hpp"
#include "hm/implausibility.hpp"
#include "hm/math_util.hpp"
#include "test_util.hpp"

namespace {

hm::PredictiveMixture random_mixture(std::mt19937_64& rng, int n_comp,
                                     bool allow_degenerate = false) {
    std::uniform_real_distribution<double> unif;
    hm::PredictiveMixture mix;
    double wsum = 0.0;
    for (int i = 0; i < n_comp; ++i) {
        hm::MixtureComponent c;
        c.weight = 0.1 + unif(rng);
        c.mean = 4.0 * unif(rng) - 2.0;
        c.variance = allow_degenerate && unif(rng) < 0.3 ? 0.0 : 0.05 + unif(rng);
        wsum += c.weight;
        mix.components.push_back(c);
    }
    for (auto& c : mix.components) c.weight /= wsum;
    return mix;
}

}  // namespace

TEST_CASE("pointwise implausibility equals the defining ratio") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif;
    for (int t = 0; t < 100; ++t) {
        const double mean = 10.0 * unif(rng) - 5.0;
        const double var = unif(rng);
        const hm::UncertaintyBudget budget{0.5 * unif(rng), 0.5 * unif(rng), 3.0};
        const hm::TargetDatum target{10.0 * unif(rng) - 5.0, "y"};
        const double expected = std::abs(target.z - mean) /
                                std::sqrt(var + budget.var_md + budget.var_me);
        CHECK(hm::implausibility_pointwise(mean, var, budget, target) ==
              doctest::Approx(expected).epsilon(1e-14));
    }
    CHECK_THROWS_AS(
        hm::implausibility_pointwise(0.0, -1.0, {0.0, 1.0, 3.0}, {0.0, "y"}),
        hm::DegenerateVarianceError);
    CHECK_THROWS_AS(
        hm::implausibility_pointwise(0.0, 0.0, {0.0, 0.0, 3.0}, {0.0, "y"}),
        hm::DegenerateVarianceError);
}

TEST_CASE("band probability pins the three-sigma mass") {
    // single component centered on the target with unit variance and no
    // extra budget: P{ |z - f|/sd <= 3 } = Phi(3) - Phi(-3)
    hm::PredictiveMixture mix;
    mix.components.push_back({1.0, 0.7, 1.0});
    const double p = hm::prob_nonimplausible(mix, {0.0, 0.0, 3.0}, {0.7, "y"});
    CHECK(p == doctest::Approx(0.997300).epsilon(1e-4));
}

TEST_CASE("band probability matches Monte Carlo of the emulator draw") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif;
    for (int t = 0; t < 12; ++t) {
        const hm::PredictiveMixture mix = random_mixture(rng, 1 + static_cast<int>(3 * unif(rng)));
        const hm::UncertaintyBudget budget{0.3 * unif(rng), 0.3 * unif(rng),
                                           1.0 + 3.0 * unif(rng)};
        const hm::TargetDatum target{2.0 * unif(rng) - 1.0, "y"};
        const double closed = hm::prob_nonimplausible(mix, budget, target);

        const long n = 200000;
        const auto draw = [&](std::mt19937_64& mc_rng) -> double {
            std::uniform_real_distribution<double> u01;
            std::normal_distribution<double> normal;
            double u = u01(mc_rng), cum = 0.0;
            const hm::MixtureComponent* comp = &mix.components.back();
            for (const auto& c : mix.components) {
                cum += c.weight;
                if (u <= cum) {
                    comp = &c;
                    break;
                }
            }
            const double f = comp->mean + std::sqrt(comp->variance) * normal(mc_rng);
            const double v = std::sqrt(comp->variance + budget.var_md + budget.var_me);
            return std::abs(target.z - f) / v <= budget.k ? 1.0 : 0.0;
        };
        const testutil::MeanSe mc = testutil::monte_carlo(draw, n, 1000 + t);
        CHECK(std::abs(closed - mc.mean) <= 3.5 * mc.se + 1e-9);
    }
}

TEST_CASE("degenerate components become band indicators") {
    hm::PredictiveMixture mix;
    mix.components.push_back({0.5, 0.0, 0.0});   // on target: inside
    mix.components.push_back({0.5, 10.0, 0.0});  // far away: outside
    const double p = hm::prob_nonimplausible(mix, {0.0, 1.0, 3.0}, {0.0, "y"});
    CHECK(p == doctest::Approx(0.5));
    // all-degenerate with zero budget is an error
    hm::PredictiveMixture bad;
    bad.components.push_back({1.0, 0.0, 0.0});
    CHECK_THROWS_AS(hm::prob_nonimplausible(bad, {0.0, 0.0, 3.0}, {0.0, "y"}),
                    hm::DegenerateVarianceError);
}

TEST_CASE("second max agrees with a sort oracle") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif;
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + static_cast<int>(6 * unif(rng));
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& x : v) x = 10.0 * unif(rng);
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        CHECK(hm::second_max_implausibility(v) == sorted[sorted.size() - 2]);
    }
    CHECK_THROWS_AS(hm::second_max_implausibility({1.0}), hm::ArityError);
}

TEST_CASE("probabilistic second max: independence oracle and draw ordering") {
    // with one mixture per output and independent draws,
    // P{ I^(2) <= k } = P{ at most one output implausible }
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> unif;
    for (int t = 0; t < 8; ++t) {
        const std::size_t q = 2 + static_cast<std::size_t>(2 * unif(rng));
        std::vector<hm::PredictiveMixture> mixes;
        std::vector<hm::UncertaintyBudget> budgets;
        std::vector<hm::TargetDatum> targets;
        std::vector<double> p_ok;  // per-output band probabilities
        for (std::size_t o = 0; o < q; ++o) {
            mixes.push_back(random_mixture(rng, 2));
            budgets.push_back({0.2 * unif(rng), 0.2 * unif(rng), 3.0});
            budgets.back().k = budgets.front().k;  // shared threshold
            targets.push_back({2.0 * unif(rng) - 1.0, "y" + std::to_string(o)});
            p_ok.push_back(hm::prob_nonimplausible(mixes.back(), budgets.back(),
                                                   targets.back()));
        }
        double expected = 1.0;
        for (double p : p_ok) expected *= p;
        for (std::size_t o = 0; o < q; ++o) {
            double term = 1.0 - p_ok[o];
            for (std::size_t j = 0; j < q; ++j)
                if (j != o) term *= p_ok[j];
            expected += term;
        }
        const int n_draws = 200000;
        const hm::SecondMaxResult res = hm::prob_second_max_nonimplausible(
            mixes, budgets, targets, n_draws, 900 + static_cast<std::uint64_t>(t));
        CHECK(res.order_ok);
        const double se =
            std::sqrt(std::max(expected * (1.0 - expected), 1e-12) / n_draws);
        CHECK(std::abs(res.probability - expected) <= 4.0 * se + 1e-3);
    }
    CHECK_THROWS_AS(hm::prob_second_max_nonimplausible({}, {}, {}, 10, 1), hm::ArityError);
}

TEST_CASE("second max estimates are reproducible for a fixed seed") {
    std::mt19937_64 rng(3);
    std::vector<hm::PredictiveMixture> mixes{random_mixture(rng, 3),
                                             random_mixture(rng, 2)};
    std::vector<hm::UncertaintyBudget> budgets{{0.1, 0.1, 3.0}, {0.0, 0.2, 3.0}};
    std::vector<hm::TargetDatum> targets{{0.3, "a"}, {-0.4, "b"}};
    const auto a = hm::prob_second_max_nonimplausible(mixes, budgets, targets, 5000, 77);
    const auto b = hm::prob_second_max_nonimplausible(mixes, budgets, targets, 5000, 77);
    CHECK(a.probability == b.probability);
}
