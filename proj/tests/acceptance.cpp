// End-to-end acceptance gate. Each numbered check prints exactly one
// PASS/FAIL line; the process exits nonzero if any check fails. Oracles are
// independent re-computations (quadrature, Monte Carlo, exhaustive search),
// not the library's own closed forms.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hm/batch_design.hpp"
#include "hm/criteria.hpp"
#include "hm/design.hpp"
#include "hm/ensemble.hpp"
#include "hm/errors.hpp"
#include "hm/implausibility.hpp"
#include "hm/math_util.hpp"
#include "hm/nroy.hpp"
#include "hm/orchestrator.hpp"
#include "hm/report.hpp"
#include "hm/scoring.hpp"
#include "hm/testbed.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, double seconds,
            const std::string& detail = "") {
    std::printf("%s: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), seconds,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

struct RandomCriterionConfig {
    hm::CriterionInput c;
};

RandomCriterionConfig draw_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif;
    RandomCriterionConfig out;
    out.c.mean = 6.0 * unif(rng) - 3.0;
    out.c.sigma = 0.1 + 2.0 * unif(rng);
    out.c.z = 6.0 * unif(rng) - 3.0;
    out.c.budget = {0.5 * unif(rng), 0.5 * unif(rng), 1.0 + 3.0 * unif(rng)};
    return out;
}

double eci_quadrature(const hm::CriterionInput& c, bool gp_only) {
    const double v2 = c.sigma * c.sigma + c.budget.var_md + c.budget.var_me;
    const double eps = c.budget.k * (gp_only ? c.sigma : std::sqrt(v2));
    // clip the band to the density's effective support (outside +-9 sigma the
    // contribution is < 1e-15) and force subdivision around the density peak:
    // the band can be much wider than sigma and plain adaptive quadrature
    // would step over the spike or a tail sliver at the band edge
    const double lo = std::max(c.z - eps, c.mean - 9.0 * c.sigma);
    const double hi = std::min(c.z + eps, c.mean + 9.0 * c.sigma);
    if (hi <= lo) return 0.0;
    return testutil::integrate_piecewise(
        [&](double f) {
            const double dev = f - c.z;
            return (eps * eps - dev * dev) * hm::norm_pdf((f - c.mean) / c.sigma) /
                   c.sigma;
        },
        lo, hi,
        {c.mean - 2.0 * c.sigma, c.mean - c.sigma, c.mean, c.mean + c.sigma,
         c.mean + 2.0 * c.sigma},
        1e-13);
}

double risk_quadrature(const hm::CriterionInput& c) {
    const double lo = c.mean - 14.0 * c.sigma, hi = c.mean + 14.0 * c.sigma;
    const auto density = [&](double f) {
        return hm::norm_pdf((f - c.mean) / c.sigma) / c.sigma;
    };
    const std::vector<double> breaks = {c.mean - 2.0 * c.sigma, c.mean - c.sigma,
                                        c.mean, c.mean + c.sigma,
                                        c.mean + 2.0 * c.sigma};
    if (c.mean <= c.z)
        return testutil::integrate_piecewise(
            [&](double f) { return (f - c.z) * density(f); }, std::max(c.z, lo),
            std::max(c.z, hi), breaks, 1e-13);
    return testutil::integrate_piecewise(
        [&](double f) { return (c.z - f) * density(f); }, std::min(c.z, lo),
        std::min(c.z, hi), breaks, 1e-13);
}

double entropy_quadrature(const hm::CriterionInput& c) {
    const auto integrand = [&](double f) {
        const double t = (f - c.mean) / c.sigma;
        const double logpi =
            -0.5 * t * t - std::log(c.sigma * std::sqrt(2.0 * std::numbers::pi));
        return -(hm::norm_pdf(t) / c.sigma) * logpi;
    };
    return std::abs(testutil::integrate(integrand, c.z - c.budget.k * c.sigma,
                                        c.z + c.budget.k * c.sigma, 1e-12));
}

// ---------------------------------------------------------------- checks --

void check_1_criteria_vs_oracles() {
    Timer timer;
    std::mt19937_64 rng(101);
    bool ok = true;
    std::string detail;
    std::vector<RandomCriterionConfig> configs;
    for (int t = 0; t < 200; ++t) configs.push_back(draw_config(rng));

    for (const auto& [c] : configs) {
        if (std::abs(hm::eci(c).value - eci_quadrature(c, false)) > 1e-8 ||
            std::abs(hm::expected_risk(c).value - risk_quadrature(c)) > 1e-8 ||
            std::abs(hm::entropic_profile(c).value - entropy_quadrature(c)) > 1e-8) {
            ok = false;
            detail = "quadrature mismatch beyond 1e-8";
            break;
        }
    }

    // Monte Carlo oracle of the defining expectations, 1e7 draws, 3 SE
    const long n = 10000000;
    for (int t = 0; ok && t < 4; ++t) {
        const auto& c = configs[static_cast<std::size_t>(t) * 37].c;
        const double v2 = c.sigma * c.sigma + c.budget.var_md + c.budget.var_me;
        const double eps = c.budget.k * std::sqrt(v2);
        const auto eci_mc = testutil::monte_carlo(
            [&](std::mt19937_64& r) {
                std::normal_distribution<double> normal;
                const double f = c.mean + c.sigma * normal(r);
                const double dev = f - c.z;
                return std::abs(dev) <= eps ? eps * eps - dev * dev : 0.0;
            },
            n, 500 + static_cast<std::uint64_t>(t));
        const auto risk_mc = testutil::monte_carlo(
            [&](std::mt19937_64& r) {
                std::normal_distribution<double> normal;
                const double f = c.mean + c.sigma * normal(r);
                return c.mean <= c.z ? std::max(f - c.z, 0.0) : std::max(c.z - f, 0.0);
            },
            n, 600 + static_cast<std::uint64_t>(t));
        const auto ent_mc = testutil::monte_carlo(
            [&](std::mt19937_64& r) {
                std::normal_distribution<double> normal;
                const double f = c.mean + c.sigma * normal(r);
                if (std::abs(f - c.z) > c.budget.k * c.sigma) return 0.0;
                const double t2 = (f - c.mean) / c.sigma;
                return 0.5 * t2 * t2 +
                       std::log(c.sigma * std::sqrt(2.0 * std::numbers::pi));
            },
            n, 700 + static_cast<std::uint64_t>(t));
        if (std::abs(hm::eci(c).value - eci_mc.mean) > 3.0 * eci_mc.se + 1e-9 ||
            std::abs(hm::expected_risk(c).value - risk_mc.mean) >
                3.0 * risk_mc.se + 1e-9 ||
            std::abs(hm::entropic_profile(c).value - std::abs(ent_mc.mean)) >
                3.0 * ent_mc.se + 1e-9) {
            ok = false;
            detail = "Monte Carlo mismatch beyond 3 SE at 1e7 draws";
        }
    }
    report("1. criteria closed forms vs quadrature and Monte Carlo oracles", ok,
           timer.seconds(), detail);
}

void check_2_risk_branches() {
    Timer timer;
    bool ok = true;
    std::mt19937_64 rng(211);
    std::uniform_real_distribution<double> unif;
    for (int t = 0; t < 40; ++t) {
        hm::CriterionInput c = draw_config(rng).c;
        // force both sides of the contour, including near-coincidence
        c.mean = c.z + (t % 2 == 0 ? 1.0 : -1.0) * (t < 4 ? 1e-6 : 2.0 * unif(rng));
        const auto density = [&](double f) {
            return hm::norm_pdf((f - c.mean) / c.sigma) / c.sigma;
        };
        const double lo = c.mean - 14.0 * c.sigma, hi = c.mean + 14.0 * c.sigma;
        const double below = testutil::integrate(
            [&](double f) { return (c.z - f) * density(f); }, std::min(lo, c.z), c.z,
            1e-12);
        const double above = testutil::integrate(
            [&](double f) { return (f - c.z) * density(f); }, c.z, std::max(hi, c.z),
            1e-12);
        const double expected = c.mean > c.z ? below : above;
        if (std::abs(hm::expected_risk(c).value - expected) > 1e-8) ok = false;
    }
    report("2. expected risk equals the branch integrals on both sides of the contour",
           ok, timer.seconds());
}

void check_3_crps() {
    Timer timer;
    bool ok = true;
    std::string detail;

    hm::PredictiveMixture std_normal;
    std_normal.components.push_back({1.0, 0.0, 1.0});
    if (std::abs(hm::crps_mixture(std_normal, 0.0) - 0.233694) > 1e-6) {
        ok = false;
        detail = "pinned standard-normal value off";
    }

    std::mt19937_64 rng(307);
    std::uniform_real_distribution<double> unif;
    for (int t = 0; ok && t < 50; ++t) {
        hm::PredictiveMixture mix;
        const int n_comp = 1 + static_cast<int>(4 * unif(rng));
        double wsum = 0.0;
        for (int i = 0; i < n_comp; ++i) {
            hm::MixtureComponent comp;
            comp.weight = 0.1 + unif(rng);
            comp.mean = 4.0 * unif(rng) - 2.0;
            comp.variance = 0.05 + unif(rng);
            wsum += comp.weight;
            mix.components.push_back(comp);
        }
        for (auto& comp : mix.components) comp.weight /= wsum;
        const double z = 4.0 * unif(rng) - 2.0;

        const auto draw = [&](std::mt19937_64& r) {
            std::uniform_real_distribution<double> u01;
            std::normal_distribution<double> normal;
            double u = u01(r), cum = 0.0;
            for (const auto& comp : mix.components) {
                cum += comp.weight;
                if (u <= cum)
                    return comp.mean + std::sqrt(comp.variance) * normal(r);
            }
            const auto& last = mix.components.back();
            return last.mean + std::sqrt(last.variance) * normal(r);
        };
        const long n = 1000000;
        const auto mc = testutil::monte_carlo(
            [&](std::mt19937_64& r) {
                const double x = draw(r);
                const double xp = draw(r);
                return std::abs(x - z) - 0.5 * std::abs(x - xp);
            },
            n, 3000 + static_cast<std::uint64_t>(t));
        if (std::abs(hm::crps_mixture(mix, z) - mc.mean) > 3.0 * mc.se + 1e-9) {
            ok = false;
            detail = "sample estimator mismatch beyond 3 SE";
        }
    }
    report("3. CRPS pinned value and mixture sample-estimator agreement", ok,
           timer.seconds(), detail);
}

void check_4_probabilistic_implausibility() {
    Timer timer;
    bool ok = true;
    std::string detail;

    hm::PredictiveMixture centered;
    centered.components.push_back({1.0, 0.5, 1.0});
    if (std::abs(hm::prob_nonimplausible(centered, {0.0, 0.0, 3.0}, {0.5, "y"}) -
                 0.997300) > 1e-4) {
        ok = false;
        detail = "three-sigma band mass off";
    }

    std::mt19937_64 rng(401);
    std::uniform_real_distribution<double> unif;
    for (int t = 0; ok && t < 50; ++t) {
        hm::PredictiveMixture mix;
        const int n_comp = 1 + static_cast<int>(4 * unif(rng));
        double wsum = 0.0;
        for (int i = 0; i < n_comp; ++i) {
            hm::MixtureComponent comp{0.1 + unif(rng), 4.0 * unif(rng) - 2.0,
                                      0.05 + unif(rng)};
            wsum += comp.weight;
            mix.components.push_back(comp);
        }
        for (auto& comp : mix.components) comp.weight /= wsum;
        const hm::UncertaintyBudget budget{0.3 * unif(rng), 0.3 * unif(rng),
                                           1.0 + 3.0 * unif(rng)};
        const hm::TargetDatum target{2.0 * unif(rng) - 1.0, "y"};
        const double closed = hm::prob_nonimplausible(mix, budget, target);

        const long n = 200000;
        const auto mc = testutil::monte_carlo(
            [&](std::mt19937_64& r) {
                std::uniform_real_distribution<double> u01;
                std::normal_distribution<double> normal;
                double u = u01(r), cum = 0.0;
                const hm::MixtureComponent* comp = &mix.components.back();
                for (const auto& cc : mix.components) {
                    cum += cc.weight;
                    if (u <= cum) {
                        comp = &cc;
                        break;
                    }
                }
                const double f = comp->mean + std::sqrt(comp->variance) * normal(r);
                const double v =
                    std::sqrt(comp->variance + budget.var_md + budget.var_me);
                return std::abs(target.z - f) / v <= budget.k ? 1.0 : 0.0;
            },
            n, 4000 + static_cast<std::uint64_t>(t));
        if (std::abs(closed - mc.mean) > 3.0 * mc.se + 1e-9) {
            ok = false;
            detail = "closed form vs Monte Carlo beyond 3 SE";
        }
    }
    report("4. probabilistic implausibility band mass vs Monte Carlo", ok,
           timer.seconds(), detail);
}

void check_5_gp_correctness() {
    Timer timer;
    bool ok = true;
    std::string detail;

    // noiseless interpolation through a smooth function
    std::mt19937_64 rng(503);
    std::uniform_real_distribution<double> unif;
    hm::TrainingSet ts;
    const int n = 25;
    ts.inputs.resize(n, 2);
    ts.outputs.resize(n);
    const Eigen::MatrixXd lhs = hm::latin_hypercube(n, 2, 77);
    for (int i = 0; i < n; ++i) {
        ts.inputs.row(i) = lhs.row(i);
        ts.outputs[i] = std::sin(5.0 * lhs(i, 0)) * std::cos(3.0 * lhs(i, 1));
    }
    hm::KernelSpec spec;
    spec.family = hm::KernelFamily::matern52;
    spec.lengthscales = Eigen::VectorXd::Constant(2, 0.35);
    spec.signal_variance = 1.0;
    spec.nugget = 0.0;
    const hm::GpFactorization fac = hm::factorize(spec, ts.inputs, ts.outputs);
    for (int i = 0; i < n; ++i) {
        const hm::GpPrediction p =
            hm::gp_predict(spec, ts.inputs, fac, ts.inputs.row(i).transpose());
        if (std::abs(p.mean - ts.outputs[i]) > 1e-8 || p.variance > 1e-8) {
            ok = false;
            detail = "interpolation error above 1e-8";
        }
    }

    // posterior-mixture moments vs Monte Carlo over the mixture
    if (ok) {
        const hm::PosteriorEnsemble ens = hm::sample_hyperposterior(ts, {}, 20, 811);
        Eigen::VectorXd x(2);
        x << 0.37, 0.81;
        const hm::PredictiveMixture mix = hm::predict(ens, x);
        const hm::Moments mom = hm::mixture_moments(mix);
        const auto draw = [&](std::mt19937_64& r) {
            std::uniform_real_distribution<double> u01;
            std::normal_distribution<double> normal;
            double u = u01(r), cum = 0.0;
            for (const auto& comp : mix.components) {
                cum += comp.weight;
                if (u <= cum)
                    return comp.mean + std::sqrt(comp.variance) * normal(r);
            }
            const auto& last = mix.components.back();
            return last.mean + std::sqrt(last.variance) * normal(r);
        };
        const long draws = 1000000;
        const auto mean_mc = testutil::monte_carlo(draw, draws, 5001);
        const auto var_mc = testutil::monte_carlo(
            [&](std::mt19937_64& r) {
                const double v = draw(r) - mom.mean;
                return v * v;
            },
            draws, 5002);
        if (std::abs(mom.mean - mean_mc.mean) > 3.0 * mean_mc.se + 1e-12 ||
            std::abs(mom.variance - var_mc.mean) > 3.0 * var_mc.se + 1e-12) {
            ok = false;
            detail = "mixture moments vs Monte Carlo beyond 3 SE";
        }
    }
    report("5. GP interpolation and mixture-moment correctness", ok, timer.seconds(),
           detail);
}

int single_linkage_clusters(const Eigen::MatrixXd& points, double radius) {
    const Eigen::Index n = points.rows();
    std::vector<int> parent(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = static_cast<int>(i);
    std::function<int(int)> find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if ((points.row(i) - points.row(j)).norm() <= radius)
                parent[static_cast<std::size_t>(find(static_cast<int>(i)))] =
                    find(static_cast<int>(j));
    int clusters = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (find(static_cast<int>(i)) == static_cast<int>(i)) ++clusters;
    return clusters;
}

void check_6_torus() {
    Timer timer;
    const hm::Objective objective = [](const Eigen::VectorXd& x) {
        return hm::band_score(hm::torus_implausibility(x), 3.0);
    };
    int good = 0;
    for (int run = 0; run < 20; ++run) {
        hm::AnnealingConfig cfg;
        cfg.n_per_level = 1000;
        cfg.seed = hm::mix_seed(2024, static_cast<std::uint64_t>(run));
        const hm::NROYLevels levels = hm::sample_nroy(objective, hm::torus_box(), cfg);
        if (single_linkage_clusters(levels.final_level().points, 0.5) == 4) ++good;
    }
    const bool ok = good >= 18 && timer.seconds() < 120.0;
    report("6. torus NROY space resolves into exactly 4 clusters", ok, timer.seconds(),
           std::to_string(good) + "/20 runs with 4 clusters");
}

hm::ExperimentConfig franke_config() {
    hm::ExperimentConfig config;
    config.simulator.kind = hm::SimulatorBinding::Kind::franke;
    config.simulator.dim = 2;
    config.input_box.lower = Eigen::VectorXd::Zero(2);
    config.input_box.upper = Eigen::VectorXd::Ones(2);
    config.targets = {{0.6, "y"}};
    config.budgets = {{0.0, 2.5e-5, 3.0}};
    config.initial_design_size = 20;
    config.batch_size = 10;
    config.n_waves = 3;
    config.criterion = hm::CriterionId::entropy;
    config.replications = 10;
    config.master_seed = 20240817;
    return config;
}

std::vector<double> median_by_wave(const std::vector<hm::MetricRow>& rows, int n_waves,
                                   bool crps, const std::string& output = "") {
    std::vector<double> medians;
    for (int w = 1; w <= n_waves; ++w) {
        std::vector<double> vals;
        for (const auto& r : rows)
            if (r.wave == w && (output.empty() || r.output == output))
                vals.push_back(crps ? r.median_crps : r.max_error);
        medians.push_back(hm::quartiles(vals).median);
    }
    return medians;
}

void check_7_franke_trend() {
    Timer timer;
    const hm::ExperimentConfig config = franke_config();
    const auto rep = hm::run_replications(config);
    bool ok = rep.failures.empty() && !rep.rows.empty();
    std::string detail;
    if (!ok) detail = "replication failures";
    if (ok) {
        const auto err = median_by_wave(rep.rows, 3, false);
        const auto crps = median_by_wave(rep.rows, 3, true);
        if (!(err[1] < err[0] && err[2] < err[1])) {
            ok = false;
            detail = "median max error not strictly decreasing";
        }
        if (crps[2] > crps[0]) {
            ok = false;
            detail = "median CRPS grew from wave 1 to wave 3";
        }
        char buf[160];
        std::snprintf(buf, sizeof buf, "max_error medians %.4f %.4f %.4f%s%s",
                      err[0], err[1], err[2], detail.empty() ? "" : "; ",
                      detail.c_str());
        detail = buf;
    }
    ok = ok && timer.seconds() < 900.0;
    report("7. two-dimensional contour study: error medians shrink over 3 waves", ok,
           timer.seconds(), detail);
}

void check_8_random_functions() {
    Timer timer;
    bool ok = true;
    std::string detail;
    for (int d : {2, 3}) {
        for (const auto criterion :
             {hm::CriterionId::eci, hm::CriterionId::risk, hm::CriterionId::entropy}) {
            // one fresh random function per replication, tracked for the full
            // three waves (no early stop: zero uncertainty budget)
            std::vector<hm::MetricRow> rows;
            bool failed = false;
            for (int rep = 0; rep < 10; ++rep) {
                hm::ExperimentConfig config;
                config.simulator.kind = hm::SimulatorBinding::Kind::random;
                config.simulator.dim = d;
                config.simulator.function_seed =
                    90 + static_cast<std::uint64_t>(d * 100 + rep);
                config.input_box.lower = Eigen::VectorXd::Zero(d);
                config.input_box.upper = Eigen::VectorXd::Ones(d);
                hm::RandomFunctionSpec spec;
                spec.dim = d;
                spec.seed = config.simulator.function_seed;
                config.targets = {{hm::RandomFunction(spec).target_z(), "y"}};
                config.budgets = {{0.0, 0.0, 3.0}};
                config.prior.family = hm::KernelFamily::matern52;
                config.n_waves = 3;
                config.criterion = criterion;
                config.replications = 1;
                config.master_seed = 555 + static_cast<std::uint64_t>(rep);
                const auto out = hm::run_replications(config);
                if (!out.failures.empty()) failed = true;
                rows.insert(rows.end(), out.rows.begin(), out.rows.end());
            }
            if (failed) {
                ok = false;
                detail = "replication failures at d=" + std::to_string(d);
                continue;
            }
            const auto err = median_by_wave(rows, 3, false);
            const bool decreasing = err[1] < err[0] && err[2] < err[1];
            const bool bounded_growth =
                err[1] <= 1.05 * err[0] && err[2] <= 1.05 * err[1];
            const bool pass = criterion == hm::CriterionId::risk
                                  ? bounded_growth
                                  : decreasing;
            if (!pass) {
                ok = false;
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "d=%d %s medians %.4f %.4f %.4f violate the trend", d,
                              hm::criterion_name(criterion).c_str(), err[0], err[1],
                              err[2]);
                detail = buf;
            }
        }
    }
    ok = ok && timer.seconds() < 1800.0;
    report("8. random-function studies: error trend per criterion at d=2,3", ok,
           timer.seconds(), detail);
}

void check_9_maximin_oracle() {
    Timer timer;
    bool ok = true;
    std::mt19937_64 rng(907);
    std::uniform_real_distribution<double> unif;
    auto lex_less = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        for (Eigen::Index j = 0; j < a.size(); ++j) {
            if (a[j] < b[j]) return true;
            if (a[j] > b[j]) return false;
        }
        return false;
    };
    for (int trial = 0; trial < 100 && ok; ++trial) {
        const int d = 1 + static_cast<int>(3 * unif(rng));
        const int n = 5 + static_cast<int>(56 * unif(rng));
        const int batch = 1 + static_cast<int>(std::min(n - 1, 10) * unif(rng));
        std::vector<hm::RankedSample> candidates;
        for (int i = 0; i < n; ++i) {
            hm::RankedSample rs;
            rs.point.resize(d);
            for (int j = 0; j < d; ++j) rs.point[j] = unif(rng);
            rs.score = {1.0 - static_cast<double>(i) / n, hm::CriterionId::eci};
            candidates.push_back(std::move(rs));
        }
        Eigen::MatrixXd existing(3, d);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < d; ++j) existing(i, j) = unif(rng);

        const auto got = hm::maximin_select(candidates, existing, {0.5, batch});
        if ((got.batch.front() - candidates.front().point).norm() != 0.0) ok = false;

        // exhaustive greedy reference
        std::vector<Eigen::VectorXd> chosen{candidates.front().point};
        std::vector<bool> used(candidates.size(), false);
        used[0] = true;
        while (static_cast<int>(chosen.size()) < batch) {
            std::size_t best = candidates.size();
            double best_d = -1.0;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                if (used[i]) continue;
                double dmin = std::numeric_limits<double>::infinity();
                for (Eigen::Index r = 0; r < existing.rows(); ++r)
                    dmin = std::min(
                        dmin, (candidates[i].point - existing.row(r).transpose()).norm());
                for (const auto& c : chosen)
                    dmin = std::min(dmin, (candidates[i].point - c).norm());
                if (dmin > best_d || (dmin == best_d &&
                                      lex_less(candidates[i].point,
                                               candidates[best].point))) {
                    best_d = dmin;
                    best = i;
                }
            }
            used[best] = true;
            chosen.push_back(candidates[best].point);
        }
        for (std::size_t i = 0; i < chosen.size(); ++i)
            if ((got.batch[i] - chosen[i]).norm() != 0.0) ok = false;
    }
    report("9. greedy maximin equals the exhaustive oracle on 100 candidate sets", ok,
           timer.seconds());
}

void check_10_determinism() {
    Timer timer;
    hm::ExperimentConfig config = franke_config();
    config.replications = 2;  // complete pipeline, desk-scale repeat
    const fs::path dir = fs::temp_directory_path() / "hm_acceptance_det";
    fs::create_directories(dir);
    const auto a = hm::run_replications(config);
    const auto b = hm::run_replications(config);
    hm::save_metrics_csv(a.rows, (dir / "a.csv").string());
    hm::save_metrics_csv(b.rows, (dir / "b.csv").string());
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string text_a = slurp(dir / "a.csv");
    const bool ok = !text_a.empty() && text_a == slurp(dir / "b.csv");
    fs::remove_all(dir);
    report("10. repeated runs with one master seed are byte-identical", ok,
           timer.seconds());
}

void check_11_archive_second_max() {
    Timer timer;
    bool ok = true;
    std::string detail;
    const fs::path dir = fs::temp_directory_path() / "hm_acceptance_archive";
    fs::create_directories(dir);
    const std::string path = (dir / "archive.csv").string();

    // synthetic 3-output archive over a dense grid of a 2-d box
    hm::TabulatedSimulator archive;
    const int grid = 61;
    archive.inputs.resize(grid * grid, 2);
    archive.outputs.resize(grid * grid, 3);
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b) {
            const double x = static_cast<double>(a) / (grid - 1);
            const double y = static_cast<double>(b) / (grid - 1);
            const int row = a * grid + b;
            archive.inputs.row(row) << x, y;
            archive.outputs.row(row) << std::sin(4.0 * x) + y,
                std::cos(3.0 * y) - 0.5 * x, x * y + 0.25 * std::sin(7.0 * x * y);
        }
    archive.input_box.lower = Eigen::VectorXd::Zero(2);
    archive.input_box.upper = Eigen::VectorXd::Ones(2);
    hm::save_tabulated(archive, path);
    const hm::TabulatedSimulator back =
        hm::load_tabulated(path, 2, hm::TableInterpolation::nearest);
    if ((back.inputs - archive.inputs).cwiseAbs().maxCoeff() != 0.0 ||
        (back.outputs - archive.outputs).cwiseAbs().maxCoeff() != 0.0) {
        ok = false;
        detail = "archive round trip altered the data";
    }

    hm::ExperimentConfig config;
    config.simulator.kind = hm::SimulatorBinding::Kind::tabulated;
    config.simulator.dim = 2;
    config.simulator.table_path = path;
    config.input_box = archive.input_box;
    config.targets = {{0.9, "y1"}, {0.2, "y2"}, {0.35, "y3"}};
    config.budgets = {{0.0, 1e-3, 3.0}, {0.0, 1e-3, 3.0}, {0.0, 1e-3, 3.0}};
    config.initial_design_size = 15;
    config.batch_size = 5;
    config.n_waves = 2;
    config.ensemble_size = 10;
    config.annealing.n_per_level = 300;
    config.second_max_draws = 256;
    config.replications = 2;
    config.master_seed = 11;

    const auto rep = hm::run_replications(config);
    if (!rep.failures.empty()) {
        ok = false;
        detail = "archive run failed: " + rep.failures.front();
    }
    if (ok && rep.rows.size() !=
                  static_cast<std::size_t>(config.replications * config.n_waves * 3)) {
        ok = false;
        detail = "unexpected metric row count";
    }

    // the ordering property I^(2) <= I^(1) must hold on every draw of the
    // probabilistic second-max objective
    if (ok) {
        hm::TrainingSet ts;
        ts.inputs = hm::latin_hypercube(20, 2, 3);
        std::vector<hm::PosteriorEnsemble> ensembles;
        for (int o = 0; o < 3; ++o) {
            hm::TrainingSet per_output = ts;
            per_output.outputs.resize(20);
            for (int i = 0; i < 20; ++i)
                per_output.outputs[i] =
                    hm::eval_tabulated(back, ts.inputs.row(i).transpose())[o];
            ensembles.push_back(
                hm::sample_hyperposterior(per_output, {}, 10, 60 + static_cast<std::uint64_t>(o)));
        }
        std::mt19937_64 rng(71);
        std::uniform_real_distribution<double> unif;
        for (int t = 0; t < 200; ++t) {
            Eigen::VectorXd x(2);
            x << unif(rng), unif(rng);
            std::vector<hm::PredictiveMixture> mixes;
            for (const auto& ens : ensembles) mixes.push_back(hm::predict(ens, x));
            const hm::SecondMaxResult res = hm::prob_second_max_nonimplausible(
                mixes, config.budgets, config.targets, 2048,
                static_cast<std::uint64_t>(t));
            if (!res.order_ok || res.probability < 0.0 || res.probability > 1.0) {
                ok = false;
                detail = "ordering violated in the second-max draws";
            }
        }
    }
    fs::remove_all(dir);
    report("11. archive ingestion and 3-output second-max run (field-data protocol "
           "substitute)",
           ok, timer.seconds(), detail);
}

}  // namespace

int main() {
    Timer total;
    check_1_criteria_vs_oracles();
    check_2_risk_branches();
    check_3_crps();
    check_4_probabilistic_implausibility();
    check_5_gp_correctness();
    check_6_torus();
    check_7_franke_trend();
    check_8_random_functions();
    check_9_maximin_oracle();
    check_10_determinism();
    check_11_archive_second_max();
    std::printf("%d/11 criteria passed (%.1fs total)\n", 11 - g_failures,
                total.seconds());
    return g_failures == 0 ? 0 : 1;
}
