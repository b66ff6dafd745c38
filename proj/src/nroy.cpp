#include "hm/nroy.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <vector>

#include "hm/errors.hpp"
#include "hm/math_util.hpp"

namespace hm {

bool SearchBox::contains(const Eigen::VectorXd& x) const {
    if (x.size() != lower.size()) return false;
    for (Eigen::Index j = 0; j < x.size(); ++j)
        if (x[j] < lower[j] || x[j] > upper[j]) return false;
    return true;
}

void SearchBox::validate() const {
    if (lower.size() < 1 || lower.size() != upper.size())
        throw ConfigError("search box: bad bounds");
    for (Eigen::Index j = 0; j < lower.size(); ++j)
        if (!(lower[j] < upper[j])) throw ConfigError("search box: empty extent");
}

namespace {

// for_each_index with first-exception capture (OpenMP would otherwise
// terminate on a throwing worker)
template <class F>
void run_indexed(std::size_t n, ExecMode mode, F&& fn) {
    std::exception_ptr eptr = nullptr;
    std::mutex guard;
    for_each_index(n, mode, [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(guard);
            if (!eptr) eptr = std::current_exception();
        }
    });
    if (eptr) std::rethrow_exception(eptr);
}

double checked_objective(const Objective& objective, const Eigen::VectorXd& x) {
    const double g = objective(x);
    if (!std::isfinite(g)) throw ObjectiveError("objective returned non-finite value");
    if (g < -1e-9 || g > 1.0 + 1e-9)
        throw ObjectiveError("objective value outside [0,1]");
    return std::clamp(g, 0.0, 1.0);
}

double ess_of(const Eigen::VectorXd& log_g, double dbeta) {
    double max_lw = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < log_g.size(); ++i) {
        const double lw = dbeta * log_g[i];
        if (lw > max_lw) max_lw = lw;
    }
    double s1 = 0.0, s2 = 0.0;
    for (Eigen::Index i = 0; i < log_g.size(); ++i) {
        const double w = std::exp(dbeta * log_g[i] - max_lw);
        s1 += w;
        s2 += w * w;
    }
    return s1 * s1 / s2;
}

double lower_quartile(Eigen::VectorXd g) {
    std::sort(g.data(), g.data() + g.size());
    const double h = 0.25 * static_cast<double>(g.size() - 1);
    const Eigen::Index lo = static_cast<Eigen::Index>(std::floor(h));
    const Eigen::Index hi = std::min<Eigen::Index>(lo + 1, g.size() - 1);
    return g[lo] + (h - static_cast<double>(lo)) * (g[hi] - g[lo]);
}

double reflect(double x, double lo, double hi) {
    const double width = hi - lo;
    double t = std::fmod(x - lo, 2.0 * width);
    if (t < 0.0) t += 2.0 * width;
    return lo + (t <= width ? t : 2.0 * width - t);
}

}  // namespace

NROYLevels sample_nroy(const Objective& objective, const SearchBox& box,
                       const AnnealingConfig& config, ExecMode exec) {
    box.validate();
    if (config.n_per_level < 10) throw ConfigError("n_per_level must be >= 10");
    if (!(config.ess_fraction > 0.0 && config.ess_fraction < 1.0))
        throw ConfigError("ess_fraction must be in (0,1)");
    if (config.max_levels < 1) throw ConfigError("max_levels must be >= 1");

    const Eigen::Index d = box.dim();
    const int n = config.n_per_level;

    Eigen::MatrixXd points(n, d);
    Eigen::VectorXd g(n);
    run_indexed(static_cast<std::size_t>(n), exec, [&](std::size_t i) {
        std::mt19937_64 rng(mix_seed(config.seed, 0, i));
        std::uniform_real_distribution<double> unif;
        for (Eigen::Index j = 0; j < d; ++j)
            points(static_cast<Eigen::Index>(i), j) =
                box.lower[j] + (box.upper[j] - box.lower[j]) * unif(rng);
        g[static_cast<Eigen::Index>(i)] =
            checked_objective(objective, points.row(static_cast<Eigen::Index>(i)));
    });
    if (g.maxCoeff() == 0.0)
        throw FlatObjectiveError("all initial samples score zero: NROY space empty "
                                 "at this resolution");

    NROYLevels out;
    out.levels.push_back({points, g});
    out.betas.push_back(0.0);

    double beta = 0.0;
    const double ess_target = config.ess_fraction * static_cast<double>(n);

    while (beta < config.beta_max &&
           static_cast<int>(out.levels.size()) < config.max_levels) {
        Eigen::VectorXd log_g = g.array().max(0.0).log();  // log(0) = -inf for dead particles

        // temperature increment: full jump if the ESS allows it, otherwise
        // bisect to hit the target ESS
        const double dbeta_max = config.beta_max - beta;
        double dbeta = dbeta_max;
        if (ess_of(log_g, dbeta_max) < ess_target) {
            const int alive = static_cast<int>((g.array() > 0.0).count());
            if (static_cast<double>(alive) >= ess_target) {
                double lo = 0.0, hi = dbeta_max;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (ess_of(log_g, mid) >= ess_target ? lo : hi) = mid;
                }
                dbeta = std::max(0.5 * (lo + hi), 1e-12);
            }
            // else: weights are flat over the surviving particles for every
            // dbeta > 0; jump all the way
        }
        beta += dbeta;

        double max_lw = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) max_lw = std::max(max_lw, dbeta * log_g[i]);
        Eigen::VectorXd w = (dbeta * log_g.array() - max_lw).exp();
        const double wsum = w.sum();
        w /= wsum;

        // weighted mean/covariance drive the move proposal
        const Eigen::VectorXd mean = points.transpose() * w;
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd dx = points.row(i).transpose() - mean;
            cov += w[i] * dx * dx.transpose();
        }
        Eigen::MatrixXd prop = 0.5 * cov;
        prop.diagonal().array() += 1e-6;
        Eigen::LLT<Eigen::MatrixXd> llt(prop);
        if (llt.info() != Eigen::Success)
            throw FactorizationError("proposal covariance factorization failed");
        const Eigen::MatrixXd prop_chol = llt.matrixL();

        // systematic resampling
        const std::uint64_t level_index = out.levels.size();
        std::mt19937_64 level_rng(mix_seed(config.seed, 0xA11CE, level_index));
        std::uniform_real_distribution<double> unif;
        const double u0 = unif(level_rng) / static_cast<double>(n);
        std::vector<int> ancestors(static_cast<std::size_t>(n));
        {
            double cum = w[0];
            int k = 0;
            for (int i = 0; i < n; ++i) {
                const double u = u0 + static_cast<double>(i) / static_cast<double>(n);
                while (cum < u && k + 1 < n) cum += w[++k];
                ancestors[static_cast<std::size_t>(i)] = k;
            }
        }

        Eigen::MatrixXd next_points(n, d);
        Eigen::VectorXd next_g(n);
        const double beta_now = beta;
        run_indexed(static_cast<std::size_t>(n), exec, [&](std::size_t i) {
            std::mt19937_64 rng(mix_seed(config.seed, level_index, i));
            std::normal_distribution<double> normal;
            std::uniform_real_distribution<double> u01;
            Eigen::VectorXd x = points.row(ancestors[i]).transpose();
            double gx = g[ancestors[i]];
            for (int s = 0; s < config.move_steps; ++s) {
                Eigen::VectorXd step(d);
                for (Eigen::Index j = 0; j < d; ++j) step[j] = normal(rng);
                Eigen::VectorXd cand = x + prop_chol * step;
                for (Eigen::Index j = 0; j < d; ++j)
                    cand[j] = reflect(cand[j], box.lower[j], box.upper[j]);
                const double gc = checked_objective(objective, cand);
                const double log_u = std::log(u01(rng));
                bool accept;
                if (gx == 0.0)
                    accept = gc > 0.0;
                else
                    accept = gc > 0.0 && log_u < beta_now * (std::log(gc) - std::log(gx));
                if (accept) {
                    x = cand;
                    gx = gc;
                }
            }
            next_points.row(static_cast<Eigen::Index>(i)) = x.transpose();
            next_g[static_cast<Eigen::Index>(i)] = gx;
        });

        points = std::move(next_points);
        g = std::move(next_g);
        out.levels.push_back({points, g});
        out.betas.push_back(beta);

        // degenerate concentration: stop once the middle half of the
        // population sits within 0.1% of the level's best score. Anchoring
        // at the maximum avoids mistaking a still-climbing population with
        // uniformly small, tightly bunched scores for a collapsed one.
        const double gmax = g.maxCoeff();
        if (gmax - lower_quartile(g) < 1e-3 * gmax) break;
    }

    // final sweeps anneal the last level at beta_max: the proposal spans the
    // whole population, so particles migrate freely between disconnected
    // regions of the band (evening out mode occupancy) while the sharp
    // acceptance ratio pulls stragglers onto it
    if (config.final_sweeps > 0) {
        const Eigen::VectorXd mean = points.colwise().mean();
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd dx = points.row(i).transpose() - mean;
            cov += dx * dx.transpose() / static_cast<double>(n);
        }
        Eigen::MatrixXd prop = 0.5 * cov;
        prop.diagonal().array() += 1e-6;
        Eigen::LLT<Eigen::MatrixXd> llt(prop);
        if (llt.info() != Eigen::Success)
            throw FactorizationError("proposal covariance factorization failed");
        const Eigen::MatrixXd prop_chol = llt.matrixL();
        const double beta_now = config.beta_max;
        Eigen::MatrixXd next_points(n, d);
        Eigen::VectorXd next_g(n);
        run_indexed(static_cast<std::size_t>(n), exec, [&](std::size_t i) {
            std::mt19937_64 rng(mix_seed(config.seed, 0xF1A15, i));
            std::normal_distribution<double> normal;
            std::uniform_real_distribution<double> u01;
            Eigen::VectorXd x = points.row(static_cast<Eigen::Index>(i)).transpose();
            double gx = g[static_cast<Eigen::Index>(i)];
            for (int s = 0; s < config.final_sweeps; ++s) {
                Eigen::VectorXd step(d);
                for (Eigen::Index j = 0; j < d; ++j) step[j] = normal(rng);
                Eigen::VectorXd cand = x + prop_chol * step;
                for (Eigen::Index j = 0; j < d; ++j)
                    cand[j] = reflect(cand[j], box.lower[j], box.upper[j]);
                const double gc = checked_objective(objective, cand);
                const double log_u = std::log(u01(rng));
                bool accept;
                if (gx == 0.0)
                    accept = gc > 0.0;
                else
                    accept = gc > 0.0 && log_u < beta_now * (std::log(gc) - std::log(gx));
                if (accept) {
                    x = cand;
                    gx = gc;
                }
            }
            next_points.row(static_cast<Eigen::Index>(i)) = x.transpose();
            next_g[static_cast<Eigen::Index>(i)] = gx;
        });
        out.levels.back() = {std::move(next_points), std::move(next_g)};
    }
    return out;
}

bool empty_nroy_check(const NROYLevels& levels, double floor) {
    return levels.final_level().objectives.maxCoeff() < floor;
}

void save_nroy_csv(const NROYLevels& levels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out.precision(17);
    const Eigen::Index d = levels.levels.front().points.cols();
    out << "level";
    for (Eigen::Index j = 0; j < d; ++j) out << ",x" << (j + 1);
    out << ",g\n";
    for (std::size_t l = 0; l < levels.levels.size(); ++l) {
        const auto& lev = levels.levels[l];
        for (Eigen::Index i = 0; i < lev.points.rows(); ++i) {
            out << l;
            for (Eigen::Index j = 0; j < d; ++j) out << "," << lev.points(i, j);
            out << "," << lev.objectives[i] << "\n";
        }
    }
}

}  // namespace hm
