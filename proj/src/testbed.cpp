#include "hm/testbed.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "hm/errors.hpp"
#include "hm/kernel.hpp"
#include "hm/math_util.hpp"

namespace hm {

double franke(const Eigen::VectorXd& x) {
    if (x.size() != 2) throw DomainError("franke: expects a 2-d point");
    if (x[0] < 0.0 || x[0] > 1.0 || x[1] < 0.0 || x[1] > 1.0)
        throw DomainError("franke: point outside the unit square");
    const double x1 = x[0], x2 = x[1];
    double f = 0.75 * std::exp(-std::pow(9.0 * x1 - 2.0, 2) / 4.0 -
                               std::pow(9.0 * x2 - 2.0, 2) / 4.0);
    f += 0.75 * std::exp(-std::pow(9.0 * x1 + 1.0, 2) / 49.0 - (9.0 * x2 + 1.0) / 10.0);
    f += 0.5 * std::exp(-std::pow(9.0 * x1 - 7.0, 2) / 4.0 -
                        std::pow(9.0 * x2 - 3.0, 2) / 4.0);
    f -= 0.2 * std::exp(-std::pow(9.0 * x1 - 4.0, 2) - std::pow(9.0 * x2 - 7.0, 2));
    return f;
}

SearchBox torus_box() {
    SearchBox box;
    box.lower = Eigen::VectorXd::Constant(3, -20.0);
    box.upper = Eigen::VectorXd::Constant(3, 40.0);
    return box;
}

double torus_implausibility(const Eigen::VectorXd& x) {
    if (x.size() != 3) throw DomainError("torus: expects a 3-d point");
    if (!torus_box().contains(x)) throw DomainError("torus: point outside [-20,40]^3");
    const double u1 = (x[0] - 2.0) * (x[0] - 2.0) - 3.0;
    const double u2 = (x[1] - 2.0) * (x[1] - 2.0) - 3.0;
    // Sigma = 2^-12 [[1, -0.97], [-0.97, 1]]
    const double scale = 4096.0;  // 2^12
    const double det = 1.0 - 0.97 * 0.97;
    const double quad = scale / det * (u1 * u1 + 2.0 * 0.97 * u1 * u2 + u2 * u2);
    return 0.1 * (std::sqrt(quad) + x[2] * x[2] / (0.04 * 0.04));
}

double band_score(double implausibility, double k) {
    const double excess = implausibility - k;
    return excess <= 0.0 ? 1.0 : 1.0 / (1.0 + excess);
}

RandomFunction::RandomFunction(const RandomFunctionSpec& spec) {
    if (spec.dim < 1) throw ConfigError("random function: dim must be >= 1");
    const int n = spec.n_seeds > 0 ? spec.n_seeds : 100 * spec.dim;
    if (n < spec.dim + 1) throw ConfigError("random function: too few seeds");
    if (!(spec.signal_sd > 0.0)) throw ConfigError("random function: signal_sd must be > 0");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unif;
    seeds_.resize(n, spec.dim);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < spec.dim; ++j) seeds_(i, j) = unif(rng);

    lengthscales_.resize(spec.dim);
    for (int j = 0; j < spec.dim; ++j)
        lengthscales_[j] =
            spec.lengthscale_lo + (spec.lengthscale_hi - spec.lengthscale_lo) * unif(rng);
    lengthscales_ = lengthscales_.cwiseMax(1e-3);  // guard the open lower end

    signal_variance_ = spec.signal_sd * spec.signal_sd;
    KernelSpec kspec;
    kspec.family = KernelFamily::matern52;
    kspec.lengthscales = lengthscales_;
    kspec.signal_variance = signal_variance_;
    kspec.nugget = 0.0;

    Eigen::MatrixXd k = kernel_matrix(kspec, seeds_);
    double jitter = 1e-10 * signal_variance_;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (;;) {
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter;
        llt.compute(kj);
        if (llt.info() == Eigen::Success) break;
        if (jitter >= 1e-4 * signal_variance_)
            throw FactorizationError("random function: seed covariance not factorizable");
        jitter *= 10.0;
    }

    std::normal_distribution<double> normal;
    Eigen::VectorXd white(n);
    for (int i = 0; i < n; ++i) white[i] = normal(rng);
    values_ = Eigen::MatrixXd(llt.matrixL()) * white;
    weights_ = llt.solve(values_);

    // empirical target quantile of the seed values, type-7 interpolation
    Eigen::VectorXd sorted = values_;
    std::sort(sorted.data(), sorted.data() + n);
    const double h = spec.target_quantile * static_cast<double>(n - 1);
    const int lo = static_cast<int>(std::floor(h));
    const int hi = std::min(lo + 1, n - 1);
    target_z_ = sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

double RandomFunction::operator()(const Eigen::VectorXd& x) const {
    KernelSpec kspec;
    kspec.family = KernelFamily::matern52;
    kspec.lengthscales = lengthscales_;
    kspec.signal_variance = signal_variance_;
    return kernel_cross(kspec, seeds_, x).dot(weights_);
}

TabulatedSimulator load_tabulated(const std::string& path, int input_dim,
                                  TableInterpolation interpolation) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing header in " + path);
    int ncols = 1;
    for (char c : line)
        if (c == ',') ++ncols;
    if (ncols <= input_dim)
        throw ParseError("archive needs more columns than input dims in " + path);

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<double> row;
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError("non-numeric cell in " + path);
            }
        }
        if (static_cast<int>(row.size()) != ncols) throw ParseError("ragged row in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("archive has no data rows: " + path);

    TabulatedSimulator sim;
    sim.interpolation = interpolation;
    const int q = ncols - input_dim;
    sim.inputs.resize(static_cast<Eigen::Index>(rows.size()), input_dim);
    sim.outputs.resize(static_cast<Eigen::Index>(rows.size()), q);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < input_dim; ++j)
            sim.inputs(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
        for (int j = 0; j < q; ++j)
            sim.outputs(static_cast<Eigen::Index>(i), j) =
                rows[i][static_cast<std::size_t>(input_dim + j)];
    }
    sim.input_box.lower = sim.inputs.colwise().minCoeff();
    sim.input_box.upper = sim.inputs.colwise().maxCoeff();
    return sim;
}

void save_tabulated(const TabulatedSimulator& sim, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out.precision(17);
    for (Eigen::Index j = 0; j < sim.inputs.cols(); ++j) out << "x" << (j + 1) << ",";
    for (Eigen::Index j = 0; j < sim.outputs.cols(); ++j)
        out << "y" << (j + 1) << (j + 1 < sim.outputs.cols() ? "," : "\n");
    for (Eigen::Index i = 0; i < sim.inputs.rows(); ++i) {
        for (Eigen::Index j = 0; j < sim.inputs.cols(); ++j) out << sim.inputs(i, j) << ",";
        for (Eigen::Index j = 0; j < sim.outputs.cols(); ++j)
            out << sim.outputs(i, j) << (j + 1 < sim.outputs.cols() ? "," : "\n");
    }
}

Eigen::VectorXd eval_tabulated(const TabulatedSimulator& sim, const Eigen::VectorXd& x) {
    if (x.size() != sim.inputs.cols()) throw DomainError("tabulated: dimension mismatch");
    // nearest mode measures distance on inputs normalized by the archive's
    // own box; exact mode matches raw coordinates within 1e-12
    const bool exact = sim.interpolation == TableInterpolation::exact;
    const Eigen::VectorXd extent = exact
        ? Eigen::VectorXd::Ones(x.size())
        : (sim.input_box.upper - sim.input_box.lower).cwiseMax(1e-300).eval();
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < sim.inputs.rows(); ++i) {
        const double d =
            ((sim.inputs.row(i).transpose() - x).cwiseQuotient(extent)).norm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    if (exact && best_d > 1e-12)
        throw LookupError("tabulated: exact lookup missed the archive");
    return sim.outputs.row(best).transpose();
}

}  // namespace hm
