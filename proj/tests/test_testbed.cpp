#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "hm/errors.hpp"
#include "hm/testbed.hpp"

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST_CASE("bivariate test surface: pinned value, peak layout, domain guard") {
    CHECK(hm::franke(vec2(0.5, 0.5)) == doctest::Approx(0.32576208928).epsilon(1e-9));
    // tallest peak sits near (2/9, 2/9); the dip near (4/9, 7/9) is negative
    CHECK(hm::franke(vec2(2.0 / 9, 2.0 / 9)) > 1.0);
    CHECK(hm::franke(vec2(4.0 / 9, 7.0 / 9)) < hm::franke(vec2(0.9, 0.9)));
    CHECK_THROWS_AS(hm::franke(vec2(-0.1, 0.5)), hm::DomainError);
    CHECK_THROWS_AS(hm::franke(vec2(0.5, 1.2)), hm::DomainError);
    CHECK_THROWS_AS(hm::franke(vec3(0.1, 0.2, 0.3)), hm::DomainError);
}

TEST_CASE("the 0.6 superlevel set splits into exactly two regions") {
    const int grid = 512;
    std::vector<int> label(grid * grid, 0);
    auto at = [&](int a, int b) -> int& { return label[a * grid + b]; };
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b)
            at(a, b) = hm::franke(vec2((a + 0.5) / grid, (b + 0.5) / grid)) >= 0.6 ? -1 : 0;
    int components = 0;
    std::vector<std::pair<int, int>> stack;
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b) {
            if (at(a, b) != -1) continue;
            ++components;
            stack.push_back({a, b});
            at(a, b) = components;
            while (!stack.empty()) {
                const auto [x, y] = stack.back();
                stack.pop_back();
                const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = x + dx[k], ny = y + dy[k];
                    if (nx < 0 || ny < 0 || nx >= grid || ny >= grid) continue;
                    if (at(nx, ny) == -1) {
                        at(nx, ny) = components;
                        stack.push_back({nx, ny});
                    }
                }
            }
        }
    CHECK(components == 2);
}

TEST_CASE("torus implausibility vanishes exactly at the four ring centers") {
    const double r = std::sqrt(3.0);
    for (double s1 : {-1.0, 1.0})
        for (double s2 : {-1.0, 1.0})
            CHECK(hm::torus_implausibility(vec3(2.0 + s1 * r, 2.0 + s2 * r, 0.0)) < 1e-10);
    CHECK(hm::torus_implausibility(vec3(0.0, 0.0, 1.0)) > 3.0);
    CHECK_THROWS_AS(hm::torus_implausibility(vec3(-25.0, 0.0, 0.0)), hm::DomainError);
}

TEST_CASE("torus quadratic form matches an explicit matrix inverse") {
    Eigen::Matrix2d sigma;
    sigma << 1.0, -0.97, -0.97, 1.0;
    sigma /= 4096.0;
    const Eigen::Matrix2d sigma_inv = sigma.inverse();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-5.0, 10.0);
    for (int t = 0; t < 50; ++t) {
        const Eigen::VectorXd x = vec3(unif(rng), unif(rng), unif(rng));
        Eigen::Vector2d u;
        u << (x[0] - 2.0) * (x[0] - 2.0) - 3.0, (x[1] - 2.0) * (x[1] - 2.0) - 3.0;
        const double expected =
            0.1 * (std::sqrt(u.dot(sigma_inv * u)) + x[2] * x[2] / (0.04 * 0.04));
        CHECK(hm::torus_implausibility(x) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("band score maps implausibility into a usable (0,1] objective") {
    CHECK(hm::band_score(0.0, 3.0) == 1.0);
    CHECK(hm::band_score(3.0, 3.0) == 1.0);
    CHECK(hm::band_score(4.0, 3.0) == doctest::Approx(0.5));
    double prev = 1.0;
    for (double imp = 3.0; imp < 1e6; imp *= 10.0) {
        const double s = hm::band_score(imp, 3.0);
        CHECK(s > 0.0);
        CHECK(s <= prev);
        prev = s;
    }
}

TEST_CASE("random draws from the process prior") {
    hm::RandomFunctionSpec spec;
    spec.dim = 2;
    spec.seed = 42;
    const hm::RandomFunction fn(spec);
    CHECK(fn.seeds().rows() == 200);  // 100 per dimension by default

    // kriging through the seeds reproduces the seed values
    for (Eigen::Index i = 0; i < fn.seeds().rows(); i += 17)
        CHECK(fn(fn.seeds().row(i).transpose()) ==
              doctest::Approx(fn.seed_values()[i]).epsilon(1e-5));

    // the advertised target is the empirical 95th percentile of the seeds
    std::vector<double> sorted(fn.seed_values().begin(), fn.seed_values().end());
    std::sort(sorted.begin(), sorted.end());
    const double h = 0.95 * (sorted.size() - 1.0);
    const std::size_t lo = static_cast<std::size_t>(h);
    const double expected =
        sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
    CHECK(fn.target_z() == doctest::Approx(expected).epsilon(1e-12));

    // reproducible by seed, different across seeds
    const hm::RandomFunction again(spec);
    CHECK(fn(vec2(0.3, 0.7)) == again(vec2(0.3, 0.7)));
    hm::RandomFunctionSpec other = spec;
    other.seed = 43;
    CHECK(fn(vec2(0.3, 0.7)) != hm::RandomFunction(other)(vec2(0.3, 0.7)));

    CHECK_THROWS_AS(hm::RandomFunction(hm::RandomFunctionSpec{0, 1}), hm::ConfigError);
}

TEST_CASE("tabulated archive round trip and lookup modes") {
    hm::TabulatedSimulator sim;
    sim.inputs.resize(4, 2);
    sim.inputs << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0;
    sim.outputs.resize(4, 3);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 3; ++j) sim.outputs(i, j) = 10.0 * i + j;
    sim.input_box.lower = Eigen::VectorXd::Zero(2);
    sim.input_box.upper = Eigen::VectorXd::Ones(2);

    const std::string path =
        (std::filesystem::temp_directory_path() / "hm_archive_rt.csv").string();
    hm::save_tabulated(sim, path);
    const hm::TabulatedSimulator back =
        hm::load_tabulated(path, 2, hm::TableInterpolation::nearest);
    CHECK((back.inputs - sim.inputs).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.outputs - sim.outputs).cwiseAbs().maxCoeff() == 0.0);

    // nearest mode snaps to the closest archived run
    CHECK(hm::eval_tabulated(back, vec2(0.9, 0.1))[0] == 10.0);
    CHECK(hm::eval_tabulated(back, vec2(0.1, 0.9))[2] == 22.0);

    // exact mode requires a hit within 1e-12
    hm::TabulatedSimulator exact = back;
    exact.interpolation = hm::TableInterpolation::exact;
    CHECK(hm::eval_tabulated(exact, vec2(1.0, 1.0))[1] == 31.0);
    CHECK_THROWS_AS(hm::eval_tabulated(exact, vec2(0.5, 0.5)), hm::LookupError);
    CHECK_THROWS_AS(hm::eval_tabulated(back, vec3(0.1, 0.2, 0.3)), hm::DomainError);
    std::remove(path.c_str());
}
