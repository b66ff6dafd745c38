#include "hm/design.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "hm/errors.hpp"

namespace hm {

Eigen::MatrixXd latin_hypercube(int n, int dim, std::uint64_t seed) {
    if (n < 1 || dim < 1) throw ConfigError("latin_hypercube: n and dim must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif;
    Eigen::MatrixXd points(n, dim);
    std::vector<int> strata(static_cast<std::size_t>(n));
    for (int j = 0; j < dim; ++j) {
        std::iota(strata.begin(), strata.end(), 0);
        std::shuffle(strata.begin(), strata.end(), rng);
        for (int i = 0; i < n; ++i)
            points(i, j) = (static_cast<double>(strata[static_cast<std::size_t>(i)]) +
                            unif(rng)) /
                           static_cast<double>(n);
    }
    return points;
}

}  // namespace hm
