#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace hm {

/// Latin hypercube design on [0,1]^d: n points, one per stratum per
/// dimension, randomized within strata.
Eigen::MatrixXd latin_hypercube(int n, int dim, std::uint64_t seed);

}  // namespace hm
