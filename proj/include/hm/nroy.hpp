#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hm/parallel.hpp"

namespace hm {

struct SearchBox {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Eigen::Index dim() const { return lower.size(); }
    bool contains(const Eigen::VectorXd& x) const;
    void validate() const;
};

struct AnnealingConfig {
    int n_per_level = 1000;   // >= 10
    int max_levels = 30;
    double ess_fraction = 0.9;  // in (0,1)
    int move_steps = 10;
    double beta_max = 64.0;
    /// Extra Metropolis sweeps that anneal the final level at beta_max.
    /// The population-wide proposal lets particles migrate between
    /// disconnected modes of the NROY set (evening out their occupancy)
    /// while the sharp acceptance ratio pulls stragglers onto the band.
    int final_sweeps = 100;
    std::uint64_t seed = 0;
};

struct NROYLevel {
    Eigen::MatrixXd points;      // n_per_level x d
    Eigen::VectorXd objectives;  // g(x) in [0,1]
};

/// Nested annealed sample sets, level 0 uniform over the box, later levels
/// targeting g(x)^beta_j.
struct NROYLevels {
    std::vector<NROYLevel> levels;
    std::vector<double> betas;  // strictly increasing from 0

    const NROYLevel& final_level() const { return levels.back(); }
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Sequential tempering toward the maximizers of g: importance reweighting
/// with an ESS-adapted temperature increment, systematic resampling, then
/// random-walk Metropolis moves with boundary reflection.
NROYLevels sample_nroy(const Objective& objective, const SearchBox& box,
                       const AnnealingConfig& config, ExecMode exec = default_exec());

/// true iff the final level's best objective value is below floor.
bool empty_nroy_check(const NROYLevels& levels, double floor);

/// CSV columns: level,x1..xd,g.
void save_nroy_csv(const NROYLevels& levels, const std::string& path);

}  // namespace hm
