#pragma once

#include <Eigen/Dense>
#include <string>

namespace hm {

/// Simulator input/output pairs on the normalized unit cube.
struct TrainingSet {
    Eigen::MatrixXd inputs;   // n x d, every coordinate in [0,1]
    Eigen::VectorXd outputs;  // n, simulator output units

    Eigen::Index size() const { return inputs.rows(); }
    Eigen::Index dim() const { return inputs.cols(); }

    /// Throws ConfigError on empty data, out-of-cube coordinates,
    /// duplicate input rows, or non-finite outputs.
    void validate() const;

    void append(const Eigen::VectorXd& x, double y);
};

/// CSV with header x1..xd,y.
TrainingSet load_training_csv(const std::string& path);
void save_training_csv(const TrainingSet& ts, const std::string& path);

}  // namespace hm
