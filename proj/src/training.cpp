#include "hm/training.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hm/errors.hpp"

namespace hm {

void TrainingSet::validate() const {
    if (inputs.rows() < 1) throw ConfigError("training set is empty");
    if (outputs.size() != inputs.rows())
        throw ConfigError("training set input/output size mismatch");
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        for (Eigen::Index j = 0; j < inputs.cols(); ++j) {
            const double v = inputs(i, j);
            if (!(v >= 0.0 && v <= 1.0))
                throw ConfigError("training input outside [0,1] at row " + std::to_string(i));
        }
        if (!std::isfinite(outputs[i]))
            throw ConfigError("non-finite training output at row " + std::to_string(i));
    }
    for (Eigen::Index i = 0; i < inputs.rows(); ++i)
        for (Eigen::Index j = i + 1; j < inputs.rows(); ++j)
            if ((inputs.row(i) - inputs.row(j)).norm() == 0.0)
                throw ConfigError("duplicate training input rows " + std::to_string(i) +
                                  " and " + std::to_string(j));
}

void TrainingSet::append(const Eigen::VectorXd& x, double y) {
    inputs.conservativeResize(inputs.rows() + 1, x.size());
    inputs.row(inputs.rows() - 1) = x.transpose();
    outputs.conservativeResize(outputs.size() + 1);
    outputs[outputs.size() - 1] = y;
}

TrainingSet load_training_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing header in " + path);
    int ncols = 1;
    for (char c : line)
        if (c == ',') ++ncols;
    if (ncols < 2) throw ParseError("expected at least x1,y columns in " + path);
    const int d = ncols - 1;

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
        if (static_cast<int>(row.size()) != ncols)
            throw ParseError("ragged row in " + path);
        rows.push_back(std::move(row));
    }
    TrainingSet ts;
    ts.inputs.resize(static_cast<Eigen::Index>(rows.size()), d);
    ts.outputs.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < d; ++j) ts.inputs(static_cast<Eigen::Index>(i), j) = rows[i][j];
        ts.outputs[static_cast<Eigen::Index>(i)] = rows[i][d];
    }
    return ts;
}

void save_training_csv(const TrainingSet& ts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out.precision(17);
    for (Eigen::Index j = 0; j < ts.dim(); ++j) out << "x" << (j + 1) << ",";
    out << "y\n";
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        for (Eigen::Index j = 0; j < ts.dim(); ++j) out << ts.inputs(i, j) << ",";
        out << ts.outputs[i] << "\n";
    }
}

}  // namespace hm
