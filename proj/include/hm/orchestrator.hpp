#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hm/batch_design.hpp"
#include "hm/criteria.hpp"
#include "hm/ensemble.hpp"
#include "hm/implausibility.hpp"
#include "hm/nroy.hpp"
#include "hm/report.hpp"
#include "hm/scoring.hpp"
#include "hm/testbed.hpp"

namespace hm {

struct SimulatorBinding {
    enum class Kind { franke, torus, random, tabulated };
    Kind kind = Kind::franke;
    int dim = 2;
    std::uint64_t function_seed = 0;         // random-function testbed
    std::string table_path;                  // tabulated archive
    TableInterpolation interpolation = TableInterpolation::nearest;
};

struct ExperimentConfig {
    SimulatorBinding simulator;
    SearchBox input_box;  // native units; emulation happens on [0,1]^d
    std::vector<TargetDatum> targets;
    std::vector<UncertaintyBudget> budgets;  // one per output
    int initial_design_size = 0;             // 0 means 10 * d
    int batch_size = 0;                      // 0 means 5 * d
    int n_waves = 3;
    CriterionId criterion = CriterionId::entropy;
    CriterionOptions criterion_options;
    AnnealingConfig annealing;
    int ensemble_size = 20;
    McmcConfig mcmc;
    HyperPrior prior;
    int replications = 1;
    std::uint64_t master_seed = 0;
    int second_max_draws = 2048;
    double cutoff_alpha = 0.5;
    bool sampler_only = false;  // run the NROY sampler on an analytic objective
    bool include_penultimate_on_degenerate = false;

    int resolved_initial_design() const;
    int resolved_batch_size() const;
    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Multi-output simulator in native input units.
using Simulator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

Simulator make_simulator(const SimulatorBinding& binding);

/// LHS design mapped to the native box.
Eigen::MatrixXd initial_design(const SearchBox& box, int n, std::uint64_t seed);

/// One history-matching wave. Training inputs are stored in native units;
/// points are never discarded across waves.
struct WaveState {
    int wave_index = 0;       // number of completed waves
    Eigen::MatrixXd inputs;   // n x d, native
    Eigen::MatrixXd outputs;  // n x q
    NROYLevels nroy;
    std::vector<RankedSample> ranked;       // normalized points
    std::vector<Eigen::VectorXd> batch;     // native points selected this wave
    std::vector<WaveMetrics> metrics;       // per output
    bool relaxed_cutoff = false;
    double seconds = 0.0;
};

/// fit -> sample NROY -> rank -> cutoff -> maximin -> simulate -> augment.
WaveState run_wave(const WaveState& state, const ExperimentConfig& config,
                   const Simulator& simulator, int replication,
                   ExecMode exec = default_exec());

/// true iff max predicted error <= sqrt(var_md + var_me) for every output,
/// or the wave cap is reached.
bool stopping_rule(const WaveState& state, const ExperimentConfig& config);

struct ReplicationReport {
    std::vector<MetricRow> rows;
    std::vector<std::string> failures;  // recorded, run continues
};

struct RunHooks {
    /// Called after every completed wave with the per-replication states and
    /// the metric rows accumulated so far; used for checkpointing.
    std::function<void(int wave, const std::vector<WaveState>&,
                       const std::vector<MetricRow>&)>
        on_wave;
};

ReplicationReport run_replications(const ExperimentConfig& config,
                                   ExecMode exec = default_exec(),
                                   const RunHooks& hooks = {},
                                   std::vector<WaveState>* resume_states = nullptr,
                                   std::vector<MetricRow> resume_rows = {});

/// Versioned JSON checkpoint of the per-replication wave states and the
/// metric rows accumulated so far.
void save_checkpoint(const std::string& path, const ExperimentConfig& config,
                     int wave, const std::vector<WaveState>& states,
                     const std::vector<MetricRow>& rows);
struct Checkpoint {
    int wave = 0;
    std::vector<WaveState> states;
    std::vector<MetricRow> rows;
    std::string config_hash;
};
Checkpoint load_checkpoint(const std::string& path);

std::string config_hash(const ExperimentConfig& config);

}  // namespace hm
