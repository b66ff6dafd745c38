// Batch front end: configure, run, resume, and report history-matching
// experiments; drive the built-in test problems; emit plot-ready CSV data.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hm/config_io.hpp"
#include "hm/errors.hpp"
#include "hm/math_util.hpp"
#include "hm/orchestrator.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

void set_jobs(int jobs) {
    if (jobs <= 0) {
        if (const char* env = std::getenv("HM_JOBS")) jobs = std::atoi(env);
    }
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif
}

void write_manifest(const hm::ExperimentConfig& config, const fs::path& out_dir) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config_hash"] = hm::config_hash(config);
    j["seed"] = config.master_seed;
    j["config"] = nlohmann::json::parse(hm::dump_config_json(config));
    std::ofstream out(out_dir / "manifest.json");
    out << j.dump(2) << "\n";
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& resume_path, const std::string& out_dir_s, int jobs) {
    set_jobs(jobs);
    hm::ExperimentConfig config = hm::load_config_json(config_path);
    if (seed) {
        config.master_seed = *seed;
        config.validate();
    }
    const fs::path out_dir(out_dir_s);
    fs::create_directories(out_dir);

    if (config.sampler_only) {
        // analytic-objective mode: run the annealed sampler per replication
        if (config.simulator.kind != hm::SimulatorBinding::Kind::torus)
            throw hm::ConfigError("sampler_only: only the torus problem is analytic");
        const double k = config.budgets.front().k;
        const hm::Objective objective = [k](const Eigen::VectorXd& x) {
            return hm::band_score(hm::torus_implausibility(x), k);
        };
        for (int r = 0; r < config.replications; ++r) {
            hm::AnnealingConfig annealing = config.annealing;
            annealing.seed = hm::mix_seed(config.master_seed, 0x9E11u,
                                          static_cast<std::uint64_t>(r));
            const hm::NROYLevels levels =
                hm::sample_nroy(objective, config.input_box, annealing);
            hm::save_nroy_csv(levels,
                              (out_dir / ("nroy_rep" + std::to_string(r) + ".csv")).string());
        }
        write_manifest(config, out_dir);
        return 0;
    }

    std::vector<hm::WaveState> states;
    std::vector<hm::MetricRow> rows;
    std::vector<hm::WaveState>* resume_states = nullptr;
    if (!resume_path.empty()) {
        hm::Checkpoint ckpt = hm::load_checkpoint(resume_path);
        if (ckpt.config_hash != hm::config_hash(config))
            throw hm::ConfigError("resume: checkpoint was built from a different config");
        states = std::move(ckpt.states);
        rows = std::move(ckpt.rows);
        resume_states = &states;
    } else {
        resume_states = &states;  // stays empty: fresh start, filled on return
    }

    hm::RunHooks hooks;
    const std::string ckpt_path = (out_dir / "checkpoint.json").string();
    hooks.on_wave = [&](int wave, const std::vector<hm::WaveState>& ws,
                        const std::vector<hm::MetricRow>& done_rows) {
        hm::save_checkpoint(ckpt_path, config, wave, ws, done_rows);
    };
    hm::ReplicationReport report = hm::run_replications(
        config, hm::default_exec(), hooks, resume_states, std::move(rows));
    hm::save_metrics_csv(report.rows, (out_dir / "metrics.csv").string());
    hm::save_checkpoint(ckpt_path, config, config.n_waves, states, report.rows);
    write_manifest(config, out_dir);
    for (const auto& f : report.failures) std::cerr << "warning: " << f << "\n";
    return 0;
}

int cmd_testbed(const std::string& problem, int dim, std::uint64_t seed,
                const std::string& out_dir_s) {
    const fs::path out_dir(out_dir_s);
    fs::create_directories(out_dir);
    nlohmann::json j;
    j["seed"] = 1234;
    j["replications"] = 1;
    j["n_waves"] = 3;

    if (problem == "franke") {
        if (dim != 0 && dim != 2)
            throw hm::ConfigError("problem franke: fixed at 2 dimensions");
        j["simulator"] = {{"kind", "franke"}, {"dim", 2}};
        j["input_box"] = {{"lower", {0.0, 0.0}}, {"upper", {1.0, 1.0}}};
        j["targets"] = {{{"z", 0.6}, {"output", "y"}}};
        j["budgets"] = {{{"var_md", 0.0}, {"var_me", 1e-4}, {"k", 3.0}}};
        j["initial_design_size"] = 20;
        j["batch_size"] = 10;
        j["criterion"] = "entropy";
        // probe grid for plotting
        std::ofstream probe(out_dir / "franke_probe.csv");
        probe.precision(17);
        probe << "x1,x2,y\n";
        const int grid = 101;
        for (int a = 0; a < grid; ++a)
            for (int b = 0; b < grid; ++b) {
                Eigen::VectorXd x(2);
                x << static_cast<double>(a) / (grid - 1),
                    static_cast<double>(b) / (grid - 1);
                probe << x[0] << "," << x[1] << "," << hm::franke(x) << "\n";
            }
    } else if (problem == "torus") {
        if (dim != 0 && dim != 3)
            throw hm::ConfigError("problem torus: fixed at 3 dimensions");
        j["simulator"] = {{"kind", "torus"}, {"dim", 3}};
        j["input_box"] = {{"lower", {-20.0, -20.0, -20.0}}, {"upper", {40.0, 40.0, 40.0}}};
        j["targets"] = {{{"z", 0.0}, {"output", "I"}}};
        j["budgets"] = {{{"var_md", 0.0}, {"var_me", 1.0}, {"k", 3.0}}};
        j["sampler_only"] = true;  // the analytic model is searched directly
        std::ofstream probe(out_dir / "torus_probe.csv");
        probe.precision(17);
        probe << "x1,x2,x3,implausibility\n";
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unif(-20.0, 40.0);
        for (int i = 0; i < 1000; ++i) {
            Eigen::VectorXd x(3);
            for (int c = 0; c < 3; ++c) x[c] = unif(rng);
            probe << x[0] << "," << x[1] << "," << x[2] << ","
                  << hm::torus_implausibility(x) << "\n";
        }
    } else if (problem == "random") {
        if (dim < 1) throw hm::ConfigError("problem random: --dim must be >= 1");
        hm::RandomFunctionSpec spec;
        spec.dim = dim;
        spec.seed = seed;
        const hm::RandomFunction fn(spec);
        j["simulator"] = {{"kind", "random"}, {"dim", dim}, {"function_seed", seed}};
        std::vector<double> lo(static_cast<std::size_t>(dim), 0.0);
        std::vector<double> hi(static_cast<std::size_t>(dim), 1.0);
        j["input_box"] = {{"lower", lo}, {"upper", hi}};
        j["targets"] = {{{"z", fn.target_z()}, {"output", "y"}}};
        j["budgets"] = {{{"var_md", 0.0}, {"var_me", 1e-2}, {"k", 3.0}}};
        std::ofstream dump(out_dir / "random_seeds.csv");
        dump.precision(17);
        for (int c = 0; c < dim; ++c) dump << "x" << (c + 1) << ",";
        dump << "y\n";
        for (Eigen::Index i = 0; i < fn.seeds().rows(); ++i) {
            for (int c = 0; c < dim; ++c) dump << fn.seeds()(i, c) << ",";
            dump << fn.seed_values()[i] << "\n";
        }
    } else {
        throw hm::ConfigError("--problem: must be franke, torus, or random");
    }

    std::ofstream out(out_dir / (problem + "_config.json"));
    out << j.dump(2) << "\n";
    // round-trip through the parser so the emitted config is known-valid
    hm::parse_config_json(j.dump());
    return 0;
}

int cmd_report(const std::string& metrics_path, const std::string& out_dir_s) {
    const fs::path out_dir(out_dir_s);
    fs::create_directories(out_dir);
    const std::vector<hm::MetricRow> rows = hm::load_metrics_csv(metrics_path);
    if (rows.empty()) throw hm::ParseError("metrics file has no rows");
    hm::save_boxplot_csv(hm::boxplot_table(rows), (out_dir / "boxplot.csv").string());
    hm::save_trend_csv(hm::trend_table(rows), (out_dir / "trend.csv").string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"History matching with probabilistic emulators and active learning"};
    app.require_subcommand(1);

    std::string config_path, resume_path, out_dir = ".", metrics_path, problem;
    std::optional<std::uint64_t> seed_override;
    std::uint64_t testbed_seed = 0;
    int jobs = 0, dim = 0;

    auto* run = app.add_subcommand("run", "Run a history-matching experiment");
    run->add_option("config", config_path, "Experiment config JSON")->required();
    run->add_option("--seed", seed_override, "Override the master seed");
    run->add_option("--resume", resume_path, "Continue from a checkpoint JSON");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--jobs", jobs, "Parallel replication cap (default: HM_JOBS)");

    auto* testbed = app.add_subcommand("testbed", "Materialize a built-in test problem");
    testbed->add_option("--problem", problem, "franke | torus | random")->required();
    testbed->add_option("--dim", dim, "Input dimension (random only)");
    testbed->add_option("--seed", testbed_seed, "Problem seed");
    testbed->add_option("--out", out_dir, "Output directory");

    auto* report = app.add_subcommand("report", "Summarize a metrics CSV");
    report->add_option("metrics", metrics_path, "Metrics CSV path")->required();
    report->add_option("--out", out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, seed_override, resume_path, out_dir, jobs);
        if (testbed->parsed()) return cmd_testbed(problem, dim, testbed_seed, out_dir);
        if (report->parsed()) return cmd_report(metrics_path, out_dir);
    } catch (const hm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const hm::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
