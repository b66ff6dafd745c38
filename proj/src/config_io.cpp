#include "hm/config_io.hpp"

#include <fstream>

#include <json.hpp>

#include "hm/errors.hpp"

namespace hm {

namespace {

using nlohmann::json;

std::string kind_name(SimulatorBinding::Kind kind) {
    switch (kind) {
        case SimulatorBinding::Kind::franke: return "franke";
        case SimulatorBinding::Kind::torus: return "torus";
        case SimulatorBinding::Kind::random: return "random";
        case SimulatorBinding::Kind::tabulated: return "tabulated";
    }
    return "?";
}

SimulatorBinding::Kind parse_kind(const std::string& name) {
    if (name == "franke") return SimulatorBinding::Kind::franke;
    if (name == "torus") return SimulatorBinding::Kind::torus;
    if (name == "random") return SimulatorBinding::Kind::random;
    if (name == "tabulated") return SimulatorBinding::Kind::tabulated;
    throw ConfigError("simulator.kind: unknown kind '" + name + "'");
}

template <class T>
T require(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) throw ConfigError(path + key + ": missing required field");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path + key + ": wrong type");
    }
}

template <class T>
T optional(const json& j, const std::string& path, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path + key + ": wrong type");
    }
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("config: invalid JSON: " + std::string(e.what()));
    }

    ExperimentConfig config;
    const json sim = require<json>(j, "", "simulator");
    config.simulator.kind = parse_kind(require<std::string>(sim, "simulator.", "kind"));
    config.simulator.dim = optional<int>(sim, "simulator.", "dim", 2);
    config.simulator.function_seed =
        optional<std::uint64_t>(sim, "simulator.", "function_seed", 0);
    config.simulator.table_path = optional<std::string>(sim, "simulator.", "table_path", "");
    const std::string interp =
        optional<std::string>(sim, "simulator.", "interpolation", "nearest");
    if (interp == "nearest")
        config.simulator.interpolation = TableInterpolation::nearest;
    else if (interp == "exact")
        config.simulator.interpolation = TableInterpolation::exact;
    else
        throw ConfigError("simulator.interpolation: must be nearest or exact");

    const json box = require<json>(j, "", "input_box");
    const auto lower = require<std::vector<double>>(box, "input_box.", "lower");
    const auto upper = require<std::vector<double>>(box, "input_box.", "upper");
    if (lower.size() != upper.size() || lower.empty())
        throw ConfigError("input_box: lower/upper must be nonempty and equal length");
    config.input_box.lower =
        Eigen::Map<const Eigen::VectorXd>(lower.data(), static_cast<Eigen::Index>(lower.size()));
    config.input_box.upper =
        Eigen::Map<const Eigen::VectorXd>(upper.data(), static_cast<Eigen::Index>(upper.size()));

    const json targets = require<json>(j, "", "targets");
    if (!targets.is_array() || targets.empty())
        throw ConfigError("targets: must be a nonempty array");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const std::string path = "targets[" + std::to_string(i) + "].";
        TargetDatum t;
        t.z = require<double>(targets[i], path, "z");
        t.output_id = optional<std::string>(targets[i], path, "output",
                                            "y" + std::to_string(i + 1));
        config.targets.push_back(std::move(t));
    }

    const json budgets = require<json>(j, "", "budgets");
    if (!budgets.is_array() || budgets.size() != targets.size())
        throw ConfigError("budgets: must be an array matching targets");
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        const std::string path = "budgets[" + std::to_string(i) + "].";
        UncertaintyBudget b;
        b.var_md = optional<double>(budgets[i], path, "var_md", 0.0);
        b.var_me = optional<double>(budgets[i], path, "var_me", 0.0);
        b.k = optional<double>(budgets[i], path, "k", 3.0);
        config.budgets.push_back(b);
    }

    config.initial_design_size = optional<int>(j, "", "initial_design_size", 0);
    config.batch_size = optional<int>(j, "", "batch_size", 0);
    config.n_waves = optional<int>(j, "", "n_waves", 3);
    config.criterion = parse_criterion(optional<std::string>(j, "", "criterion", "entropy"));
    config.criterion_options.per_component =
        optional<bool>(j, "", "criterion_per_component", false);
    config.criterion_options.eci_gp_only = optional<bool>(j, "", "eci_gp_only", false);

    if (j.contains("annealing")) {
        const json a = j.at("annealing");
        const AnnealingConfig defaults;
        config.annealing.n_per_level =
            optional<int>(a, "annealing.", "n_per_level", defaults.n_per_level);
        config.annealing.max_levels =
            optional<int>(a, "annealing.", "max_levels", defaults.max_levels);
        config.annealing.ess_fraction =
            optional<double>(a, "annealing.", "ess_fraction", defaults.ess_fraction);
        config.annealing.move_steps =
            optional<int>(a, "annealing.", "move_steps", defaults.move_steps);
        config.annealing.beta_max =
            optional<double>(a, "annealing.", "beta_max", defaults.beta_max);
        config.annealing.final_sweeps =
            optional<int>(a, "annealing.", "final_sweeps", defaults.final_sweeps);
    }

    config.ensemble_size = optional<int>(j, "", "ensemble_size", 20);
    if (j.contains("mcmc")) {
        const json m = j.at("mcmc");
        config.mcmc.burn_in = optional<int>(m, "mcmc.", "burn_in", 300);
        config.mcmc.thin = optional<int>(m, "mcmc.", "thin", 10);
        config.mcmc.initial_step = optional<double>(m, "mcmc.", "initial_step", 0.3);
    }
    if (j.contains("prior")) {
        const json p = j.at("prior");
        config.prior.lengthscale_median =
            optional<double>(p, "prior.", "lengthscale_median", 0.5);
        config.prior.lengthscale_log_sd =
            optional<double>(p, "prior.", "lengthscale_log_sd", 1.0);
        config.prior.signal_median = optional<double>(p, "prior.", "signal_median", -1.0);
        config.prior.signal_log_sd = optional<double>(p, "prior.", "signal_log_sd", 1.0);
        config.prior.nugget = optional<double>(p, "prior.", "nugget", 1e-8);
        const std::string family = optional<std::string>(p, "prior.", "kernel",
                                                         "squared-exponential");
        if (family == "squared-exponential")
            config.prior.family = KernelFamily::squared_exponential;
        else if (family == "matern-5/2")
            config.prior.family = KernelFamily::matern52;
        else
            throw ConfigError("prior.kernel: must be squared-exponential or matern-5/2");
    }

    config.replications = optional<int>(j, "", "replications", 1);
    config.master_seed = optional<std::uint64_t>(j, "", "seed", 0);
    config.second_max_draws = optional<int>(j, "", "second_max_draws", 2048);
    config.cutoff_alpha = optional<double>(j, "", "cutoff_alpha", 0.5);
    config.sampler_only = optional<bool>(j, "", "sampler_only", false);
    config.include_penultimate_on_degenerate =
        optional<bool>(j, "", "include_penultimate_on_degenerate", false);

    config.validate();
    return config;
}

ExperimentConfig load_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_config_json(text);
}

std::string dump_config_json(const ExperimentConfig& config) {
    json j;
    j["simulator"]["kind"] = kind_name(config.simulator.kind);
    j["simulator"]["dim"] = config.simulator.dim;
    j["simulator"]["function_seed"] = config.simulator.function_seed;
    if (!config.simulator.table_path.empty())
        j["simulator"]["table_path"] = config.simulator.table_path;
    j["simulator"]["interpolation"] =
        config.simulator.interpolation == TableInterpolation::exact ? "exact" : "nearest";
    j["input_box"]["lower"] =
        std::vector<double>(config.input_box.lower.begin(), config.input_box.lower.end());
    j["input_box"]["upper"] =
        std::vector<double>(config.input_box.upper.begin(), config.input_box.upper.end());
    j["targets"] = json::array();
    for (const auto& t : config.targets)
        j["targets"].push_back({{"z", t.z}, {"output", t.output_id}});
    j["budgets"] = json::array();
    for (const auto& b : config.budgets)
        j["budgets"].push_back({{"var_md", b.var_md}, {"var_me", b.var_me}, {"k", b.k}});
    j["initial_design_size"] = config.initial_design_size;
    j["batch_size"] = config.batch_size;
    j["n_waves"] = config.n_waves;
    j["criterion"] = criterion_name(config.criterion);
    j["criterion_per_component"] = config.criterion_options.per_component;
    j["eci_gp_only"] = config.criterion_options.eci_gp_only;
    j["annealing"] = {{"n_per_level", config.annealing.n_per_level},
                      {"max_levels", config.annealing.max_levels},
                      {"ess_fraction", config.annealing.ess_fraction},
                      {"move_steps", config.annealing.move_steps},
                      {"beta_max", config.annealing.beta_max},
                      {"final_sweeps", config.annealing.final_sweeps}};
    j["ensemble_size"] = config.ensemble_size;
    j["mcmc"] = {{"burn_in", config.mcmc.burn_in},
                 {"thin", config.mcmc.thin},
                 {"initial_step", config.mcmc.initial_step}};
    j["prior"] = {{"lengthscale_median", config.prior.lengthscale_median},
                  {"lengthscale_log_sd", config.prior.lengthscale_log_sd},
                  {"signal_median", config.prior.signal_median},
                  {"signal_log_sd", config.prior.signal_log_sd},
                  {"nugget", config.prior.nugget},
                  {"kernel", config.prior.family == KernelFamily::matern52
                                 ? "matern-5/2"
                                 : "squared-exponential"}};
    j["replications"] = config.replications;
    j["seed"] = config.master_seed;
    j["second_max_draws"] = config.second_max_draws;
    j["cutoff_alpha"] = config.cutoff_alpha;
    j["sampler_only"] = config.sampler_only;
    j["include_penultimate_on_degenerate"] = config.include_penultimate_on_degenerate;
    return j.dump(2);
}

}  // namespace hm
