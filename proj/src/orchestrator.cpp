#include "hm/orchestrator.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <set>

#include <json.hpp>

#include "hm/config_io.hpp"
#include "hm/design.hpp"
#include "hm/errors.hpp"
#include "hm/math_util.hpp"

#include <fstream>

namespace hm {

int ExperimentConfig::resolved_initial_design() const {
    return initial_design_size > 0 ? initial_design_size
                                   : 10 * static_cast<int>(input_box.dim());
}

int ExperimentConfig::resolved_batch_size() const {
    return batch_size > 0 ? batch_size : 5 * static_cast<int>(input_box.dim());
}

void ExperimentConfig::validate() const {
    input_box.validate();
    if (targets.empty()) throw ConfigError("targets: at least one output required");
    if (budgets.size() != targets.size())
        throw ConfigError("budgets: must match targets in length");
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        if (budgets[i].var_md < 0.0) throw ConfigError("budgets.var_md: must be >= 0");
        if (budgets[i].var_me < 0.0) throw ConfigError("budgets.var_me: must be >= 0");
        if (!(budgets[i].k > 0.0)) throw ConfigError("budgets.k: must be > 0");
        if (!std::isfinite(targets[i].z)) throw ConfigError("targets.z: must be finite");
    }
    if (!sampler_only) {
        if (resolved_initial_design() < static_cast<int>(input_box.dim()) + 1)
            throw ConfigError("initial_design_size: must be >= d+1");
        if (resolved_batch_size() < 1) throw ConfigError("batch_size: must be >= 1");
        if (ensemble_size < 1) throw ConfigError("ensemble_size: must be >= 1");
    }
    if (n_waves < 1) throw ConfigError("n_waves: must be >= 1");
    if (replications < 1) throw ConfigError("replications: must be >= 1");
    if (!(cutoff_alpha > 0.0 && cutoff_alpha <= 1.0))
        throw ConfigError("cutoff_alpha: must be in (0,1]");
    if (second_max_draws < 1) throw ConfigError("second_max_draws: must be >= 1");
    if (simulator.kind == SimulatorBinding::Kind::franke && input_box.dim() != 2)
        throw ConfigError("simulator: franke is 2-dimensional");
    if (simulator.kind == SimulatorBinding::Kind::torus && !sampler_only)
        throw ConfigError("simulator: torus runs sampler_only (no emulator)");
}

Simulator make_simulator(const SimulatorBinding& binding) {
    switch (binding.kind) {
        case SimulatorBinding::Kind::franke:
            return [](const Eigen::VectorXd& x) {
                Eigen::VectorXd y(1);
                y[0] = franke(x);
                return y;
            };
        case SimulatorBinding::Kind::random: {
            RandomFunctionSpec spec;
            spec.dim = binding.dim;
            spec.seed = binding.function_seed;
            auto fn = std::make_shared<RandomFunction>(spec);
            return [fn](const Eigen::VectorXd& x) {
                Eigen::VectorXd y(1);
                y[0] = (*fn)(x);
                return y;
            };
        }
        case SimulatorBinding::Kind::tabulated: {
            auto sim = std::make_shared<TabulatedSimulator>(
                load_tabulated(binding.table_path, binding.dim, binding.interpolation));
            return [sim](const Eigen::VectorXd& x) { return eval_tabulated(*sim, x); };
        }
        case SimulatorBinding::Kind::torus:
            throw ConfigError("simulator: torus has no emulated simulator binding");
    }
    throw ConfigError("simulator: bad kind");
}

Eigen::MatrixXd initial_design(const SearchBox& box, int n, std::uint64_t seed) {
    Eigen::MatrixXd unit = latin_hypercube(n, static_cast<int>(box.dim()), seed);
    for (Eigen::Index j = 0; j < box.dim(); ++j)
        unit.col(j) = box.lower[j] + (box.upper[j] - box.lower[j]) * unit.col(j).array();
    return unit;
}

namespace {

Eigen::VectorXd normalize(const SearchBox& box, const Eigen::VectorXd& x) {
    return (x - box.lower).cwiseQuotient(box.upper - box.lower);
}

Eigen::VectorXd denormalize(const SearchBox& box, const Eigen::VectorXd& u) {
    return box.lower + (box.upper - box.lower).cwiseProduct(u);
}

std::uint64_t point_hash(const Eigen::VectorXd& x) {
    std::uint64_t h = 0x2545f4914f6cdd1dULL;
    for (Eigen::Index j = 0; j < x.size(); ++j)
        h = mix_seed(h, std::bit_cast<std::uint64_t>(x[j]));
    return h;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (a[j] < b[j]) return true;
        if (a[j] > b[j]) return false;
    }
    return false;
}

double criterion_value(CriterionId id, const CriterionInput& ci,
                       const CriterionOptions& options) {
    switch (id) {
        case CriterionId::eci: return eci(ci, options.eci_gp_only).value;
        case CriterionId::risk: return expected_risk(ci).value;
        case CriterionId::entropy: return entropic_profile(ci).value;
        case CriterionId::lhs: return 1.0;
    }
    return 0.0;
}

std::uint64_t rep_seed_of(const ExperimentConfig& config, int replication) {
    return mix_seed(config.master_seed, 0x9E11u, static_cast<std::uint64_t>(replication));
}

}  // namespace

WaveState run_wave(const WaveState& state, const ExperimentConfig& config,
                   const Simulator& simulator, int replication, ExecMode exec) {
    const auto t0 = std::chrono::steady_clock::now();
    config.validate();
    const Eigen::Index d = config.input_box.dim();
    const std::size_t q = config.targets.size();
    const std::uint64_t rep_seed = rep_seed_of(config, replication);
    const int wave = state.wave_index;

    // normalized training sets, one per output
    Eigen::MatrixXd unit_inputs(state.inputs.rows(), d);
    for (Eigen::Index i = 0; i < state.inputs.rows(); ++i)
        unit_inputs.row(i) = normalize(config.input_box, state.inputs.row(i)).transpose();

    std::vector<PosteriorEnsemble> ensembles(q);
    for (std::size_t o = 0; o < q; ++o) {
        TrainingSet ts;
        ts.inputs = unit_inputs;
        ts.outputs = state.outputs.col(static_cast<Eigen::Index>(o));
        ensembles[o] = sample_hyperposterior(
            ts, config.prior, config.ensemble_size,
            mix_seed(rep_seed, 0xF17u, static_cast<std::uint64_t>(wave) * 131u + o),
            config.mcmc);
    }

    Objective objective;
    if (q == 1) {
        objective = [&](const Eigen::VectorXd& u) {
            return prob_nonimplausible(predict(ensembles[0], u), config.budgets[0],
                                       config.targets[0]);
        };
    } else {
        objective = [&](const Eigen::VectorXd& u) {
            std::vector<PredictiveMixture> mixes(q);
            for (std::size_t o = 0; o < q; ++o) mixes[o] = predict(ensembles[o], u);
            const std::uint64_t draw_seed =
                mix_seed(rep_seed, static_cast<std::uint64_t>(wave), point_hash(u));
            return prob_second_max_nonimplausible(mixes, config.budgets, config.targets,
                                                  config.second_max_draws, draw_seed)
                .probability;
        };
    }

    SearchBox unit_box;
    unit_box.lower = Eigen::VectorXd::Zero(d);
    unit_box.upper = Eigen::VectorXd::Ones(d);
    AnnealingConfig annealing = config.annealing;
    annealing.seed = mix_seed(rep_seed, 0x5A3u, static_cast<std::uint64_t>(wave));

    WaveState next;
    next.nroy = sample_nroy(objective, unit_box, annealing, exec);

    // candidate NROY samples: the final level, optionally widened with the
    // penultimate one when the final level has collapsed
    std::vector<Eigen::VectorXd> candidates;
    auto add_level = [&](const NROYLevel& level) {
        for (Eigen::Index i = 0; i < level.points.rows(); ++i)
            candidates.push_back(level.points.row(i).transpose());
    };
    add_level(next.nroy.final_level());
    if (config.include_penultimate_on_degenerate && next.nroy.levels.size() >= 2) {
        Eigen::VectorXd g = next.nroy.final_level().objectives;
        std::sort(g.data(), g.data() + g.size());
        const double gmax = g[g.size() - 1];
        if (gmax - g[(g.size() - 1) / 4] < 1e-3 * gmax)
            add_level(next.nroy.levels[next.nroy.levels.size() - 2]);
    }

    // drop exact duplicates (resampled particles) and points already in the
    // training set; duplicate training rows are rejected at fit time
    {
        std::set<std::vector<double>> seen;
        for (Eigen::Index i = 0; i < unit_inputs.rows(); ++i) {
            std::vector<double> key(unit_inputs.row(i).begin(), unit_inputs.row(i).end());
            seen.insert(std::move(key));
        }
        std::vector<Eigen::VectorXd> unique;
        for (const auto& c : candidates) {
            std::vector<double> key(c.begin(), c.end());
            if (seen.insert(std::move(key)).second) unique.push_back(c);
        }
        candidates = std::move(unique);
    }
    if (candidates.empty())
        throw FlatObjectiveError("no fresh NROY candidates available");

    // predictive mixtures per output over the candidate set
    std::vector<std::vector<PredictiveMixture>> mixes(q);
    for (std::size_t o = 0; o < q; ++o) {
        mixes[o].resize(candidates.size());
        for_each_index(candidates.size(), exec, [&, o](std::size_t i) {
            mixes[o][i] = predict(ensembles[o], candidates[i]);
        });
    }

    next.metrics.resize(q);
    for (std::size_t o = 0; o < q; ++o)
        next.metrics[o] = wave_metrics(mixes[o], config.targets[o], exec);

    // rank: single-output uses the criterion directly; multi-output averages
    // the per-output scores
    next.ranked.resize(candidates.size());
    for_each_index(candidates.size(), exec, [&](std::size_t i) {
        double score = 0.0;
        if (config.criterion != CriterionId::lhs) {
            for (std::size_t o = 0; o < q; ++o) {
                if (config.criterion_options.per_component) {
                    for (const auto& comp : mixes[o][i].components) {
                        CriterionInput ci{comp.mean, std::sqrt(comp.variance),
                                          config.budgets[o], config.targets[o].z};
                        score += comp.weight *
                                 criterion_value(config.criterion, ci,
                                                 config.criterion_options);
                    }
                } else {
                    const Moments mom = mixture_moments(mixes[o][i]);
                    CriterionInput ci{mom.mean, std::sqrt(mom.variance),
                                      config.budgets[o], config.targets[o].z};
                    score += criterion_value(config.criterion, ci,
                                             config.criterion_options);
                }
            }
            score /= static_cast<double>(q);
        } else {
            score = 1.0;
        }
        next.ranked[i] = {candidates[i], {score, config.criterion}};
    });
    std::stable_sort(next.ranked.begin(), next.ranked.end(),
                     [](const RankedSample& a, const RankedSample& b) {
                         if (a.score.value != b.score.value)
                             return a.score.value > b.score.value;
                         return lex_less(a.point, b.point);
                     });

    SelectionConfig selection{config.cutoff_alpha, config.resolved_batch_size()};
    selection.batch_size =
        std::min<int>(selection.batch_size, static_cast<int>(next.ranked.size()));
    const MaximinResult picked = select_batch(next.ranked, unit_inputs, selection);
    next.relaxed_cutoff = picked.relaxed;

    next.inputs = state.inputs;
    next.outputs = state.outputs;
    for (const auto& u : picked.batch) {
        const Eigen::VectorXd x = denormalize(config.input_box, u);
        const Eigen::VectorXd y = simulator(x);
        if (static_cast<std::size_t>(y.size()) != q)
            throw ConfigError("simulator output arity mismatch");
        next.batch.push_back(x);
        next.inputs.conservativeResize(next.inputs.rows() + 1, d);
        next.inputs.row(next.inputs.rows() - 1) = x.transpose();
        next.outputs.conservativeResize(next.outputs.rows() + 1, Eigen::NoChange);
        next.outputs.row(next.outputs.rows() - 1) = y.transpose();
    }
    next.wave_index = state.wave_index + 1;
    next.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return next;
}

bool stopping_rule(const WaveState& state, const ExperimentConfig& config) {
    if (state.wave_index >= config.n_waves) return true;
    if (state.metrics.empty()) return false;
    for (std::size_t o = 0; o < state.metrics.size(); ++o) {
        const double elicited =
            std::sqrt(config.budgets[o].var_md + config.budgets[o].var_me);
        if (state.metrics[o].max_predicted_error > elicited) return false;
    }
    return true;
}

ReplicationReport run_replications(const ExperimentConfig& config, ExecMode exec,
                                   const RunHooks& hooks,
                                   std::vector<WaveState>* resume_states,
                                   std::vector<MetricRow> resume_rows) {
    config.validate();
    const int reps = config.replications;
    const Simulator simulator = make_simulator(config.simulator);

    ReplicationReport report;
    report.rows = std::move(resume_rows);
    std::vector<WaveState> states(static_cast<std::size_t>(reps));
    std::vector<std::string> failures(static_cast<std::size_t>(reps));
    std::vector<char> done(static_cast<std::size_t>(reps), 0);

    int start_wave = 0;
    if (resume_states && !resume_states->empty()) {
        if (static_cast<int>(resume_states->size()) != reps)
            throw ConfigError("resume: replication count mismatch");
        states = *resume_states;
        start_wave = states.front().wave_index;
        for (int r = 0; r < reps; ++r)
            if (stopping_rule(states[static_cast<std::size_t>(r)], config)) done[r] = 1;
    } else {
        for_each_index(static_cast<std::size_t>(reps), exec, [&](std::size_t r) {
            try {
                const std::uint64_t rep_seed = rep_seed_of(config, static_cast<int>(r));
                WaveState s;
                s.inputs = initial_design(config.input_box, config.resolved_initial_design(),
                                          mix_seed(rep_seed, 0xDE516u));
                s.outputs.resize(s.inputs.rows(),
                                 static_cast<Eigen::Index>(config.targets.size()));
                for (Eigen::Index i = 0; i < s.inputs.rows(); ++i)
                    s.outputs.row(i) = simulator(s.inputs.row(i).transpose()).transpose();
                states[r] = std::move(s);
            } catch (const std::exception& e) {
                failures[r] = e.what();
                done[r] = 1;
            }
        });
    }

    for (int wave = start_wave; wave < config.n_waves; ++wave) {
        bool all_done = true;
        for (int r = 0; r < reps; ++r)
            if (!done[static_cast<std::size_t>(r)]) all_done = false;
        if (all_done) break;

        for_each_index(static_cast<std::size_t>(reps), exec, [&](std::size_t r) {
            if (done[r]) return;
            try {
                states[r] = run_wave(states[r], config, simulator, static_cast<int>(r),
                                     exec == ExecMode::openmp ? ExecMode::openmp
                                                              : ExecMode::serial);
            } catch (const std::exception& e) {
                failures[r] = e.what();
                done[r] = 1;
            }
        });

        for (int r = 0; r < reps; ++r) {
            const auto ri = static_cast<std::size_t>(r);
            if (done[ri] || states[ri].wave_index != wave + 1) continue;
            for (std::size_t o = 0; o < config.targets.size(); ++o)
                report.rows.push_back({r, wave + 1, criterion_name(config.criterion),
                                       config.targets[o].output_id,
                                       states[ri].metrics[o].max_predicted_error,
                                       states[ri].metrics[o].median_crps});
            if (stopping_rule(states[ri], config)) done[ri] = 1;
        }
        if (hooks.on_wave) hooks.on_wave(wave + 1, states, report.rows);
    }

    for (int r = 0; r < reps; ++r)
        if (!failures[static_cast<std::size_t>(r)].empty())
            report.failures.push_back("replication " + std::to_string(r) + ": " +
                                      failures[static_cast<std::size_t>(r)]);
    if (resume_states) *resume_states = states;
    return report;
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = dump_config_json(config);
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
    if (rows.empty()) return {};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                          .get<double>();
    return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const ExperimentConfig& config,
                     int wave, const std::vector<WaveState>& states,
                     const std::vector<MetricRow>& rows) {
    nlohmann::json j;
    j["version"] = 1;
    j["config_hash"] = config_hash(config);
    j["wave"] = wave;
    j["states"] = nlohmann::json::array();
    for (std::size_t r = 0; r < states.size(); ++r) {
        nlohmann::json s;
        s["replication"] = r;
        s["wave_index"] = states[r].wave_index;
        s["inputs"] = matrix_to_json(states[r].inputs);
        s["outputs"] = matrix_to_json(states[r].outputs);
        nlohmann::json metrics = nlohmann::json::array();
        for (const auto& m : states[r].metrics)
            metrics.push_back({{"max_error", m.max_predicted_error},
                               {"median_crps", m.median_crps}});
        s["metrics"] = metrics;
        j["states"].push_back(std::move(s));
    }
    j["rows"] = nlohmann::json::array();
    for (const auto& row : rows)
        j["rows"].push_back({{"replication", row.replication},
                             {"wave", row.wave},
                             {"criterion", row.criterion},
                             {"output", row.output},
                             {"max_error", row.max_error},
                             {"median_crps", row.median_crps}});
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError("bad checkpoint JSON: " + std::string(e.what()));
    }
    if (j.value("version", 0) != 1) throw ParseError("unsupported checkpoint version");
    Checkpoint ckpt;
    ckpt.wave = j.at("wave").get<int>();
    ckpt.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& s : j.at("states")) {
        WaveState state;
        state.wave_index = s.at("wave_index").get<int>();
        state.inputs = matrix_from_json(s.at("inputs"));
        state.outputs = matrix_from_json(s.at("outputs"));
        for (const auto& m : s.at("metrics"))
            state.metrics.push_back(
                {m.at("max_error").get<double>(), m.at("median_crps").get<double>()});
        ckpt.states.push_back(std::move(state));
    }
    for (const auto& row : j.at("rows"))
        ckpt.rows.push_back({row.at("replication").get<int>(), row.at("wave").get<int>(),
                             row.at("criterion").get<std::string>(),
                             row.at("output").get<std::string>(),
                             row.at("max_error").get<double>(),
                             row.at("median_crps").get<double>()});
    return ckpt;
}

}  // namespace hm
