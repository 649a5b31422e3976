#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "flipchain/constraints.hpp"
#include "flipchain/diagnostics.hpp"
#include "flipchain/flip_chain.hpp"
#include "flipchain/graph.hpp"
#include "flipchain/graph_io.hpp"
#include "flipchain/initializer.hpp"
#include "flipchain/instances.hpp"
#include "flipchain/plan_io.hpp"
#include "flipchain/scores.hpp"

namespace flipchain {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Experiment description read from the run config JSON.
struct RunConfig {
    Model model = Model::aio;
    std::uint64_t steps = 10'000'000;
    std::uint64_t seed = 0;
    double lambda = 0.5;
    double epsilon = 0.05;
    EpsilonSense epsilon_sense = EpsilonSense::slack;
    SchoolLevel level = SchoolLevel::elementary;
    std::size_t trials = 25;
    std::uint64_t diagnostics_cadence = 1000;
    InitScheme init = InitScheme::distance;
    /// Present-plan CSV for InitScheme::present, resolved against the config's directory.
    std::filesystem::path plan;
    CompactnessFormula compactness_formula = CompactnessFormula::mean_pp;
    std::uint64_t max_consecutive_rejections = 1'000'000;

    ChainConfig chain_config() const {
        ChainConfig c = model_preset(model);
        c.steps = steps;
        c.seed = seed;
        c.weights = ScoreWeights(lambda);
        c.epsilon = epsilon;
        c.epsilon_sense = epsilon_sense;
        c.diagnostics_cadence = diagnostics_cadence;
        c.compactness_formula = compactness_formula;
        c.max_consecutive_rejections = max_consecutive_rejections;
        return c;
    }
};

inline RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    static const char* known[] = {"model", "steps", "seed", "lambda", "epsilon", "epsilon_sense", "level", "trials",
                                  "diagnostics_cadence", "init", "plan", "compactness_formula",
                                  "max_consecutive_rejections"};
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown run config field '" + key + "'");
    }
    RunConfig c;
    try {
        if (j.contains("model")) c.model = parse_model(j.at("model").get<std::string>());
        if (c.model == Model::custom) throw ConfigError("run config model must be BAA, BCAA or AIO");
        if (j.contains("steps")) c.steps = j.at("steps").get<std::uint64_t>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
        if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
        if (j.contains("epsilon_sense")) {
            const auto s = j.at("epsilon_sense").get<std::string>();
            if (s == "slack") c.epsilon_sense = EpsilonSense::slack;
            else if (s == "as_printed") c.epsilon_sense = EpsilonSense::as_printed;
            else throw ConfigError("epsilon_sense must be 'slack' or 'as_printed'");
        }
        if (j.contains("level")) c.level = parse_level(j.at("level").get<std::string>());
        if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
        if (j.contains("diagnostics_cadence")) c.diagnostics_cadence = j.at("diagnostics_cadence").get<std::uint64_t>();
        if (j.contains("init")) c.init = parse_init_scheme(j.at("init").get<std::string>());
        if (j.contains("plan")) {
            std::filesystem::path p = j.at("plan").get<std::string>();
            c.plan = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        }
        if (j.contains("compactness_formula")) {
            const auto s = j.at("compactness_formula").get<std::string>();
            if (s == "mean_pp") c.compactness_formula = CompactnessFormula::mean_pp;
            else if (s == "printed") c.compactness_formula = CompactnessFormula::printed;
            else throw ConfigError("compactness_formula must be 'mean_pp' or 'printed'");
        }
        if (j.contains("max_consecutive_rejections"))
            c.max_consecutive_rejections = j.at("max_consecutive_rejections").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("run config: ") + e.what());
    }
    if (c.trials == 0) throw ConfigError("trials must be positive");
    if (!(c.lambda >= 0.0 && c.lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
    if (!(c.epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
    if (c.max_consecutive_rejections == 0) throw ConfigError("max_consecutive_rejections must be positive");
    if (c.init == InitScheme::present && c.plan.empty()) throw ConfigError("init 'present' needs a 'plan' path");
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open run config '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
    return parse_run_config(j, path.parent_path());
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

/// Mean and sample standard deviation (n - 1); std is 0 for a single value.
inline MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

inline std::string trial_stem(std::size_t trial, std::size_t trials) {
    const auto width = std::max<std::size_t>(2, std::to_string(trials - 1).size());
    std::ostringstream s;
    s << "trial_" << std::setw(static_cast<int>(width)) << std::setfill('0') << trial;
    return s.str();
}

struct RunOptions {
    std::size_t jobs = 1;
    bool quiet = false;
    std::ostream* log = nullptr;
    std::uint64_t log_every = 100'000;
};

/// Runs the configured trials and writes, under `out_dir`:
///   trial_NN_best_plan.csv, trial_NN_trace.csv, trial_NN_cooccurrence.csv,
///   trial_NN_sparsity.json, summary.json
/// Returns the summary document.
inline nlohmann::ordered_json cmd_run(const RunConfig& config, const ContiguityGraph& graph,
                                      const std::filesystem::path& out_dir, const RunOptions& options = {}) {
    std::filesystem::create_directories(out_dir);
    std::optional<std::vector<DistrictIndex>> present;
    if (config.init == InitScheme::present) present = read_plan_csv(config.plan, graph);

    auto make_initial = [&](std::size_t trial) -> Partition {
        switch (config.init) {
        case InitScheme::distance: return init_distance(graph, config.seed + trial);
        case InitScheme::random: return init_random(graph, config.seed + trial);
        case InitScheme::present: return repair_plan(graph, *present);
        }
        return init_distance(graph);
    };

    ChainConfig chain = config.chain_config();
    std::mutex log_mutex;
    ProgressFn progress;
    if (options.log && !options.quiet) {
        progress = [&](std::size_t trial, std::uint64_t step, std::uint64_t accepted) {
            std::lock_guard lock(log_mutex);
            *options.log << "[trial " << trial << "] step " << step << " accepted " << accepted << '\n';
        };
    }
    const auto results = run_trials(make_initial, chain, config.trials, options.jobs, progress, options.log_every);

    std::vector<double> bals, coms, js;
    nlohmann::ordered_json per_trial = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < results.size(); ++t) {
        const auto& r = results[t];
        const auto stem = trial_stem(t, config.trials);
        write_plan_csv(out_dir / (stem + "_best_plan.csv"), r.best_plan);
        std::optional<double> sparsity_value;
        if (r.trace) {
            export_trace(*r.trace, graph, out_dir / stem);
            sparsity_value = r.trace->sparsity();
        }
        bals.push_back(r.best_scores.balance);
        coms.push_back(r.best_scores.compactness);
        js.push_back(r.best_scores.dispersion);
        nlohmann::ordered_json entry = {{"trial", t},
                                        {"seed", r.seed},
                                        {"plan", stem + "_best_plan.csv"},
                                        {"bal", r.best_scores.balance},
                                        {"com", r.best_scores.compactness},
                                        {"imb", r.best_scores.imbalance},
                                        {"hpp", r.best_scores.harmonic_pp},
                                        {"j", r.best_scores.dispersion},
                                        {"accepted", r.accepted_count},
                                        {"proposed", r.proposed_count}};
        if (sparsity_value) entry["sparsity"] = *sparsity_value;
        if (r.frozen_at) entry["frozen_at"] = *r.frozen_at;
        per_trial.push_back(std::move(entry));
    }
    auto stats = [](const std::vector<double>& xs) {
        const auto m = mean_std(xs);
        return nlohmann::ordered_json{{"mean", m.mean}, {"std", m.std}};
    };
    nlohmann::ordered_json summary = {
        {"model", model_name(config.model)},
        {"level", level_name(config.level)},
        {"init", init_scheme_name(config.init)},
        {"steps", config.steps},
        {"seed", config.seed},
        {"lambda", config.lambda},
        {"epsilon", config.epsilon},
        {"epsilon_sense", config.epsilon_sense == EpsilonSense::slack ? "slack" : "as_printed"},
        {"compactness_formula", config.compactness_formula == CompactnessFormula::mean_pp ? "mean_pp" : "printed"},
        {"trials", config.trials},
        {"bal", stats(bals)},
        {"com", stats(coms)},
        {"j", stats(js)},
        {"per_trial", std::move(per_trial)}};
    std::ofstream out(out_dir / "summary.json");
    if (!out) throw std::runtime_error("cannot write '" + (out_dir / "summary.json").string() + "'");
    out << summary.dump(2) << '\n';
    return summary;
}

struct EvaluationReport {
    std::optional<ScoreSummary> scores;
    std::string score_error;
    PlanViolations violations;
    std::vector<DistrictStats> districts;
};

inline EvaluationReport evaluate_plan(const Partition& plan, const ScoreWeights& weights,
                                      CompactnessFormula formula = CompactnessFormula::mean_pp) {
    EvaluationReport r;
    r.violations = plan_violations(plan);
    r.districts.assign(plan.districts().begin(), plan.districts().end());
    try {
        r.scores = summarize(plan, weights, formula);
    } catch (const ScoreError& e) {
        r.score_error = e.what();
    }
    return r;
}

inline nlohmann::ordered_json to_json(const EvaluationReport& r) {
    nlohmann::ordered_json j;
    if (r.scores) {
        j["bal"] = r.scores->balance;
        j["com"] = r.scores->compactness;
        j["imb"] = r.scores->imbalance;
        j["hpp"] = r.scores->harmonic_pp;
        j["j"] = r.scores->dispersion;
    } else {
        j["score_error"] = r.score_error;
    }
    auto one_based = [](const std::vector<DistrictIndex>& ds) {
        std::vector<DistrictIndex> out;
        for (auto d : ds) out.push_back(d + 1);
        return out;
    };
    j["violations"] = {{"disconnected", one_based(r.violations.disconnected)},
                       {"empty", one_based(r.violations.empty)},
                       {"wrong_center_count", one_based(r.violations.wrong_center_count)}};
    nlohmann::ordered_json ds = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.districts.size(); ++i) {
        const auto& d = r.districts[i];
        nlohmann::ordered_json row = {{"district", i + 1}, {"size", d.size},         {"population", d.population},
                                      {"capacity", d.capacity}, {"centers", d.centers}, {"area", d.area},
                                      {"perimeter", d.perimeter}};
        if (d.size > 0 && d.perimeter > 0) row["pp"] = polsby_popper(d);
        ds.push_back(std::move(row));
    }
    j["districts"] = std::move(ds);
    return j;
}

inline void print_report(std::ostream& out, const EvaluationReport& r) {
    out << std::fixed << std::setprecision(4);
    if (r.scores) {
        out << "bal  " << r.scores->balance << '\n'
            << "com  " << r.scores->compactness << '\n'
            << "imb  " << r.scores->imbalance << '\n'
            << "hpp  " << r.scores->harmonic_pp << '\n'
            << "j    " << r.scores->dispersion << '\n';
    } else {
        out << "scores undefined: " << r.score_error << '\n';
    }
    out << "\ndistrict  size  population  capacity  ratio     pp\n";
    for (std::size_t i = 0; i < r.districts.size(); ++i) {
        const auto& d = r.districts[i];
        out << std::setw(8) << i + 1 << std::setw(6) << d.size << std::setw(12) << d.population << std::setw(10)
            << d.capacity << "  ";
        if (d.capacity > 0) out << std::setw(8) << static_cast<double>(d.population) / static_cast<double>(d.capacity);
        else out << std::setw(8) << "-";
        out << "  ";
        if (d.size > 0 && d.perimeter > 0) out << polsby_popper(d);
        else out << "-";
        out << '\n';
    }
    if (r.violations.ok()) {
        out << "\nconstraints C0-C2: ok\n";
        return;
    }
    auto list = [&](const char* what, const std::vector<DistrictIndex>& ds) {
        if (ds.empty()) return;
        out << "violation " << what << ":";
        for (auto d : ds) out << ' ' << d + 1;
        out << '\n';
    };
    out << '\n';
    list("C0 (non-contiguous districts)", r.violations.disconnected);
    list("C1 (empty districts)", r.violations.empty);
    list("C2 (districts without exactly one center)", r.violations.wrong_center_count);
}

/// Writes a synthetic instance. `nodes`, when given, trims a near-square
/// lattice to that many cells instead of using rows x cols.
inline ContiguityGraph cmd_gen(std::size_t rows, std::size_t cols, std::size_t k, std::uint64_t seed,
                               const std::filesystem::path& out, std::optional<std::size_t> nodes = std::nullopt) {
    auto graph = nodes ? make_synthetic_instance(*nodes, k, seed) : make_grid_instance(rows, cols, k, seed);
    save_graph(graph, out);
    return graph;
}

} // namespace flipchain
