// flipchain command-line driver: run | evaluate | gen

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "flipchain/commands.hpp"

namespace fs = std::filesystem;
using namespace flipchain;

int main(int argc, char** argv) {
    CLI::App app{"Flip-proposal Markov chain sampler for districting plans with fixed centers"};
    app.require_subcommand(1);

    fs::path config_path, graph_path, out_dir;
    std::size_t jobs = 1;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "run the configured sampler trials");
    run->add_option("--config", config_path, "run config JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--graph", graph_path, "graph JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--jobs", jobs, "trials run concurrently")->check(CLI::PositiveNumber);
    run->add_flag("--quiet", quiet, "suppress progress lines");

    fs::path plan_path;
    std::string level = "elem";
    double lambda = 0.5;
    bool as_json = false;
    bool printed_com = false;
    auto* evaluate = app.add_subcommand("evaluate", "score a plan and check contiguity / centers");
    evaluate->add_option("--graph", graph_path, "graph JSON")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--plan", plan_path, "plan CSV (node_id,district)")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--level", level, "school level")->check(CLI::IsMember({"elem", "mid", "high"}));
    evaluate->add_option("--lambda", lambda, "dispersion weight on imbalance")->check(CLI::Range(0.0, 1.0));
    evaluate->add_flag("--printed-com", printed_com, "report compactness with the literal |1 - PP| expression");
    evaluate->add_flag("--json", as_json, "machine-readable report");

    std::size_t rows = 0, cols = 0, k = 0;
    std::uint64_t seed = 0;
    std::optional<std::size_t> nodes;
    fs::path gen_out;
    auto* gen = app.add_subcommand("gen", "write a synthetic grid instance");
    gen->add_option("--rows", rows, "grid rows");
    gen->add_option("--cols", cols, "grid columns");
    gen->add_option("--k", k, "number of centers")->required();
    gen->add_option("--seed", seed, "RNG seed")->required();
    gen->add_option("--nodes", nodes, "trim a near-square lattice to exactly this many cells");
    gen->add_option("--out", gen_out, "output graph JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto config = load_run_config(config_path);
            const auto graph = load_graph(graph_path, config.level);
            RunOptions options;
            options.jobs = jobs;
            options.quiet = quiet;
            options.log = &std::cerr;
            const auto summary = cmd_run(config, graph, out_dir, options);
            if (!quiet) {
                std::cerr << model_name(config.model) << " x" << config.trials << ": bal "
                          << summary["bal"]["mean"].get<double>() << " +- " << summary["bal"]["std"].get<double>()
                          << ", com " << summary["com"]["mean"].get<double>() << " +- "
                          << summary["com"]["std"].get<double>() << '\n';
            }
            return 0;
        }
        if (*evaluate) {
            const auto graph = load_graph(graph_path, parse_level(level));
            const auto plan = Partition::from_assignment(graph, read_plan_csv(plan_path, graph));
            const auto report = evaluate_plan(
                plan, ScoreWeights(lambda), printed_com ? CompactnessFormula::printed : CompactnessFormula::mean_pp);
            if (as_json) std::cout << to_json(report).dump(2) << '\n';
            else print_report(std::cout, report);
            return report.violations.ok() ? 0 : 2;
        }
        if (*gen) {
            if (!nodes && (rows == 0 || cols == 0)) {
                std::cerr << "gen: --rows and --cols (or --nodes) are required\n";
                return 1;
            }
            const auto graph = cmd_gen(rows, cols, k, seed, gen_out, nodes);
            std::cerr << "wrote " << graph.node_count() << " nodes, " << graph.edge_count() << " edges, K="
                      << graph.district_count() << " to " << gen_out.string() << '\n';
            return 0;
        }
    } catch (const PlanError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
