// Runs the three sampler presets on a small synthetic grid and prints the
// best plan's scores for each.
//
//   sample_grid_chain [rows cols k steps seed]

#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "flipchain/flipchain.hpp"

using namespace flipchain;

int main(int argc, char** argv) {
    std::size_t rows = 12, cols = 12, k = 6;
    std::uint64_t steps = 200'000, seed = 1;
    if (argc == 6) {
        rows = std::strtoul(argv[1], nullptr, 10);
        cols = std::strtoul(argv[2], nullptr, 10);
        k = std::strtoul(argv[3], nullptr, 10);
        steps = std::strtoull(argv[4], nullptr, 10);
        seed = std::strtoull(argv[5], nullptr, 10);
    } else if (argc != 1) {
        std::cerr << "usage: " << argv[0] << " [rows cols k steps seed]\n";
        return 1;
    }

    const auto graph = make_grid_instance(rows, cols, k, seed);
    const auto initial = init_distance(graph);
    const auto start = summarize(initial, ScoreWeights());
    std::cout << std::fixed << std::setprecision(3);
    std::cout << rows << "x" << cols << " grid, K=" << k << ", " << steps << " proposals\n";
    std::cout << "initial  bal " << start.balance << "  com " << start.compactness << "  J " << start.dispersion << '\n';

    for (auto model : {Model::baa, Model::bcaa, Model::aio}) {
        auto config = model_preset(model);
        config.steps = steps;
        config.seed = seed;
        config.diagnostics_cadence = 1000;
        const auto r = run_chain(initial, config);
        std::cout << std::left << std::setw(8) << model_name(model) << " bal " << r.best_scores.balance << "  com "
                  << r.best_scores.compactness << "  J " << r.best_scores.dispersion << "  accepted "
                  << r.accepted_count << "/" << r.proposed_count << "  sparsity " << r.trace->sparsity();
        if (r.frozen_at) std::cout << "  (frozen at " << *r.frozen_at << ")";
        std::cout << '\n';
    }
}
