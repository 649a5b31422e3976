#pragma once

// Small hand-built instances shared by the unit tests.

#include <cstdint>
#include <string>
#include <vector>

#include "flipchain/graph.hpp"
#include "flipchain/partition.hpp"
#include "flipchain/rng.hpp"

namespace fixture {

using namespace flipchain;

/// rows x cols unit-square grid. Centers get capacity `cap`; all other nodes
/// have population `pop` unless `pops` is given.
inline ContiguityGraph grid(std::size_t rows, std::size_t cols, const std::vector<NodeIndex>& centers,
                            std::vector<std::int64_t> pops = {}, std::int64_t cap = 10) {
    std::vector<NodeRecord> nodes(rows * cols);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i].id = "c" + std::to_string(i);
        nodes[i].population = pops.empty() ? 1 : pops[i];
        nodes[i].populations.elementary = nodes[i].population;
        nodes[i].area = 1.0;
        nodes[i].exterior_perimeter = 4.0;
    }
    for (auto c : centers) {
        nodes[c].is_center = true;
        nodes[c].capacity = cap;
    }
    std::vector<EdgeRecord> edges;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const auto u = static_cast<NodeIndex>(r * cols + c);
            if (c + 1 < cols) edges.push_back({u, u + 1, 1.0});
            if (r + 1 < rows) edges.push_back({u, static_cast<NodeIndex>(u + cols), 1.0});
        }
    return ContiguityGraph::build(std::move(nodes), std::move(edges));
}

/// Assignment by column band: column c goes to district c * k / cols.
inline std::vector<DistrictIndex> column_bands(std::size_t rows, std::size_t cols, std::size_t k) {
    std::vector<DistrictIndex> a(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) a[r * cols + c] = static_cast<DistrictIndex>(c * k / cols);
    return a;
}

inline std::vector<DistrictIndex> random_assignment(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<DistrictIndex> a(n);
    for (auto& d : a) d = static_cast<DistrictIndex>(rng.uniform_index(k));
    return a;
}

/// A uniformly drawn boundary flip; contiguity is not considered.
inline FlipMove random_flip(const Partition& p, Rng& rng) {
    const auto pairs = p.boundary_pairs();
    const auto pick = pairs[rng.uniform_index(pairs.size())];
    return {pick.node, p.district_of(pick.node), pick.district};
}

} // namespace fixture
