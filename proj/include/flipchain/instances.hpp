#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "flipchain/graph.hpp"
#include "flipchain/rng.hpp"

namespace flipchain {

namespace detail {

// Populations uniform in [1, 100] per level, K centers drawn uniformly without
// replacement, capacity ceil(total elementary population / K) at each center.
inline ContiguityGraph populate_cells(std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges,
                                      std::size_t k, Rng& rng) {
    std::int64_t total = 0;
    for (auto& n : nodes) {
        n.populations.elementary = rng.uniform_int(1, 100);
        n.populations.middle = rng.uniform_int(1, 100);
        n.populations.high = rng.uniform_int(1, 100);
        total += n.populations.elementary;
    }
    // Partial Fisher-Yates over node indices.
    std::vector<NodeIndex> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<NodeIndex>(i);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + rng.uniform_index(order.size() - i);
        std::swap(order[i], order[j]);
    }
    const auto k64 = static_cast<std::int64_t>(k);
    const std::int64_t capacity = (total + k64 - 1) / k64;
    for (std::size_t i = 0; i < k; ++i) {
        nodes[order[i]].is_center = true;
        nodes[order[i]].capacity = capacity;
    }
    return ContiguityGraph::build(std::move(nodes), std::move(edges));
}

inline std::vector<NodeRecord> unit_cells(std::size_t count) {
    std::vector<NodeRecord> nodes(count);
    for (std::size_t i = 0; i < count; ++i) {
        nodes[i].id = "n" + std::to_string(i);
        nodes[i].area = 1.0;
        nodes[i].exterior_perimeter = 4.0;
    }
    return nodes;
}

} // namespace detail

/// rows x cols lattice of unit squares. Node ids are "n<row*cols+col>".
inline ContiguityGraph make_grid_instance(std::size_t rows, std::size_t cols, std::size_t k, std::uint64_t seed) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("grid dimensions must be positive");
    if (k == 0) throw std::invalid_argument("K must be positive");
    if (k > rows * cols) throw std::invalid_argument("K exceeds the number of grid cells");
    Rng rng(seed);
    auto nodes = detail::unit_cells(rows * cols);
    std::vector<EdgeRecord> edges;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const auto u = static_cast<NodeIndex>(r * cols + c);
            if (c + 1 < cols) edges.push_back({u, u + 1, 1.0});
            if (r + 1 < rows) edges.push_back({u, static_cast<NodeIndex>(u + cols), 1.0});
        }
    }
    return detail::populate_cells(std::move(nodes), std::move(edges), k, rng);
}

/// Irregular connected region of exactly `node_count` unit cells: the smallest
/// near-square lattice that fits, with surplus cells peeled off its border at
/// random while keeping the region connected. Used for district-scale
/// instances (e.g. 453 nodes / 57 centers).
inline ContiguityGraph make_synthetic_instance(std::size_t node_count, std::size_t k, std::uint64_t seed) {
    if (node_count == 0) throw std::invalid_argument("node count must be positive");
    if (k == 0 || k > node_count) throw std::invalid_argument("K must be in [1, node count]");
    const auto rows = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(node_count))));
    const std::size_t cols = (node_count + rows - 1) / rows;
    const std::size_t cells = rows * cols;
    Rng rng(seed);

    std::vector<char> alive(cells, 1);
    auto cell_neighbors = [&](std::size_t x, auto&& fn) {
        const std::size_t r = x / cols, c = x % cols;
        if (c > 0) fn(x - 1);
        if (c + 1 < cols) fn(x + 1);
        if (r > 0) fn(x - cols);
        if (r + 1 < rows) fn(x + cols);
    };
    auto connected_without = [&](std::size_t removed) {
        std::size_t start = cells;
        std::size_t remaining = 0;
        for (std::size_t x = 0; x < cells; ++x) {
            if (alive[x] && x != removed) {
                ++remaining;
                if (start == cells) start = x;
            }
        }
        std::vector<char> seen(cells, 0);
        std::vector<std::size_t> stack{start};
        seen[start] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const auto x = stack.back();
            stack.pop_back();
            cell_neighbors(x, [&](std::size_t y) {
                if (alive[y] && y != removed && !seen[y]) {
                    seen[y] = 1;
                    ++count;
                    stack.push_back(y);
                }
            });
        }
        return count == remaining;
    };

    for (std::size_t surplus = cells - node_count; surplus > 0;) {
        std::vector<std::size_t> border;
        for (std::size_t x = 0; x < cells; ++x) {
            if (!alive[x]) continue;
            std::size_t live = 0;
            cell_neighbors(x, [&](std::size_t y) { live += alive[y] ? 1 : 0; });
            if (live < 4) border.push_back(x);
        }
        const auto pick = border[rng.uniform_index(border.size())];
        if (!connected_without(pick)) continue;
        alive[pick] = 0;
        --surplus;
    }

    std::vector<NodeIndex> remap(cells, 0);
    std::size_t next = 0;
    for (std::size_t x = 0; x < cells; ++x)
        if (alive[x]) remap[x] = static_cast<NodeIndex>(next++);
    auto nodes = detail::unit_cells(node_count);
    std::vector<EdgeRecord> edges;
    for (std::size_t x = 0; x < cells; ++x) {
        if (!alive[x]) continue;
        const std::size_t c = x % cols;
        if (c + 1 < cols && alive[x + 1]) edges.push_back({remap[x], remap[x + 1], 1.0});
        if (x + cols < cells && alive[x + cols]) edges.push_back({remap[x], remap[x + cols], 1.0});
    }
    return detail::populate_cells(std::move(nodes), std::move(edges), k, rng);
}

} // namespace flipchain
