#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flipchain/graph.hpp"
#include "flipchain/partition.hpp"
#include "flipchain/rng.hpp"

namespace flipchain {

class UnrepairablePlanError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class InitScheme { random, distance, present };

inline std::string_view init_scheme_name(InitScheme s) {
    switch (s) {
    case InitScheme::random: return "random";
    case InitScheme::distance: return "distance";
    case InitScheme::present: return "present";
    }
    return "distance";
}

inline InitScheme parse_init_scheme(std::string_view s) {
    if (s == "random") return InitScheme::random;
    if (s == "distance") return InitScheme::distance;
    if (s == "present") return InitScheme::present;
    throw std::invalid_argument("unknown init scheme '" + std::string(s) + "' (expected random|distance|present)");
}

/// Every node joins the center nearest in hops; ties go to the lower district
/// index. FIFO multi-source BFS seeded in district order realizes exactly that
/// tie-break, and the result is contiguous with one center per district.
/// The seed is unused.
inline Partition init_distance(const ContiguityGraph& graph, std::uint64_t seed = 0) {
    (void)seed;
    constexpr auto unset = std::numeric_limits<DistrictIndex>::max();
    std::vector<DistrictIndex> assignment(graph.node_count(), unset);
    std::deque<NodeIndex> queue;
    const auto centers = graph.centers();
    for (std::size_t d = 0; d < centers.size(); ++d) {
        assignment[centers[d]] = static_cast<DistrictIndex>(d);
        queue.push_back(centers[d]);
    }
    while (!queue.empty()) {
        const auto x = queue.front();
        queue.pop_front();
        for (const auto& nb : graph.neighbors(x)) {
            if (assignment[nb.node] == unset) {
                assignment[nb.node] = assignment[x];
                queue.push_back(nb.node);
            }
        }
    }
    for (std::size_t u = 0; u < assignment.size(); ++u)
        if (assignment[u] == unset)
            throw GraphError("node '" + graph.node(static_cast<NodeIndex>(u)).id + "' is unreachable from every center");
    return Partition::from_assignment(graph, std::move(assignment));
}

/// Simultaneous randomized region growth from the centers: repeatedly assign
/// a uniformly drawn (unassigned node, adjacent district) pair.
inline Partition init_random(const ContiguityGraph& graph, std::uint64_t seed) {
    constexpr auto unset = std::numeric_limits<DistrictIndex>::max();
    const auto n = graph.node_count();
    Rng rng(seed);
    std::vector<DistrictIndex> assignment(n, unset);

    // Frontier of distinct (node, district) pairs, with per-node position
    // lists so that all of a node's pairs can be dropped once it is assigned.
    std::vector<BoundaryPair> frontier;
    std::vector<std::vector<std::uint32_t>> positions(n);
    auto contains = [&](NodeIndex u, DistrictIndex d) {
        for (auto pos : positions[u])
            if (frontier[pos].district == d) return true;
        return false;
    };
    auto add = [&](NodeIndex u, DistrictIndex d) {
        if (assignment[u] != unset || contains(u, d)) return;
        positions[u].push_back(static_cast<std::uint32_t>(frontier.size()));
        frontier.push_back({u, d});
    };
    auto remove_at = [&](std::uint32_t pos) {
        const auto last = static_cast<std::uint32_t>(frontier.size() - 1);
        auto drop = [&](NodeIndex u, std::uint32_t p) {
            auto& list = positions[u];
            for (auto& q : list)
                if (q == p) {
                    q = list.back();
                    list.pop_back();
                    return;
                }
        };
        drop(frontier[pos].node, pos);
        if (pos != last) {
            const auto moved = frontier[last];
            for (auto& q : positions[moved.node])
                if (q == last) q = pos;
            frontier[pos] = moved;
        }
        frontier.pop_back();
    };
    auto assign = [&](NodeIndex u, DistrictIndex d) {
        assignment[u] = d;
        while (!positions[u].empty()) remove_at(positions[u].back());
        for (const auto& nb : graph.neighbors(u)) add(nb.node, d);
    };

    const auto centers = graph.centers();
    for (std::size_t d = 0; d < centers.size(); ++d) assignment[centers[d]] = static_cast<DistrictIndex>(d);
    for (std::size_t d = 0; d < centers.size(); ++d) assign(centers[d], static_cast<DistrictIndex>(d));
    while (!frontier.empty()) {
        const auto pick = frontier[rng.uniform_index(frontier.size())];
        assign(pick.node, pick.district);
    }
    return Partition::from_assignment(graph, std::move(assignment));
}

/// Restores contiguity of a plan whose districts each hold exactly one center.
/// Every district keeps the connected piece containing its center; each other
/// piece (orphan) is moved wholesale to the neighboring district with which
/// it shares the longest boundary (ties: lower index). Orphans are processed
/// one at a time, lowest node index first, until none remain.
inline Partition repair_plan(const ContiguityGraph& graph, std::vector<DistrictIndex> assignment) {
    const auto n = graph.node_count();
    const auto k = graph.district_count();
    if (assignment.size() != n) throw InvalidAssignmentError("assignment size does not match the graph");
    std::vector<std::size_t> center_count(k, 0);
    for (auto c : graph.centers()) {
        if (assignment[c] >= k) throw InvalidAssignmentError("center assigned to out-of-range district");
        ++center_count[assignment[c]];
    }
    for (std::size_t d = 0; d < k; ++d)
        if (center_count[d] != 1)
            throw UnrepairablePlanError("district " + std::to_string(d + 1) + " holds " +
                                        std::to_string(center_count[d]) + " centers; repair needs exactly one");

    std::vector<char> in_core(n, 0);
    std::vector<NodeIndex> stack;
    std::vector<NodeIndex> piece;
    for (;;) {
        // Mark every node connected to its own district's center.
        std::fill(in_core.begin(), in_core.end(), 0);
        for (auto c : graph.centers()) {
            in_core[c] = 1;
            stack.assign(1, c);
            while (!stack.empty()) {
                const auto x = stack.back();
                stack.pop_back();
                for (const auto& nb : graph.neighbors(x)) {
                    if (!in_core[nb.node] && assignment[nb.node] == assignment[x]) {
                        in_core[nb.node] = 1;
                        stack.push_back(nb.node);
                    }
                }
            }
        }
        NodeIndex seed = 0;
        while (seed < n && in_core[seed]) ++seed;
        if (seed == n) break;

        // Collect the orphan piece containing `seed` and its boundary lengths.
        const auto own = assignment[seed];
        std::vector<char> in_piece(n, 0);
        piece.assign(1, seed);
        in_piece[seed] = 1;
        for (std::size_t head = 0; head < piece.size(); ++head) {
            for (const auto& nb : graph.neighbors(piece[head])) {
                if (!in_piece[nb.node] && assignment[nb.node] == own) {
                    in_piece[nb.node] = 1;
                    piece.push_back(nb.node);
                }
            }
        }
        std::map<DistrictIndex, double> shared;
        for (auto x : piece)
            for (const auto& nb : graph.neighbors(x))
                if (assignment[nb.node] != own) shared[assignment[nb.node]] += graph.edge(nb.edge).shared_perimeter;
        if (shared.empty()) throw UnrepairablePlanError("orphan piece has no neighboring district");
        DistrictIndex target = shared.begin()->first;
        double best = shared.begin()->second;
        for (const auto& [d, len] : shared)
            if (len > best) {
                best = len;
                target = d;
            }
        for (auto x : piece) assignment[x] = target;
    }
    return Partition::from_assignment(graph, std::move(assignment));
}

} // namespace flipchain
