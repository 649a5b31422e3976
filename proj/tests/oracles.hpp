#pragma once

// Brute-force reference computations for tests. Everything here works from
// the raw assignment vector and graph records only, never from Partition's
// incremental state.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include "flipchain/graph.hpp"

namespace oracle {

using flipchain::ContiguityGraph;
using flipchain::DistrictIndex;
using flipchain::NodeIndex;

struct Stats {
    std::int64_t population = 0;
    std::int64_t capacity = 0;
    std::size_t size = 0;
    std::size_t centers = 0;
    double area = 0.0;
    double perimeter = 0.0;
};

inline std::vector<Stats> district_stats(const ContiguityGraph& g, const std::vector<DistrictIndex>& a) {
    std::vector<Stats> out(g.district_count());
    for (NodeIndex u = 0; u < g.node_count(); ++u) {
        const auto& n = g.node(u);
        auto& s = out[a[u]];
        s.population += n.population;
        s.capacity += n.capacity;
        s.size += 1;
        s.centers += n.is_center;
        s.area += n.area;
    }
    // Perimeter of a union: exterior perimeters minus twice each internal shared border.
    for (std::size_t d = 0; d < out.size(); ++d) {
        double ext = 0.0, internal = 0.0;
        for (NodeIndex u = 0; u < g.node_count(); ++u)
            if (a[u] == d) ext += g.node(u).exterior_perimeter;
        for (const auto& e : g.edges())
            if (a[e.u] == d && a[e.v] == d) internal += e.shared_perimeter;
        out[d].perimeter = ext - 2.0 * internal;
    }
    return out;
}

inline std::set<std::pair<NodeIndex, DistrictIndex>> boundary_pairs(const ContiguityGraph& g,
                                                                    const std::vector<DistrictIndex>& a) {
    std::set<std::pair<NodeIndex, DistrictIndex>> out;
    for (const auto& e : g.edges()) {
        if (a[e.u] != a[e.v]) {
            out.emplace(e.u, a[e.v]);
            out.emplace(e.v, a[e.u]);
        }
    }
    return out;
}

inline std::set<std::uint32_t> cut_edges(const ContiguityGraph& g, const std::vector<DistrictIndex>& a) {
    std::set<std::uint32_t> out;
    for (std::uint32_t i = 0; i < g.edge_count(); ++i)
        if (a[g.edge(i).u] != a[g.edge(i).v]) out.insert(i);
    return out;
}

/// Whether the node set {u : a[u] == d, u != skip} induces a connected subgraph
/// (true when empty). Uses the edge list directly.
inline bool district_connected(const ContiguityGraph& g, const std::vector<DistrictIndex>& a, DistrictIndex d,
                               std::int64_t skip = -1) {
    std::vector<std::vector<NodeIndex>> adj(g.node_count());
    for (const auto& e : g.edges()) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<NodeIndex> members;
    for (NodeIndex u = 0; u < g.node_count(); ++u)
        if (a[u] == d && static_cast<std::int64_t>(u) != skip) members.push_back(u);
    if (members.empty()) return true;
    std::vector<char> seen(g.node_count(), 0);
    std::queue<NodeIndex> q;
    q.push(members[0]);
    seen[members[0]] = 1;
    std::size_t count = 0;
    while (!q.empty()) {
        auto x = q.front();
        q.pop();
        ++count;
        for (auto y : adj[x])
            if (!seen[y] && a[y] == d && static_cast<std::int64_t>(y) != skip) {
                seen[y] = 1;
                q.push(y);
            }
    }
    return count == members.size();
}

/// C0, C1, C2 over the whole plan.
inline bool valid_plan(const ContiguityGraph& g, const std::vector<DistrictIndex>& a) {
    const auto stats = district_stats(g, a);
    for (std::size_t d = 0; d < stats.size(); ++d) {
        if (stats[d].size == 0 || stats[d].centers != 1) return false;
        if (!district_connected(g, a, static_cast<DistrictIndex>(d))) return false;
    }
    return true;
}

inline std::vector<std::vector<std::size_t>> all_pairs_hops(const ContiguityGraph& g) {
    const auto n = g.node_count();
    std::vector<std::vector<NodeIndex>> adj(n);
    for (const auto& e : g.edges()) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<std::vector<std::size_t>> dist(n, std::vector<std::size_t>(n, SIZE_MAX));
    for (NodeIndex s = 0; s < n; ++s) {
        std::queue<NodeIndex> q;
        q.push(s);
        dist[s][s] = 0;
        while (!q.empty()) {
            auto x = q.front();
            q.pop();
            for (auto y : adj[x])
                if (dist[s][y] == SIZE_MAX) {
                    dist[s][y] = dist[s][x] + 1;
                    q.push(y);
                }
        }
    }
    return dist;
}

inline double pp(double area, double perimeter) { return 4.0 * std::numbers::pi * area / (perimeter * perimeter); }

inline double imbalance(const std::vector<Stats>& s) {
    double t = 0.0;
    for (const auto& d : s) t += std::fabs(1.0 - double(d.population) / double(d.capacity));
    return t;
}

inline double harmonic(const std::vector<Stats>& s) {
    double inv = 0.0;
    for (const auto& d : s) inv += 1.0 / pp(d.area, d.perimeter);
    return double(s.size()) / inv;
}

inline double dispersion(const std::vector<Stats>& s, double lambda) {
    double comp = 0.0;
    for (const auto& d : s) comp += std::fabs(1.0 - pp(d.area, d.perimeter));
    return lambda * imbalance(s) + (1.0 - lambda) * comp;
}

/// Every assignment of the graph's nodes to two labeled districts in which
/// both districts are non-empty and connected (centers ignored).
inline std::vector<std::vector<DistrictIndex>> contiguous_two_partitions(const ContiguityGraph& g) {
    std::vector<std::vector<DistrictIndex>> out;
    const auto n = g.node_count();
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        std::vector<DistrictIndex> a(n);
        std::size_t ones = 0;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = (bits >> i) & 1;
            ones += a[i];
        }
        if (ones == 0 || ones == n) continue;
        if (district_connected(g, a, 0) && district_connected(g, a, 1)) out.push_back(std::move(a));
    }
    return out;
}

} // namespace oracle
