#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "flipchain/graph.hpp"

namespace flipchain {

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw GraphParseError(where + ": missing field '" + key + "'");
    return *it;
}

inline double read_number(const nlohmann::json& value, const char* key, const std::string& where) {
    if (!value.is_number()) throw GraphParseError(where + ": field '" + key + "' is not a number");
    return value.get<double>();
}

inline std::int64_t read_count(const nlohmann::json& value, const char* key, const std::string& where) {
    if (value.is_number_integer()) return value.get<std::int64_t>();
    if (value.is_number_float()) {
        const double d = value.get<double>();
        if (std::isfinite(d) && d == std::floor(d)) return static_cast<std::int64_t>(d);
    }
    throw GraphParseError(where + ": field '" + key + "' is not an integer");
}

} // namespace detail

/// Builds a graph from the JSON document layout
/// {"nodes": [{"id","pop_elem","pop_mid","pop_high","capacity","is_center","area","perimeter"}],
///  "edges": [{"u","v","shared_perimeter"}]}.
///
/// Nodes may also carry an optional "neighbors" id list. When any node has one,
/// every node's list is checked for symmetry, and listed pairs that have no
/// "edges" entry are added with zero shared perimeter.
inline ContiguityGraph parse_graph(const nlohmann::json& doc, SchoolLevel level) {
    using detail::read_count;
    using detail::read_number;
    using detail::require;

    if (!doc.is_object()) throw GraphParseError("graph document is not a JSON object");
    const auto& jnodes = require(doc, "nodes", "graph");
    const auto& jedges = require(doc, "edges", "graph");
    if (!jnodes.is_array() || !jedges.is_array()) throw GraphParseError("graph: 'nodes' and 'edges' must be arrays");

    std::vector<NodeRecord> nodes;
    nodes.reserve(jnodes.size());
    std::unordered_map<std::string, NodeIndex> index;
    bool any_neighbor_lists = false;
    for (std::size_t i = 0; i < jnodes.size(); ++i) {
        const auto& jn = jnodes[i];
        const std::string where = "node #" + std::to_string(i);
        if (!jn.is_object()) throw GraphParseError(where + " is not an object");
        const auto& jid = require(jn, "id", where);
        if (!jid.is_string()) throw GraphParseError(where + ": 'id' must be a string");
        NodeRecord rec;
        rec.id = jid.get<std::string>();
        rec.populations.elementary = read_count(require(jn, "pop_elem", where), "pop_elem", where);
        rec.populations.middle = read_count(require(jn, "pop_mid", where), "pop_mid", where);
        rec.populations.high = read_count(require(jn, "pop_high", where), "pop_high", where);
        rec.capacity = read_count(require(jn, "capacity", where), "capacity", where);
        const auto& jc = require(jn, "is_center", where);
        if (!jc.is_boolean()) throw GraphParseError(where + ": 'is_center' must be a boolean");
        rec.is_center = jc.get<bool>();
        rec.area = read_number(require(jn, "area", where), "area", where);
        rec.exterior_perimeter = read_number(require(jn, "perimeter", where), "perimeter", where);
        if (!index.emplace(rec.id, static_cast<NodeIndex>(i)).second)
            throw DuplicateNodeError("duplicate node id '" + rec.id + "'");
        any_neighbor_lists = any_neighbor_lists || jn.contains("neighbors");
        nodes.push_back(std::move(rec));
    }

    auto lookup = [&](const nlohmann::json& v, const std::string& where) -> NodeIndex {
        if (!v.is_string()) throw GraphParseError(where + ": node reference must be a string id");
        auto it = index.find(v.get<std::string>());
        if (it == index.end()) throw UnknownNodeError(where + ": unknown node id '" + v.get<std::string>() + "'");
        return it->second;
    };

    std::vector<EdgeRecord> edges;
    edges.reserve(jedges.size());
    std::set<std::pair<NodeIndex, NodeIndex>> edge_keys;
    for (std::size_t i = 0; i < jedges.size(); ++i) {
        const auto& je = jedges[i];
        const std::string where = "edge #" + std::to_string(i);
        if (!je.is_object()) throw GraphParseError(where + " is not an object");
        EdgeRecord rec;
        rec.u = lookup(require(je, "u", where), where);
        rec.v = lookup(require(je, "v", where), where);
        rec.shared_perimeter = read_number(require(je, "shared_perimeter", where), "shared_perimeter", where);
        edge_keys.emplace(std::min(rec.u, rec.v), std::max(rec.u, rec.v));
        edges.push_back(rec);
    }

    if (any_neighbor_lists) {
        std::set<std::pair<NodeIndex, NodeIndex>> listed;
        for (std::size_t i = 0; i < jnodes.size(); ++i) {
            auto it = jnodes[i].find("neighbors");
            if (it == jnodes[i].end()) continue;
            const std::string where = "node '" + nodes[i].id + "' neighbors";
            if (!it->is_array()) throw GraphParseError(where + " is not an array");
            for (const auto& jv : *it) listed.emplace(static_cast<NodeIndex>(i), lookup(jv, where));
        }
        for (const auto& [a, b] : listed) {
            if (!listed.contains({b, a}))
                throw AsymmetricAdjacencyError("node '" + nodes[a].id + "' lists neighbor '" + nodes[b].id +
                                               "' but not vice versa");
            if (a < b && !edge_keys.contains({a, b})) edges.push_back({a, b, 0.0});
        }
    }

    return ContiguityGraph::build(std::move(nodes), std::move(edges), level);
}

inline ContiguityGraph load_graph(const std::filesystem::path& path, SchoolLevel level) {
    std::ifstream in(path);
    if (!in) throw GraphParseError("cannot open graph file '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw GraphParseError("'" + path.string() + "': " + e.what());
    }
    return parse_graph(doc, level);
}

inline nlohmann::json to_json(const ContiguityGraph& graph) {
    nlohmann::json jnodes = nlohmann::json::array();
    for (const auto& n : graph.nodes()) {
        jnodes.push_back({{"id", n.id},
                          {"pop_elem", n.populations.elementary},
                          {"pop_mid", n.populations.middle},
                          {"pop_high", n.populations.high},
                          {"capacity", n.capacity},
                          {"is_center", n.is_center},
                          {"area", n.area},
                          {"perimeter", n.exterior_perimeter}});
    }
    nlohmann::json jedges = nlohmann::json::array();
    for (const auto& e : graph.edges()) {
        jedges.push_back({{"u", graph.node(e.u).id}, {"v", graph.node(e.v).id}, {"shared_perimeter", e.shared_perimeter}});
    }
    return {{"nodes", std::move(jnodes)}, {"edges", std::move(jedges)}};
}

inline void save_graph(const ContiguityGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file '" + path.string() + "'");
    out << to_json(graph).dump(1) << '\n';
}

} // namespace flipchain
