#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace flipchain {

using NodeIndex = std::uint32_t;
using EdgeIndex = std::uint32_t;
using DistrictIndex = std::uint32_t;

// ---------------------------------------------------------------------------
// Errors raised while building or loading a graph. Each validation failure has
// its own type so callers (and tests) can tell them apart.
// ---------------------------------------------------------------------------

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GraphParseError : public GraphError {
public:
    using GraphError::GraphError;
};

class DisconnectedGraphError : public GraphError {
public:
    using GraphError::GraphError;
};

class AsymmetricAdjacencyError : public GraphError {
public:
    using GraphError::GraphError;
};

class NoCentersError : public GraphError {
public:
    using GraphError::GraphError;
};

class NegativeAttributeError : public GraphError {
public:
    using GraphError::GraphError;
};

class InvalidAttributeError : public GraphError {
public:
    using GraphError::GraphError;
};

class DuplicateNodeError : public GraphError {
public:
    using GraphError::GraphError;
};

class UnknownNodeError : public GraphError {
public:
    using GraphError::GraphError;
};

class SelfLoopError : public GraphError {
public:
    using GraphError::GraphError;
};

class DuplicateEdgeError : public GraphError {
public:
    using GraphError::GraphError;
};

enum class SchoolLevel { elementary, middle, high };

inline std::string_view level_name(SchoolLevel level) {
    switch (level) {
    case SchoolLevel::elementary: return "elem";
    case SchoolLevel::middle: return "mid";
    case SchoolLevel::high: return "high";
    }
    return "elem";
}

inline SchoolLevel parse_level(std::string_view text) {
    if (text == "elem" || text == "elementary") return SchoolLevel::elementary;
    if (text == "mid" || text == "middle") return SchoolLevel::middle;
    if (text == "high") return SchoolLevel::high;
    throw std::invalid_argument("unknown school level '" + std::string(text) + "' (expected elem|mid|high)");
}

struct LevelPopulations {
    std::int64_t elementary = 0;
    std::int64_t middle = 0;
    std::int64_t high = 0;

    std::int64_t at(SchoolLevel level) const {
        switch (level) {
        case SchoolLevel::elementary: return elementary;
        case SchoolLevel::middle: return middle;
        case SchoolLevel::high: return high;
        }
        return elementary;
    }

    friend bool operator==(const LevelPopulations&, const LevelPopulations&) = default;
};

struct NodeRecord {
    std::string id;
    LevelPopulations populations;
    /// Population at the level the graph was built for.
    std::int64_t population = 0;
    std::int64_t capacity = 0;
    bool is_center = false;
    double area = 1.0;
    double exterior_perimeter = 0.0;

    friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

struct EdgeRecord {
    NodeIndex u = 0;
    NodeIndex v = 0;
    double shared_perimeter = 0.0;

    NodeIndex other(NodeIndex x) const { return x == u ? v : u; }

    friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

struct Neighbor {
    NodeIndex node;
    EdgeIndex edge;
};

/// Immutable contiguity (dual) graph: one node per atomic unit, one edge per
/// shared border. Districts are numbered by the order of the center nodes, so
/// district i is the one seeded by centers()[i].
class ContiguityGraph {
public:
    /// Validates and indexes the records. Throws a GraphError subtype on any
    /// invariant violation.
    static ContiguityGraph build(std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges,
                                 SchoolLevel level = SchoolLevel::elementary) {
        ContiguityGraph g;
        g.level_ = level;
        g.nodes_ = std::move(nodes);
        g.edges_ = std::move(edges);
        g.validate_and_index();
        return g;
    }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    /// Number of districts K (one per center).
    std::size_t district_count() const { return centers_.size(); }
    SchoolLevel level() const { return level_; }

    std::span<const NodeRecord> nodes() const { return nodes_; }
    std::span<const EdgeRecord> edges() const { return edges_; }
    const NodeRecord& node(NodeIndex u) const { return nodes_[u]; }
    const EdgeRecord& edge(EdgeIndex e) const { return edges_[e]; }
    std::span<const NodeIndex> centers() const { return centers_; }

    std::span<const Neighbor> neighbors(NodeIndex u) const {
        return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
    }
    std::size_t degree(NodeIndex u) const { return offsets_[u + 1] - offsets_[u]; }

    std::optional<NodeIndex> find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::int64_t total_population() const { return total_population_; }

    /// Re-targets population to another school level.
    ContiguityGraph with_level(SchoolLevel level) const {
        return build(nodes_, edges_, level);
    }

private:
    void validate_and_index() {
        const auto n = nodes_.size();
        index_.reserve(n);
        total_population_ = 0;
        for (std::size_t i = 0; i < n; ++i) {
            auto& rec = nodes_[i];
            if (!index_.emplace(rec.id, static_cast<NodeIndex>(i)).second)
                throw DuplicateNodeError("duplicate node id '" + rec.id + "'");
            if (rec.populations.elementary < 0 || rec.populations.middle < 0 || rec.populations.high < 0)
                throw NegativeAttributeError("node '" + rec.id + "' has a negative population");
            if (rec.capacity < 0)
                throw NegativeAttributeError("node '" + rec.id + "' has a negative capacity");
            if (rec.exterior_perimeter < 0)
                throw NegativeAttributeError("node '" + rec.id + "' has a negative perimeter");
            if (!(rec.area > 0))
                throw InvalidAttributeError("node '" + rec.id + "' has non-positive area");
            if (rec.capacity > 0 && !rec.is_center)
                throw InvalidAttributeError("node '" + rec.id + "' has capacity but is not a center");
            rec.population = rec.populations.at(level_);
            total_population_ += rec.population;
            if (rec.is_center) centers_.push_back(static_cast<NodeIndex>(i));
        }
        if (centers_.empty()) throw NoCentersError("graph has no center nodes");

        std::vector<std::pair<NodeIndex, NodeIndex>> seen;
        seen.reserve(edges_.size());
        std::vector<std::size_t> degree(n + 1, 0);
        for (const auto& e : edges_) {
            if (e.u >= n || e.v >= n) throw UnknownNodeError("edge references a node index out of range");
            if (e.u == e.v) throw SelfLoopError("self-loop at node '" + nodes_[e.u].id + "'");
            if (e.shared_perimeter < 0)
                throw NegativeAttributeError("edge '" + nodes_[e.u].id + "'-'" + nodes_[e.v].id +
                                             "' has a negative shared perimeter");
            const double limit = std::min(nodes_[e.u].exterior_perimeter, nodes_[e.v].exterior_perimeter);
            if (e.shared_perimeter > limit + 1e-9)
                throw InvalidAttributeError("edge '" + nodes_[e.u].id + "'-'" + nodes_[e.v].id +
                                            "' shares more perimeter than an endpoint has");
            seen.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
            ++degree[e.u];
            ++degree[e.v];
        }
        std::sort(seen.begin(), seen.end());
        if (auto dup = std::adjacent_find(seen.begin(), seen.end()); dup != seen.end())
            throw DuplicateEdgeError("duplicate edge '" + nodes_[dup->first].id + "'-'" + nodes_[dup->second].id + "'");

        offsets_.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
        adjacency_.resize(offsets_[n]);
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const auto& rec = edges_[e];
            adjacency_[fill[rec.u]++] = {rec.v, static_cast<EdgeIndex>(e)};
            adjacency_[fill[rec.v]++] = {rec.u, static_cast<EdgeIndex>(e)};
        }

        // Connectivity over the whole node set.
        std::vector<char> reached(n, 0);
        std::vector<NodeIndex> stack{0};
        reached[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const NodeIndex x = stack.back();
            stack.pop_back();
            for (const auto& nb : neighbors(x)) {
                if (!reached[nb.node]) {
                    reached[nb.node] = 1;
                    ++count;
                    stack.push_back(nb.node);
                }
            }
        }
        if (count != n)
            throw DisconnectedGraphError("graph is disconnected (" + std::to_string(count) + " of " +
                                         std::to_string(n) + " nodes reachable from '" + nodes_[0].id + "')");
    }

    SchoolLevel level_ = SchoolLevel::elementary;
    std::vector<NodeRecord> nodes_;
    std::vector<EdgeRecord> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> adjacency_;
    std::vector<NodeIndex> centers_;
    std::unordered_map<std::string, NodeIndex> index_;
    std::int64_t total_population_ = 0;
};

} // namespace flipchain
