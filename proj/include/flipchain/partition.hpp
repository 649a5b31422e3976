#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "flipchain/graph.hpp"

namespace flipchain {

class InvalidAssignmentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidMoveError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Aggregates of one district, kept in sync with the assignment.
struct DistrictStats {
    std::int64_t population = 0;
    std::int64_t capacity = 0;
    std::size_t size = 0;
    std::size_t centers = 0;
    double area = 0.0;
    double perimeter = 0.0;

    friend bool operator==(const DistrictStats&, const DistrictStats&) = default;
};

/// Reassign `node` from `donor` to the adjacent district `recipient`.
struct FlipMove {
    NodeIndex node = 0;
    DistrictIndex donor = 0;
    DistrictIndex recipient = 0;

    FlipMove inverse() const { return {node, recipient, donor}; }

    friend bool operator==(const FlipMove&, const FlipMove&) = default;
};

/// (u, j): u has a neighbor in district j != district(u). The flip proposal
/// samples uniformly over these.
struct BoundaryPair {
    NodeIndex node = 0;
    DistrictIndex district = 0;

    friend auto operator<=>(const BoundaryPair&, const BoundaryPair&) = default;
};

struct GeometryDelta {
    double donor_area = 0.0;
    double donor_perimeter = 0.0;
    double recipient_area = 0.0;
    double recipient_perimeter = 0.0;
};

/// K-way assignment of graph nodes with per-district aggregates, boundary
/// (node, district) pairs and cut edges maintained incrementally under flips.
///
/// District indices are 0-based here; the plan CSV format is 1-based.
/// The graph must outlive the partition.
class Partition {
public:
    static constexpr std::uint32_t npos = std::numeric_limits<std::uint32_t>::max();

    static Partition from_assignment(const ContiguityGraph& graph, std::vector<DistrictIndex> assignment) {
        const auto n = graph.node_count();
        const auto k = graph.district_count();
        if (assignment.size() != n)
            throw InvalidAssignmentError("assignment has " + std::to_string(assignment.size()) + " entries, graph has " +
                                         std::to_string(n) + " nodes");
        for (std::size_t u = 0; u < n; ++u) {
            if (assignment[u] >= k)
                throw InvalidAssignmentError("node '" + graph.node(static_cast<NodeIndex>(u)).id +
                                             "' assigned to out-of-range district " + std::to_string(assignment[u] + 1));
        }

        Partition p;
        p.graph_ = &graph;
        p.assignment_ = std::move(assignment);
        p.stats_.assign(k, {});
        for (std::size_t u = 0; u < n; ++u) {
            const auto& rec = graph.node(static_cast<NodeIndex>(u));
            auto& s = p.stats_[p.assignment_[u]];
            s.population += rec.population;
            s.capacity += rec.capacity;
            s.size += 1;
            s.centers += rec.is_center ? 1 : 0;
            s.area += rec.area;
            s.perimeter += rec.exterior_perimeter;
        }
        p.cut_pos_.assign(graph.edge_count(), npos);
        for (std::size_t e = 0; e < graph.edge_count(); ++e) {
            const auto& rec = graph.edge(static_cast<EdgeIndex>(e));
            if (p.assignment_[rec.u] == p.assignment_[rec.v]) {
                p.stats_[p.assignment_[rec.u]].perimeter -= 2.0 * rec.shared_perimeter;
            } else {
                p.cut_insert(static_cast<EdgeIndex>(e));
            }
        }

        p.slot_offset_.assign(n + 1, 0);
        for (std::size_t u = 0; u < n; ++u) p.slot_offset_[u + 1] = p.slot_offset_[u] + graph.degree(static_cast<NodeIndex>(u));
        p.slots_.assign(p.slot_offset_[n], Slot{});
        p.slot_used_.assign(n, 0);
        for (std::size_t u = 0; u < n; ++u) {
            for (const auto& nb : graph.neighbors(static_cast<NodeIndex>(u)))
                p.bump(static_cast<NodeIndex>(u), p.assignment_[nb.node], +1);
        }
        return p;
    }

    const ContiguityGraph& graph() const { return *graph_; }
    std::size_t district_count() const { return stats_.size(); }
    std::size_t node_count() const { return assignment_.size(); }

    DistrictIndex district_of(NodeIndex u) const { return assignment_[u]; }
    std::span<const DistrictIndex> assignment() const { return assignment_; }
    std::span<const DistrictStats> districts() const { return stats_; }
    const DistrictStats& district(DistrictIndex d) const { return stats_[d]; }

    /// Unordered; order depends on the flip history.
    std::span<const BoundaryPair> boundary_pairs() const { return pairs_; }
    std::span<const EdgeIndex> cut_edges() const { return cuts_; }

    bool is_cut(EdgeIndex e) const { return cut_pos_[e] != npos; }

    /// Number of neighbors of u currently assigned to d.
    std::uint32_t neighbors_in(NodeIndex u, DistrictIndex d) const {
        const auto* s = find_slot(u, d);
        return s ? s->count : 0;
    }

    /// Throws InvalidMoveError unless the move is a flip of a boundary node
    /// into an adjacent district.
    void validate(const FlipMove& move) const {
        if (move.node >= node_count()) throw InvalidMoveError("flip node out of range");
        if (move.donor != assignment_[move.node])
            throw InvalidMoveError("flip donor is not the node's current district");
        if (move.recipient >= district_count()) throw InvalidMoveError("flip recipient out of range");
        if (move.donor == move.recipient) throw InvalidMoveError("flip donor equals recipient");
        if (neighbors_in(move.node, move.recipient) == 0)
            throw InvalidMoveError("flip node has no neighbor in the recipient district");
    }

    GeometryDelta geometry_delta(const FlipMove& move) const {
        const auto& rec = graph_->node(move.node);
        double shared_donor = 0.0, shared_recipient = 0.0;
        for (const auto& nb : graph_->neighbors(move.node)) {
            const auto d = assignment_[nb.node];
            if (d == move.donor) shared_donor += graph_->edge(nb.edge).shared_perimeter;
            else if (d == move.recipient) shared_recipient += graph_->edge(nb.edge).shared_perimeter;
        }
        return {-rec.area, -rec.exterior_perimeter + 2.0 * shared_donor,
                rec.area, rec.exterior_perimeter - 2.0 * shared_recipient};
    }

    /// Aggregates the donor and recipient would have after `move`.
    std::pair<DistrictStats, DistrictStats> stats_after(const FlipMove& move) const {
        const auto& rec = graph_->node(move.node);
        const auto delta = geometry_delta(move);
        DistrictStats donor = stats_[move.donor];
        DistrictStats recipient = stats_[move.recipient];
        donor.population -= rec.population;
        donor.capacity -= rec.capacity;
        donor.size -= 1;
        donor.centers -= rec.is_center ? 1 : 0;
        donor.area += delta.donor_area;
        donor.perimeter += delta.donor_perimeter;
        recipient.population += rec.population;
        recipient.capacity += rec.capacity;
        recipient.size += 1;
        recipient.centers += rec.is_center ? 1 : 0;
        recipient.area += delta.recipient_area;
        recipient.perimeter += delta.recipient_perimeter;
        return {donor, recipient};
    }

    void apply_flip(const FlipMove& move) {
        validate(move);
        const NodeIndex u = move.node;
        const DistrictIndex a = move.donor;
        const DistrictIndex b = move.recipient;
        auto [donor, recipient] = stats_after(move);
        stats_[a] = donor;
        stats_[b] = recipient;

        assignment_[u] = b;
        if (auto* s = find_slot(u, a)) refresh(u, *s);
        if (auto* s = find_slot(u, b)) refresh(u, *s);

        for (const auto& nb : graph_->neighbors(u)) {
            bump(nb.node, a, -1);
            bump(nb.node, b, +1);
            const bool cut = assignment_[nb.node] != b;
            if (cut && cut_pos_[nb.edge] == npos) cut_insert(nb.edge);
            else if (!cut && cut_pos_[nb.edge] != npos) cut_erase(nb.edge);
        }
    }

    /// Exact equality: assignment, aggregates, and the boundary-pair and
    /// cut-edge sets (order-insensitive).
    friend bool operator==(const Partition& x, const Partition& y) {
        if (x.assignment_ != y.assignment_ || x.stats_ != y.stats_) return false;
        auto px = x.pairs_, py = y.pairs_;
        std::sort(px.begin(), px.end());
        std::sort(py.begin(), py.end());
        if (px != py) return false;
        auto cx = x.cuts_, cy = y.cuts_;
        std::sort(cx.begin(), cx.end());
        std::sort(cy.begin(), cy.end());
        return cx == cy;
    }

private:
    struct Slot {
        DistrictIndex district = 0;
        std::uint32_t count = 0;
        std::uint32_t pair_pos = npos;
    };

    Slot* find_slot(NodeIndex u, DistrictIndex d) {
        Slot* first = slots_.data() + slot_offset_[u];
        for (Slot* s = first; s != first + slot_used_[u]; ++s)
            if (s->district == d) return s;
        return nullptr;
    }
    const Slot* find_slot(NodeIndex u, DistrictIndex d) const {
        return const_cast<Partition*>(this)->find_slot(u, d);
    }

    // Adjust the neighbor count of u in district d and keep the pair set
    // consistent with it.
    void bump(NodeIndex u, DistrictIndex d, int by) {
        Slot* s = find_slot(u, d);
        if (!s) {
            s = slots_.data() + slot_offset_[u] + slot_used_[u]++;
            *s = Slot{d, 0, npos};
        }
        s->count = static_cast<std::uint32_t>(static_cast<int>(s->count) + by);
        refresh(u, *s);
        if (s->count == 0) {
            Slot* last = slots_.data() + slot_offset_[u] + --slot_used_[u];
            *s = *last;
        }
    }

    void refresh(NodeIndex u, Slot& s) {
        const bool want = s.count > 0 && s.district != assignment_[u];
        if (want && s.pair_pos == npos) {
            s.pair_pos = static_cast<std::uint32_t>(pairs_.size());
            pairs_.push_back({u, s.district});
        } else if (!want && s.pair_pos != npos) {
            const auto pos = s.pair_pos;
            s.pair_pos = npos;
            if (pos + 1 != pairs_.size()) {
                pairs_[pos] = pairs_.back();
                find_slot(pairs_[pos].node, pairs_[pos].district)->pair_pos = pos;
            }
            pairs_.pop_back();
        }
    }

    void cut_insert(EdgeIndex e) {
        cut_pos_[e] = static_cast<std::uint32_t>(cuts_.size());
        cuts_.push_back(e);
    }
    void cut_erase(EdgeIndex e) {
        const auto pos = cut_pos_[e];
        cut_pos_[e] = npos;
        if (pos + 1 != cuts_.size()) {
            cuts_[pos] = cuts_.back();
            cut_pos_[cuts_[pos]] = pos;
        }
        cuts_.pop_back();
    }

    const ContiguityGraph* graph_ = nullptr;
    std::vector<DistrictIndex> assignment_;
    std::vector<DistrictStats> stats_;
    std::vector<BoundaryPair> pairs_;
    std::vector<EdgeIndex> cuts_;
    std::vector<std::uint32_t> cut_pos_;
    std::vector<std::size_t> slot_offset_;
    std::vector<Slot> slots_;
    std::vector<std::uint32_t> slot_used_;
};

inline Partition from_assignment(const ContiguityGraph& graph, std::vector<DistrictIndex> assignment) {
    return Partition::from_assignment(graph, std::move(assignment));
}

inline void apply_flip(Partition& partition, const FlipMove& move) { partition.apply_flip(move); }

inline GeometryDelta district_geometry_delta(const ContiguityGraph& graph, const FlipMove& move,
                                             const Partition& partition) {
    (void)graph;
    return partition.geometry_delta(move);
}

/// Read-only view of the district aggregates as they would be after a flip,
/// without touching the partition.
class DistrictsAfterFlip {
public:
    DistrictsAfterFlip(const Partition& partition, const FlipMove& move)
        : base_(partition.districts()), move_(move) {
        std::tie(donor_, recipient_) = partition.stats_after(move);
    }

    std::size_t size() const { return base_.size(); }
    const DistrictStats& operator[](std::size_t i) const {
        if (i == move_.donor) return donor_;
        if (i == move_.recipient) return recipient_;
        return base_[i];
    }
    const FlipMove& move() const { return move_; }
    const DistrictStats& donor() const { return donor_; }
    const DistrictStats& recipient() const { return recipient_; }

private:
    std::span<const DistrictStats> base_;
    FlipMove move_;
    DistrictStats donor_;
    DistrictStats recipient_;
};

/// Reusable BFS buffers for contiguity checks.
class ConnectivityScratch {
public:
    void reset(std::size_t n) {
        if (visited_.size() != n) {
            visited_.assign(n, 0);
            target_.assign(n, 0);
            epoch_ = 0;
        }
        if (++epoch_ == 0) {
            std::fill(visited_.begin(), visited_.end(), 0);
            std::fill(target_.begin(), target_.end(), 0);
            epoch_ = 1;
        }
        queue_.clear();
    }

    std::vector<std::uint32_t> visited_;
    std::vector<std::uint32_t> target_;
    std::vector<NodeIndex> queue_;
    std::uint32_t epoch_ = 0;
};

/// True iff district(node) minus node is still connected (vacuously true when
/// nothing remains). Searches only inside the district and stops as soon as
/// every in-district neighbor of `node` has been reached.
inline bool is_district_connected_after_removal(const Partition& partition, NodeIndex node,
                                                ConnectivityScratch& scratch) {
    const auto& graph = partition.graph();
    const DistrictIndex d = partition.district_of(node);
    const auto in_district = partition.neighbors_in(node, d);
    if (in_district <= 1) return true;

    scratch.reset(graph.node_count());
    const auto epoch = scratch.epoch_;
    NodeIndex start = node;
    for (const auto& nb : graph.neighbors(node)) {
        if (partition.district_of(nb.node) == d) {
            scratch.target_[nb.node] = epoch;
            if (start == node) start = nb.node;
        }
    }
    std::uint32_t remaining = in_district - 1;
    scratch.visited_[node] = epoch;
    scratch.visited_[start] = epoch;
    scratch.queue_.push_back(start);
    for (std::size_t head = 0; head < scratch.queue_.size(); ++head) {
        const NodeIndex x = scratch.queue_[head];
        for (const auto& nb : graph.neighbors(x)) {
            const NodeIndex y = nb.node;
            if (scratch.visited_[y] == epoch || partition.district_of(y) != d) continue;
            scratch.visited_[y] = epoch;
            if (scratch.target_[y] == epoch && --remaining == 0) return true;
            scratch.queue_.push_back(y);
        }
    }
    return false;
}

inline bool is_district_connected_after_removal(const ContiguityGraph& graph, const Partition& partition,
                                                NodeIndex node) {
    (void)graph;
    ConnectivityScratch scratch;
    return is_district_connected_after_removal(partition, node, scratch);
}

} // namespace flipchain
