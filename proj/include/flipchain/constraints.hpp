#pragma once

#include <array>
#include <bitset>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "flipchain/partition.hpp"
#include "flipchain/scores.hpp"

namespace flipchain {

enum class Constraint : std::uint8_t {
    contiguity = 0,     // C0
    non_vanishing = 1,  // C1
    single_center = 2,  // C2
    compactness = 3,    // C3
    balance = 4,        // C4
    dispersion = 5,     // C5
};

inline constexpr std::array<Constraint, 6> all_constraints = {
    Constraint::contiguity, Constraint::non_vanishing, Constraint::single_center,
    Constraint::compactness, Constraint::balance,      Constraint::dispersion};

inline std::string_view constraint_name(Constraint c) {
    switch (c) {
    case Constraint::contiguity: return "contiguity";
    case Constraint::non_vanishing: return "non_vanishing";
    case Constraint::single_center: return "single_center";
    case Constraint::compactness: return "compactness";
    case Constraint::balance: return "balance";
    case Constraint::dispersion: return "dispersion";
    }
    return "unknown";
}

class ConstraintSet {
public:
    ConstraintSet() = default;
    ConstraintSet(std::initializer_list<Constraint> cs) {
        for (auto c : cs) insert(c);
    }

    void insert(Constraint c) { bits_.set(static_cast<std::size_t>(c)); }
    void erase(Constraint c) { bits_.reset(static_cast<std::size_t>(c)); }
    bool contains(Constraint c) const { return bits_.test(static_cast<std::size_t>(c)); }
    bool empty() const { return bits_.none(); }

    friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

private:
    std::bitset<6> bits_;
};

/// Sense of the epsilon term in the compactness constraint:
///   as_printed: H(t) >= H(t-1) + eps  (strict improvement each step)
///   slack:      H(t) >= H(t-1) - eps  (bounded degradation)
enum class EpsilonSense { as_printed, slack };

/// Reference values the relative constraints compare against. Values a
/// constraint set does not need are left NaN.
struct ConstraintContext {
    double initial_imbalance = std::numeric_limits<double>::quiet_NaN();
    double initial_dispersion = std::numeric_limits<double>::quiet_NaN();
    /// Harmonic-mean PP of the last accepted plan.
    double previous_harmonic_pp = std::numeric_limits<double>::quiet_NaN();
    double epsilon = 0.05;
    EpsilonSense epsilon_sense = EpsilonSense::slack;

    static ConstraintContext from_initial(const Partition& initial, const ConstraintSet& set,
                                          const ScoreWeights& weights, double epsilon = 0.05,
                                          EpsilonSense sense = EpsilonSense::slack) {
        if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
        ConstraintContext ctx;
        ctx.epsilon = epsilon;
        ctx.epsilon_sense = sense;
        if (set.contains(Constraint::balance)) ctx.initial_imbalance = imbalance(initial);
        if (set.contains(Constraint::dispersion)) ctx.initial_dispersion = dispersion(initial, weights);
        if (set.contains(Constraint::compactness)) ctx.previous_harmonic_pp = harmonic_pp(initial);
        return ctx;
    }

    void advance(double accepted_harmonic_pp) { previous_harmonic_pp = accepted_harmonic_pp; }
};

inline bool c0_contiguity(const Partition& partition, const FlipMove& move, ConnectivityScratch& scratch) {
    return is_district_connected_after_removal(partition, move.node, scratch);
}

inline bool c0_contiguity(const ContiguityGraph& graph, const Partition& partition, const FlipMove& move) {
    return is_district_connected_after_removal(graph, partition, move.node);
}

template <DistrictRange R>
bool c1_non_vanishing(const R& after) {
    for (std::size_t i = 0; i < after.size(); ++i)
        if (after[i].size == 0) return false;
    return true;
}

template <DistrictRange R>
bool c2_single_center(const R& after) {
    for (std::size_t i = 0; i < after.size(); ++i)
        if (after[i].centers != 1) return false;
    return true;
}

inline bool c3_holds(double harmonic_after, const ConstraintContext& ctx) {
    const double bound = ctx.epsilon_sense == EpsilonSense::as_printed ? ctx.previous_harmonic_pp + ctx.epsilon
                                                                       : ctx.previous_harmonic_pp - ctx.epsilon;
    return harmonic_after >= bound;
}

template <DistrictRange R>
bool c3_compactness(const R& after, const ConstraintContext& ctx) {
    return c3_holds(harmonic_pp(after), ctx);
}

template <DistrictRange R>
bool c4_balance(const R& after, const ConstraintContext& ctx) {
    return imbalance(after) <= ctx.initial_imbalance;
}

template <DistrictRange R>
bool c5_dispersion(const R& after, const ConstraintContext& ctx, const ScoreWeights& weights) {
    return dispersion(after, weights) <= ctx.initial_dispersion;
}

inline bool c1_non_vanishing(const Partition& p) { return c1_non_vanishing(p.districts()); }
inline bool c2_single_center(const Partition& p) { return c2_single_center(p.districts()); }

/// Scores of a proposed plan, computed at most once each.
template <DistrictRange R>
class LazyScores {
public:
    LazyScores(const R& districts, const ScoreWeights& weights) : districts_(districts), weights_(weights) {}

    double imbalance() {
        if (!(have_ & 1)) imbalance_ = flipchain::imbalance(districts_), have_ |= 1;
        return imbalance_;
    }
    double harmonic_pp() {
        if (!(have_ & 2)) harmonic_ = flipchain::harmonic_pp(districts_), have_ |= 2;
        return harmonic_;
    }
    double dispersion() {
        if (!(have_ & 4)) {
            dispersion_ = weights_.lambda * imbalance() + (1.0 - weights_.lambda) * non_compactness(districts_);
            have_ |= 4;
        }
        return dispersion_;
    }

private:
    const R& districts_;
    ScoreWeights weights_;
    unsigned have_ = 0;  // bit per cached score
    double imbalance_ = 0.0;
    double harmonic_ = 0.0;
    double dispersion_ = 0.0;
};

/// First enabled constraint the flip violates, evaluated cheapest first
/// (C1, C2, C4, C5, C3, C0), or nullopt when all hold. A score-based
/// constraint whose score is undefined on the proposal (empty or
/// capacity-less district) counts as violated.
template <DistrictRange R>
std::optional<Constraint> first_violation(const Partition& partition, const FlipMove& move, const R& after,
                                          LazyScores<R>& scores, const ConstraintContext& ctx,
                                          const ConstraintSet& set, ConnectivityScratch& scratch) {
    if (set.contains(Constraint::non_vanishing) && !c1_non_vanishing(after)) return Constraint::non_vanishing;
    if (set.contains(Constraint::single_center) && !c2_single_center(after)) return Constraint::single_center;
    try {
        if (set.contains(Constraint::balance) && !(scores.imbalance() <= ctx.initial_imbalance))
            return Constraint::balance;
    } catch (const ScoreError&) {
        return Constraint::balance;
    }
    try {
        if (set.contains(Constraint::dispersion) && !(scores.dispersion() <= ctx.initial_dispersion))
            return Constraint::dispersion;
    } catch (const ScoreError&) {
        return Constraint::dispersion;
    }
    try {
        if (set.contains(Constraint::compactness) && !c3_holds(scores.harmonic_pp(), ctx))
            return Constraint::compactness;
    } catch (const ScoreError&) {
        return Constraint::compactness;
    }
    if (set.contains(Constraint::contiguity) && !c0_contiguity(partition, move, scratch)) return Constraint::contiguity;
    return std::nullopt;
}

inline std::optional<Constraint> first_violation(const Partition& partition, const FlipMove& move,
                                                 const ConstraintContext& ctx, const ConstraintSet& set,
                                                 const ScoreWeights& weights) {
    const DistrictsAfterFlip after(partition, move);
    LazyScores<DistrictsAfterFlip> scores(after, weights);
    ConnectivityScratch scratch;
    return first_violation(partition, move, after, scores, ctx, set, scratch);
}

/// Conjunction of the enabled constraints for the plan obtained by `move`.
inline bool check_all(const ContiguityGraph& graph, const Partition& partition, const FlipMove& move,
                      const ConstraintContext& ctx, const ConstraintSet& set, const ScoreWeights& weights) {
    (void)graph;
    return !first_violation(partition, move, ctx, set, weights).has_value();
}

/// Districts of a complete plan that break C0, C1 or C2.
struct PlanViolations {
    std::vector<DistrictIndex> disconnected;
    std::vector<DistrictIndex> empty;
    std::vector<DistrictIndex> wrong_center_count;

    bool contiguous() const { return disconnected.empty(); }
    bool ok() const { return disconnected.empty() && empty.empty() && wrong_center_count.empty(); }
};

/// Full from-scratch check of every district (not incremental).
inline PlanViolations plan_violations(const Partition& partition) {
    const auto& graph = partition.graph();
    PlanViolations out;
    std::vector<char> seen(graph.node_count(), 0);
    std::vector<NodeIndex> stack;
    std::vector<std::size_t> reached(partition.district_count(), 0);
    std::vector<char> started(partition.district_count(), 0);
    for (NodeIndex s = 0; s < graph.node_count(); ++s) {
        const auto d = partition.district_of(s);
        if (started[d]) continue;
        started[d] = 1;
        seen[s] = 1;
        stack.assign(1, s);
        while (!stack.empty()) {
            const auto x = stack.back();
            stack.pop_back();
            ++reached[d];
            for (const auto& nb : graph.neighbors(x)) {
                if (!seen[nb.node] && partition.district_of(nb.node) == d) {
                    seen[nb.node] = 1;
                    stack.push_back(nb.node);
                }
            }
        }
    }
    for (DistrictIndex d = 0; d < partition.district_count(); ++d) {
        const auto& stats = partition.district(d);
        if (stats.size == 0) out.empty.push_back(d);
        else if (reached[d] != stats.size) out.disconnected.push_back(d);
        if (stats.centers != 1) out.wrong_center_count.push_back(d);
    }
    return out;
}

} // namespace flipchain
