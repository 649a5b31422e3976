#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "flipchain/constraints.hpp"
#include "flipchain/diagnostics.hpp"
#include "flipchain/partition.hpp"
#include "flipchain/rng.hpp"
#include "flipchain/scores.hpp"

namespace flipchain {

class EmptyBoundaryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ChainStalledError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInitialPlanError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Sampler presets:
///   BAA  - balanced, always accept
///   BCAA - balanced and compact, always accept
///   AIO  - accept improving objective
enum class Model { baa, bcaa, aio, custom };
enum class Acceptance { always, accept_improving };

inline std::string_view model_name(Model m) {
    switch (m) {
    case Model::baa: return "BAA";
    case Model::bcaa: return "BCAA";
    case Model::aio: return "AIO";
    case Model::custom: return "custom";
    }
    return "custom";
}

inline Model parse_model(std::string_view s) {
    if (s == "BAA" || s == "baa") return Model::baa;
    if (s == "BCAA" || s == "bcaa") return Model::bcaa;
    if (s == "AIO" || s == "aio") return Model::aio;
    if (s == "custom") return Model::custom;
    throw std::invalid_argument("unknown model '" + std::string(s) + "' (expected BAA|BCAA|AIO)");
}

struct ChainConfig {
    Model model = Model::custom;
    ConstraintSet constraints{Constraint::contiguity};
    Acceptance acceptance = Acceptance::always;
    /// Proposals, rejected ones included.
    std::uint64_t steps = 10'000'000;
    std::uint64_t seed = 0;
    ScoreWeights weights{0.5};
    double epsilon = 0.05;
    EpsilonSense epsilon_sense = EpsilonSense::slack;
    std::uint64_t max_consecutive_rejections = 1'000'000;
    /// Flips between diagnostics samples; 0 disables the trace.
    std::uint64_t diagnostics_cadence = 1000;
    CompactnessFormula compactness_formula = CompactnessFormula::mean_pp;
};

/// Constraint/acceptance combination of a preset; all other fields default.
inline ChainConfig model_preset(Model model) {
    ChainConfig c;
    c.model = model;
    const ConstraintSet base{Constraint::contiguity, Constraint::non_vanishing, Constraint::single_center,
                             Constraint::compactness};
    switch (model) {
    case Model::baa:
        c.constraints = base;
        c.constraints.insert(Constraint::balance);
        c.acceptance = Acceptance::always;
        break;
    case Model::bcaa:
        c.constraints = base;
        c.constraints.insert(Constraint::dispersion);
        c.acceptance = Acceptance::always;
        break;
    case Model::aio:
        c.constraints = base;
        c.acceptance = Acceptance::accept_improving;
        break;
    case Model::custom:
        break;
    }
    return c;
}

/// Draws (u, j) uniformly from the boundary pairs and returns the flip of u
/// into j. Each pair has probability exactly 1 / |boundary pairs|.
inline FlipMove propose_flip(const Partition& partition, Rng& rng) {
    const auto pairs = partition.boundary_pairs();
    if (pairs.empty()) throw EmptyBoundaryError("partition has no boundary pairs; the chain cannot move");
    const auto& pick = pairs[rng.uniform_index(pairs.size())];
    return {pick.node, partition.district_of(pick.node), pick.district};
}

enum class RejectReason {
    contiguity,
    non_vanishing,
    single_center,
    compactness,
    balance,
    dispersion,
    not_improving,
};

inline RejectReason reject_reason(Constraint c) {
    switch (c) {
    case Constraint::contiguity: return RejectReason::contiguity;
    case Constraint::non_vanishing: return RejectReason::non_vanishing;
    case Constraint::single_center: return RejectReason::single_center;
    case Constraint::compactness: return RejectReason::compactness;
    case Constraint::balance: return RejectReason::balance;
    case Constraint::dispersion: return RejectReason::dispersion;
    }
    return RejectReason::contiguity;
}

struct StepOutcome {
    FlipMove move;
    std::optional<RejectReason> rejection;

    bool accepted() const { return !rejection.has_value(); }
};

struct ChainResult {
    std::uint64_t seed = 0;
    /// Lowest-J plan among the bookkept states (the initial plan, and every
    /// accepted plan with J no larger than its predecessor's).
    Partition best_plan;
    ScoreSummary best_scores;
    Partition final_plan;
    std::uint64_t accepted_count = 0;
    std::uint64_t proposed_count = 0;
    /// Step at which the chain was found to have no admissible move, if any.
    std::optional<std::uint64_t> frozen_at;
    std::optional<DiagnosticsTrace> trace;
};

/// One Markov chain: owns its partition, constraint context and generator.
/// Proposals are evaluated against a preview of the flipped plan and only
/// committed on acceptance, so a rejected step leaves the state untouched.
class FlipChain {
public:
    FlipChain(Partition initial, ChainConfig config)
        : config_(std::move(config)), partition_(std::move(initial)), rng_(config_.seed) {
        const auto v = plan_violations(partition_);
        const auto& set = config_.constraints;
        if (set.contains(Constraint::contiguity) && !v.contiguous())
            throw InvalidInitialPlanError("initial plan has a non-contiguous district");
        if (set.contains(Constraint::non_vanishing) && !v.empty.empty())
            throw InvalidInitialPlanError("initial plan has an empty district");
        if (set.contains(Constraint::single_center) && !v.wrong_center_count.empty())
            throw InvalidInitialPlanError("initial plan has a district without exactly one center");
        try {
            ctx_ = ConstraintContext::from_initial(partition_, set, config_.weights, config_.epsilon,
                                                   config_.epsilon_sense);
        } catch (const ScoreError& e) {
            throw InvalidInitialPlanError(std::string("initial plan scores are undefined: ") + e.what());
        }
        try {
            current_j_ = dispersion(partition_, config_.weights);
            scored_ = true;
        } catch (const ScoreError&) {
            if (config_.acceptance == Acceptance::accept_improving)
                throw InvalidInitialPlanError("accept-improving needs a scorable initial plan");
        }
        best_assignment_.assign(partition_.assignment().begin(), partition_.assignment().end());
        if (scored_) {
            best_j_ = current_j_;
            best_scores_ = summarize(partition_, config_.weights, config_.compactness_formula);
        } else {
            const auto nan = std::numeric_limits<double>::quiet_NaN();
            best_scores_ = {nan, nan, nan, nan, nan};
        }
    }

    const ChainConfig& config() const { return config_; }
    const Partition& partition() const { return partition_; }
    const ConstraintContext& context() const { return ctx_; }
    Rng& rng() { return rng_; }
    double current_dispersion() const { return current_j_; }
    std::uint64_t accepted_count() const { return accepted_; }
    std::uint64_t proposed_count() const { return proposed_; }
    bool frozen() const { return frozen_; }

    /// One proposal. Throws ChainStalledError after
    /// max_consecutive_rejections rejections in a row unless the state is
    /// provably absorbing (no admissible flip at all), in which case frozen()
    /// becomes true.
    StepOutcome step() {
        const FlipMove move = propose_flip(partition_, rng_);
        ++proposed_;
        const auto rejection = evaluate(move, /*commit=*/true);
        if (rejection) {
            if (++consecutive_rejections_ >= config_.max_consecutive_rejections && !frozen_) {
                if (!has_admissible_move()) {
                    frozen_ = true;
                    frozen_step_ = proposed_;
                } else
                    throw ChainStalledError("chain rejected " + std::to_string(consecutive_rejections_) +
                                            " consecutive proposals");
            }
        } else {
            consecutive_rejections_ = 0;
        }
        return {move, rejection};
    }

    /// Executes the remaining proposals of the budget. `on_progress(step,
    /// accepted)` fires every `progress_every` proposals when set.
    ChainResult run(const std::function<void(std::uint64_t, std::uint64_t)>& on_progress = {},
                    std::uint64_t progress_every = 100'000) {
        std::optional<DiagnosticsTrace> trace;
        if (config_.diagnostics_cadence > 0) {
            trace.emplace(partition_.node_count(), config_.diagnostics_cadence);
            trace->record_sample(partition_, 0, config_.weights, config_.compactness_formula);
        }
        for (std::uint64_t t = proposed_ + 1; t <= config_.steps; ++t) {
            if (frozen_) {
                // Absorbing state: every further proposal is rejected.
                proposed_ = t;
            } else {
                step();
            }
            if (trace && t % config_.diagnostics_cadence == 0)
                trace->record_sample(partition_, t, config_.weights, config_.compactness_formula);
            if (on_progress && progress_every > 0 && t % progress_every == 0) on_progress(t, accepted_);
        }
        ChainResult result{config_.seed,
                           Partition::from_assignment(partition_.graph(), best_assignment_),
                           best_scores_,
                           partition_,
                           accepted_,
                           proposed_,
                           frozen_ ? std::optional<std::uint64_t>(frozen_step_) : std::nullopt,
                           std::move(trace)};
        return result;
    }

private:
    // Returns the rejection reason, or nullopt if the move is admissible. With
    // commit set, an admissible move is applied and the bookkeeping advanced.
    std::optional<RejectReason> evaluate(const FlipMove& move, bool commit) {
        const DistrictsAfterFlip after(partition_, move);
        LazyScores<DistrictsAfterFlip> scores(after, config_.weights);
        if (auto c = first_violation(partition_, move, after, scores, ctx_, config_.constraints, scratch_))
            return reject_reason(*c);

        double new_j = std::numeric_limits<double>::quiet_NaN();
        if (scored_) {
            try {
                new_j = scores.dispersion();
            } catch (const ScoreError&) {
                if (config_.acceptance == Acceptance::accept_improving) return RejectReason::not_improving;
            }
        }
        if (config_.acceptance == Acceptance::accept_improving && !(new_j < current_j_))
            return RejectReason::not_improving;
        if (!commit) return std::nullopt;

        const bool advance_c3 = config_.constraints.contains(Constraint::compactness);
        const double new_h = advance_c3 ? scores.harmonic_pp() : 0.0;
        partition_.apply_flip(move);
        ++accepted_;
        if (advance_c3) ctx_.advance(new_h);
        if (scored_ && !std::isnan(new_j)) {
            const bool bookkept = new_j <= current_j_;
            current_j_ = new_j;
            if (bookkept && new_j <= best_j_) {
                best_j_ = new_j;
                best_assignment_.assign(partition_.assignment().begin(), partition_.assignment().end());
                best_scores_ = summarize(partition_, config_.weights, config_.compactness_formula);
            }
        } else {
            current_j_ = new_j;
        }
        return std::nullopt;
    }

    bool has_admissible_move() {
        const auto pairs = partition_.boundary_pairs();
        const std::vector<BoundaryPair> snapshot(pairs.begin(), pairs.end());
        for (const auto& p : snapshot) {
            const FlipMove move{p.node, partition_.district_of(p.node), p.district};
            if (!evaluate(move, /*commit=*/false)) return true;
        }
        return false;
    }

    ChainConfig config_;
    Partition partition_;
    Rng rng_;
    ConstraintContext ctx_;
    ConnectivityScratch scratch_;
    double current_j_ = std::numeric_limits<double>::quiet_NaN();
    bool scored_ = false;
    double best_j_ = std::numeric_limits<double>::infinity();
    std::vector<DistrictIndex> best_assignment_;
    ScoreSummary best_scores_;
    std::uint64_t accepted_ = 0;
    std::uint64_t proposed_ = 0;
    std::uint64_t consecutive_rejections_ = 0;
    bool frozen_ = false;
    std::uint64_t frozen_step_ = 0;
};

inline StepOutcome step(FlipChain& chain) { return chain.step(); }

inline ChainResult run_chain(const Partition& initial, const ChainConfig& config) {
    return FlipChain(initial, config).run();
}

using ProgressFn = std::function<void(std::size_t trial, std::uint64_t step, std::uint64_t accepted)>;

/// Runs `trials` independent chains with seeds config.seed + trial, at most
/// `jobs` at a time. `make_initial(trial)` supplies each chain's start plan.
/// Results are ordered by trial index.
inline std::vector<ChainResult> run_trials(const std::function<Partition(std::size_t)>& make_initial,
                                           const ChainConfig& config, std::size_t trials, std::size_t jobs = 1,
                                           const ProgressFn& progress = {}, std::uint64_t progress_every = 100'000) {
    std::vector<std::optional<ChainResult>> slots(trials);
    std::vector<std::exception_ptr> errors(trials);
    std::size_t next = 0;
    std::mutex mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t trial;
            {
                std::lock_guard lock(mutex);
                if (next >= trials) return;
                trial = next++;
            }
            try {
                ChainConfig c = config;
                c.seed = config.seed + trial;
                std::function<void(std::uint64_t, std::uint64_t)> report;
                if (progress) report = [&, trial](std::uint64_t step, std::uint64_t accepted) { progress(trial, step, accepted); };
                slots[trial] = FlipChain(make_initial(trial), c).run(report, progress_every);
            } catch (...) {
                errors[trial] = std::current_exception();
            }
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(trials, 1));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < jobs; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<ChainResult> out;
    out.reserve(trials);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

} // namespace flipchain
