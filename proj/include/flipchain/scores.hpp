#pragma once

#include <cmath>
#include <concepts>
#include <numbers>
#include <stdexcept>
#include <string>

#include "flipchain/partition.hpp"

namespace flipchain {

class ScoreError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Anything indexable as a sequence of district aggregates: a span over
/// Partition::districts(), or a DistrictsAfterFlip preview.
template <class R>
concept DistrictRange = requires(const R& r, std::size_t i) {
    { r.size() } -> std::convertible_to<std::size_t>;
    { r[i] } -> std::convertible_to<const DistrictStats&>;
};

/// Weight between imbalance (lambda) and non-compactness (1 - lambda) in the
/// dispersion score.
struct ScoreWeights {
    double lambda = 0.5;

    explicit ScoreWeights(double lambda_ = 0.5) : lambda(lambda_) {
        if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
    }
};

/// How the reported compactness metric aggregates Polsby-Popper scores.
///   mean_pp: (100/K) * sum PP_i, higher is better.
///   printed: (100/K) * sum |1 - PP_i|, the literal published expression.
enum class CompactnessFormula { mean_pp, printed };

inline double polsby_popper(double area, double perimeter) {
    if (!(perimeter > 0.0)) throw ScoreError("Polsby-Popper needs a positive perimeter");
    return 4.0 * std::numbers::pi * area / (perimeter * perimeter);
}

inline double polsby_popper(const DistrictStats& d) {
    if (d.size == 0) throw ScoreError("Polsby-Popper of an empty district");
    return polsby_popper(d.area, d.perimeter);
}

/// K / sum(1 / PP_i).
template <DistrictRange R>
double harmonic_pp(const R& districts) {
    double inverse_sum = 0.0;
    for (std::size_t i = 0; i < districts.size(); ++i) inverse_sum += 1.0 / polsby_popper(districts[i]);
    return static_cast<double>(districts.size()) / inverse_sum;
}

/// sum_i |1 - Pop_i / Cap_i|.
template <DistrictRange R>
double imbalance(const R& districts) {
    double total = 0.0;
    for (std::size_t i = 0; i < districts.size(); ++i) {
        const DistrictStats& d = districts[i];
        if (d.capacity <= 0)
            throw ScoreError("district " + std::to_string(i + 1) + " has no capacity (no center)");
        total += std::abs(1.0 - static_cast<double>(d.population) / static_cast<double>(d.capacity));
    }
    return total;
}

/// sum_i |1 - PP_i|.
template <DistrictRange R>
double non_compactness(const R& districts) {
    double total = 0.0;
    for (std::size_t i = 0; i < districts.size(); ++i) total += std::abs(1.0 - polsby_popper(districts[i]));
    return total;
}

template <DistrictRange R>
double dispersion(const R& districts, const ScoreWeights& weights) {
    return weights.lambda * imbalance(districts) + (1.0 - weights.lambda) * non_compactness(districts);
}

/// 100 * |1 - Imb|.
template <DistrictRange R>
double balance_metric(const R& districts) {
    return 100.0 * std::abs(1.0 - imbalance(districts));
}

template <DistrictRange R>
double compactness_metric(const R& districts, CompactnessFormula formula = CompactnessFormula::mean_pp) {
    double total = 0.0;
    for (std::size_t i = 0; i < districts.size(); ++i) {
        const double pp = polsby_popper(districts[i]);
        total += formula == CompactnessFormula::mean_pp ? pp : std::abs(1.0 - pp);
    }
    return 100.0 * total / static_cast<double>(districts.size());
}

inline double harmonic_pp(const Partition& p) { return harmonic_pp(p.districts()); }
inline double imbalance(const Partition& p) { return imbalance(p.districts()); }
inline double dispersion(const Partition& p, const ScoreWeights& w) { return dispersion(p.districts(), w); }
inline double balance_metric(const Partition& p) { return balance_metric(p.districts()); }
inline double compactness_metric(const Partition& p, CompactnessFormula f = CompactnessFormula::mean_pp) {
    return compactness_metric(p.districts(), f);
}

struct ScoreSummary {
    double imbalance = 0.0;
    double harmonic_pp = 0.0;
    double dispersion = 0.0;
    double balance = 0.0;
    double compactness = 0.0;
};

template <DistrictRange R>
ScoreSummary summarize(const R& districts, const ScoreWeights& weights,
                       CompactnessFormula formula = CompactnessFormula::mean_pp) {
    ScoreSummary s;
    s.imbalance = imbalance(districts);
    s.harmonic_pp = harmonic_pp(districts);
    s.dispersion = dispersion(districts, weights);
    s.balance = balance_metric(districts);
    s.compactness = compactness_metric(districts, formula);
    return s;
}

inline ScoreSummary summarize(const Partition& p, const ScoreWeights& weights,
                              CompactnessFormula formula = CompactnessFormula::mean_pp) {
    return summarize(p.districts(), weights, formula);
}

} // namespace flipchain
