#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "flipchain/graph.hpp"
#include "flipchain/partition.hpp"
#include "flipchain/scores.hpp"

namespace flipchain {

/// Binary strictly-upper-triangular matrix over node indices: entry (u, v),
/// u < v, is set once u and v have shared a district in some sample. Bits are
/// never cleared.
class CooccurrenceMatrix {
public:
    static constexpr std::size_t dense_limit = 5000;

    explicit CooccurrenceMatrix(std::size_t node_count = 0) : n_(node_count) {
        if (dense()) bits_.assign((slots() + 63) / 64, 0);
    }

    std::size_t node_count() const { return n_; }
    std::size_t slots() const { return n_ < 2 ? 0 : n_ * (n_ - 1) / 2; }
    std::size_t set_count() const { return set_count_; }
    bool dense() const { return n_ <= dense_limit; }

    void mark(NodeIndex u, NodeIndex v) {
        if (u == v) return;
        if (u > v) std::swap(u, v);
        const auto k = key(u, v);
        if (dense()) {
            auto& word = bits_[k / 64];
            const std::uint64_t bit = std::uint64_t{1} << (k % 64);
            if (!(word & bit)) {
                word |= bit;
                ++set_count_;
            }
        } else if (sparse_.insert(k).second) {
            ++set_count_;
        }
    }

    bool test(NodeIndex u, NodeIndex v) const {
        if (u == v) return false;
        if (u > v) std::swap(u, v);
        const auto k = key(u, v);
        if (dense()) return (bits_[k / 64] >> (k % 64)) & 1u;
        return sparse_.contains(k);
    }

    /// Fraction of zero entries; 1.0 for graphs with fewer than two nodes.
    double sparsity() const {
        if (slots() == 0) return 1.0;
        return 1.0 - static_cast<double>(set_count_) / static_cast<double>(slots());
    }

    /// Set entries in row-major order.
    std::vector<std::pair<NodeIndex, NodeIndex>> entries() const {
        std::vector<std::pair<NodeIndex, NodeIndex>> out;
        out.reserve(set_count_);
        for (NodeIndex u = 0; u + 1 < n_; ++u)
            for (NodeIndex v = u + 1; v < n_; ++v)
                if (test(u, v)) out.emplace_back(u, v);
        return out;
    }

    friend bool operator==(const CooccurrenceMatrix& a, const CooccurrenceMatrix& b) {
        return a.n_ == b.n_ && a.set_count_ == b.set_count_ && a.entries() == b.entries();
    }

private:
    // Row-major index into the strict upper triangle.
    std::size_t key(std::size_t u, std::size_t v) const { return u * n_ - u * (u + 1) / 2 + (v - u - 1); }

    std::size_t n_ = 0;
    std::size_t set_count_ = 0;
    std::vector<std::uint64_t> bits_;
    std::unordered_set<std::size_t> sparse_;
};

struct TraceSample {
    std::uint64_t step = 0;
    std::size_t max_district_size = 0;
    double imbalance = 0.0;
    double harmonic_pp = 0.0;
    double dispersion = 0.0;
    double balance = 0.0;
    double compactness = 0.0;
};

inline bool same_value(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

inline bool operator==(const TraceSample& a, const TraceSample& b) {
    return a.step == b.step && a.max_district_size == b.max_district_size && same_value(a.imbalance, b.imbalance) &&
           same_value(a.harmonic_pp, b.harmonic_pp) && same_value(a.dispersion, b.dispersion) &&
           same_value(a.balance, b.balance) && same_value(a.compactness, b.compactness);
}

class DiagnosticsTrace {
public:
    DiagnosticsTrace(std::size_t node_count = 0, std::uint64_t cadence = 1000) : cadence_(cadence), cooccurrence_(node_count) {
        if (cadence_ == 0) throw std::invalid_argument("diagnostics cadence must be positive");
    }

    std::uint64_t cadence() const { return cadence_; }
    const std::vector<TraceSample>& samples() const { return samples_; }
    const CooccurrenceMatrix& cooccurrence() const { return cooccurrence_; }
    double sparsity() const { return cooccurrence_.sparsity(); }

    /// Appends the scores of `partition` and marks every same-district node
    /// pair. Scores that are undefined on the plan are recorded as NaN.
    void record_sample(const Partition& partition, std::uint64_t step, const ScoreWeights& weights,
                       CompactnessFormula formula = CompactnessFormula::mean_pp) {
        if (step % cadence_ != 0)
            throw std::invalid_argument("sample step " + std::to_string(step) + " is not a multiple of the cadence");
        TraceSample s;
        s.step = step;
        for (const auto& d : partition.districts()) s.max_district_size = std::max(s.max_district_size, d.size);
        const auto nan = std::numeric_limits<double>::quiet_NaN();
        auto guarded = [&](auto&& fn) {
            try {
                return fn();
            } catch (const ScoreError&) {
                return nan;
            }
        };
        const auto districts = partition.districts();
        s.imbalance = guarded([&] { return imbalance(districts); });
        s.harmonic_pp = guarded([&] { return harmonic_pp(districts); });
        s.dispersion = guarded([&] { return dispersion(districts, weights); });
        s.balance = guarded([&] { return balance_metric(districts); });
        s.compactness = guarded([&] { return compactness_metric(districts, formula); });
        samples_.push_back(s);

        members_.assign(partition.district_count(), {});
        for (NodeIndex u = 0; u < partition.node_count(); ++u) members_[partition.district_of(u)].push_back(u);
        for (const auto& group : members_)
            for (std::size_t i = 0; i < group.size(); ++i)
                for (std::size_t j = i + 1; j < group.size(); ++j) cooccurrence_.mark(group[i], group[j]);
    }

    /// Used by import; appends without touching the co-occurrence matrix.
    void append_sample(const TraceSample& s) { samples_.push_back(s); }
    CooccurrenceMatrix& mutable_cooccurrence() { return cooccurrence_; }

    friend bool operator==(const DiagnosticsTrace& a, const DiagnosticsTrace& b) {
        return a.cadence_ == b.cadence_ && a.samples_ == b.samples_ && a.cooccurrence_ == b.cooccurrence_;
    }

private:
    std::uint64_t cadence_;
    std::vector<TraceSample> samples_;
    CooccurrenceMatrix cooccurrence_;
    std::vector<std::vector<NodeIndex>> members_;
};

inline void record_sample(DiagnosticsTrace& trace, const Partition& partition, std::uint64_t step,
                          const ScoreWeights& weights) {
    trace.record_sample(partition, step, weights);
}

inline double sparsity(const DiagnosticsTrace& trace) { return trace.sparsity(); }

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error("malformed number '" + std::string(s) + "'");
    return x;
}

struct TraceFiles {
    std::filesystem::path samples;
    std::filesystem::path cooccurrence;
    std::filesystem::path summary;

    /// <prefix>_trace.csv, <prefix>_cooccurrence.csv, <prefix>_sparsity.json
    static TraceFiles for_prefix(const std::filesystem::path& prefix) {
        const auto base = prefix.string();
        return {base + "_trace.csv", base + "_cooccurrence.csv", base + "_sparsity.json"};
    }
};

/// Writes the sample trace, the set co-occurrence entries as "u,v" node-id
/// rows, and a JSON sparsity summary.
inline TraceFiles export_trace(const DiagnosticsTrace& trace, const ContiguityGraph& graph,
                               const std::filesystem::path& prefix) {
    const auto files = TraceFiles::for_prefix(prefix);
    std::ofstream samples(files.samples);
    std::ofstream cooc(files.cooccurrence);
    std::ofstream summary(files.summary);
    if (!samples || !cooc || !summary)
        throw std::runtime_error("cannot write diagnostics files with prefix '" + prefix.string() + "'");

    samples << "step,max_district_size,imb,hpp,j,bal,com\n";
    for (const auto& s : trace.samples()) {
        samples << s.step << ',' << s.max_district_size << ',' << format_double(s.imbalance) << ','
                << format_double(s.harmonic_pp) << ',' << format_double(s.dispersion) << ','
                << format_double(s.balance) << ',' << format_double(s.compactness) << '\n';
    }
    cooc << "u,v\n";
    for (const auto& [u, v] : trace.cooccurrence().entries()) cooc << graph.node(u).id << ',' << graph.node(v).id << '\n';

    const auto& m = trace.cooccurrence();
    nlohmann::ordered_json j = {{"nodes", m.node_count()},
                                {"cadence", trace.cadence()},
                                {"samples", trace.samples().size()},
                                {"slots", m.slots()},
                                {"set_entries", m.set_count()},
                                {"sparsity", m.sparsity()}};
    summary << j.dump(2) << '\n';
    if (!samples || !cooc || !summary) throw std::runtime_error("I/O error while writing diagnostics");
    return files;
}

inline DiagnosticsTrace import_trace(const ContiguityGraph& graph, const std::filesystem::path& prefix) {
    const auto files = TraceFiles::for_prefix(prefix);
    std::ifstream samples(files.samples);
    std::ifstream cooc(files.cooccurrence);
    std::ifstream summary(files.summary);
    if (!samples || !cooc || !summary)
        throw std::runtime_error("cannot read diagnostics files with prefix '" + prefix.string() + "'");
    const auto meta = nlohmann::json::parse(summary);
    DiagnosticsTrace trace(graph.node_count(), meta.at("cadence").get<std::uint64_t>());

    auto split = [](const std::string& line) {
        std::vector<std::string_view> cols;
        std::string_view rest = line;
        for (;;) {
            const auto comma = rest.find(',');
            cols.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        return cols;
    };

    std::string line;
    std::getline(samples, line);
    while (std::getline(samples, line)) {
        if (line.empty()) continue;
        const auto cols = split(line);
        if (cols.size() != 7) throw std::runtime_error("malformed trace row '" + line + "'");
        TraceSample s;
        s.step = std::stoull(std::string(cols[0]));
        s.max_district_size = std::stoull(std::string(cols[1]));
        s.imbalance = parse_double(cols[2]);
        s.harmonic_pp = parse_double(cols[3]);
        s.dispersion = parse_double(cols[4]);
        s.balance = parse_double(cols[5]);
        s.compactness = parse_double(cols[6]);
        trace.append_sample(s);
    }
    std::getline(cooc, line);
    while (std::getline(cooc, line)) {
        if (line.empty()) continue;
        const auto cols = split(line);
        if (cols.size() != 2) throw std::runtime_error("malformed co-occurrence row '" + line + "'");
        const auto u = graph.find(cols[0]);
        const auto v = graph.find(cols[1]);
        if (!u || !v) throw std::runtime_error("co-occurrence row references an unknown node: '" + line + "'");
        trace.mutable_cooccurrence().mark(*u, *v);
    }
    return trace;
}

} // namespace flipchain
