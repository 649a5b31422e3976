#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flipchain/graph.hpp"
#include "flipchain/partition.hpp"

namespace flipchain {

/// Raised for malformed plan files. `unknown_ids` lists every node id in the
/// file that is absent from the graph.
class PlanError : public std::runtime_error {
public:
    explicit PlanError(const std::string& what, std::vector<std::string> unknown_ids = {})
        : std::runtime_error(what), unknown_ids(std::move(unknown_ids)) {}

    std::vector<std::string> unknown_ids;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

} // namespace detail

/// Plan CSV: header "node_id,district", one row per node, districts 1..K.
inline void write_plan_csv(std::ostream& out, const Partition& partition) {
    const auto& graph = partition.graph();
    out << "node_id,district\n";
    for (std::size_t u = 0; u < graph.node_count(); ++u)
        out << graph.node(static_cast<NodeIndex>(u)).id << ',' << partition.district_of(static_cast<NodeIndex>(u)) + 1
            << '\n';
}

inline void write_plan_csv(const std::filesystem::path& path, const Partition& partition) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write plan file '" + path.string() + "'");
    write_plan_csv(out, partition);
}

/// Parses a plan into a 0-based assignment. Every node must appear exactly once.
inline std::vector<DistrictIndex> read_plan_csv(std::istream& in, const ContiguityGraph& graph) {
    constexpr DistrictIndex unset = static_cast<DistrictIndex>(-1);
    std::vector<DistrictIndex> assignment(graph.node_count(), unset);
    std::vector<std::string> unknown;
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "node_id,district")
        throw PlanError("plan CSV must start with the header 'node_id,district'");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = detail::trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos)
            throw PlanError("plan CSV line " + std::to_string(line_no) + ": expected two columns");
        const auto id = detail::trim(row.substr(0, comma));
        const auto field = detail::trim(row.substr(comma + 1));
        long long district = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), district);
        if (ec != std::errc{} || ptr != field.data() + field.size())
            throw PlanError("plan CSV line " + std::to_string(line_no) + ": district '" + std::string(field) +
                            "' is not an integer");
        const auto node = graph.find(id);
        if (!node) {
            unknown.emplace_back(id);
            continue;
        }
        if (district < 1 || district > static_cast<long long>(graph.district_count()))
            throw PlanError("plan CSV line " + std::to_string(line_no) + ": district " + std::to_string(district) +
                            " outside 1.." + std::to_string(graph.district_count()));
        if (assignment[*node] != unset)
            throw PlanError("plan CSV lists node '" + std::string(id) + "' more than once");
        assignment[*node] = static_cast<DistrictIndex>(district - 1);
    }
    if (!unknown.empty()) {
        std::string msg = "plan CSV references unknown node ids:";
        for (const auto& id : unknown) msg += " " + id;
        throw PlanError(msg, std::move(unknown));
    }
    for (std::size_t u = 0; u < assignment.size(); ++u) {
        if (assignment[u] == unset)
            throw PlanError("plan CSV has no row for node '" + graph.node(static_cast<NodeIndex>(u)).id + "'");
    }
    return assignment;
}

inline std::vector<DistrictIndex> read_plan_csv(const std::filesystem::path& path, const ContiguityGraph& graph) {
    std::ifstream in(path);
    if (!in) throw PlanError("cannot open plan file '" + path.string() + "'");
    return read_plan_csv(in, graph);
}

} // namespace flipchain
