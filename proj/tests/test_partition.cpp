#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"

#include "flipchain/partition.hpp"

using namespace flipchain;

namespace {

void expect_matches_oracle(const ContiguityGraph& g, const Partition& p) {
    const std::vector<DistrictIndex> a(p.assignment().begin(), p.assignment().end());
    const auto stats = oracle::district_stats(g, a);
    for (DistrictIndex d = 0; d < stats.size(); ++d) {
        const auto& s = p.district(d);
        EXPECT_EQ(s.population, stats[d].population);
        EXPECT_EQ(s.capacity, stats[d].capacity);
        EXPECT_EQ(s.size, stats[d].size);
        EXPECT_EQ(s.centers, stats[d].centers);
        EXPECT_NEAR(s.area, stats[d].area, 1e-9);
        EXPECT_NEAR(s.perimeter, stats[d].perimeter, 1e-9);
    }
    std::set<std::pair<NodeIndex, DistrictIndex>> pairs;
    for (const auto& bp : p.boundary_pairs()) EXPECT_TRUE(pairs.emplace(bp.node, bp.district).second);
    EXPECT_EQ(pairs, oracle::boundary_pairs(g, a));
    std::set<std::uint32_t> cuts(p.cut_edges().begin(), p.cut_edges().end());
    EXPECT_EQ(cuts.size(), p.cut_edges().size());
    EXPECT_EQ(cuts, oracle::cut_edges(g, a));
}

} // namespace

TEST(FromAssignment, TwoByTwoColumns) {
    const auto g = fixture::grid(2, 2, {0, 1});
    const auto p = Partition::from_assignment(g, {0, 1, 0, 1});
    EXPECT_EQ(p.cut_edges().size(), 2u);
    EXPECT_EQ(p.boundary_pairs().size(), 4u);
}

TEST(FromAssignment, SingleDistrictHasNoBoundary) {
    const auto g = fixture::grid(3, 3, {4});
    const auto p = Partition::from_assignment(g, std::vector<DistrictIndex>(9, 0));
    EXPECT_TRUE(p.boundary_pairs().empty());
    EXPECT_TRUE(p.cut_edges().empty());
}

TEST(FromAssignment, RandomFiveByFiveMatchesOracle) {
    const auto g = fixture::grid(5, 5, {0, 12, 24});
    Rng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const auto p = Partition::from_assignment(g, fixture::random_assignment(25, 3, rng));
        expect_matches_oracle(g, p);
    }
}

TEST(FromAssignment, OutOfRangeDistrict) {
    const auto g = fixture::grid(2, 2, {0, 1});
    EXPECT_THROW(Partition::from_assignment(g, {0, 1, 2, 0}), InvalidAssignmentError);
    EXPECT_THROW(Partition::from_assignment(g, {0, 1, 0}), InvalidAssignmentError);
}

TEST(ApplyFlip, TwoNodeGraph) {
    const auto g = fixture::grid(1, 2, {0, 1});
    auto p = Partition::from_assignment(g, {0, 1});
    p.apply_flip({0, 0, 1});
    EXPECT_EQ(p.district(0).size, 0u);
    EXPECT_EQ(p.district(1).size, 2u);
    EXPECT_TRUE(p.boundary_pairs().empty());
    expect_matches_oracle(g, p);
}

TEST(ApplyFlip, InverseRestoresEveryField) {
    const auto g = fixture::grid(4, 4, {0, 15});
    const auto original = Partition::from_assignment(g, fixture::column_bands(4, 4, 2));
    Rng rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        auto p = original;
        const auto move = fixture::random_flip(p, rng);
        p.apply_flip(move);
        p.apply_flip(move.inverse());
        EXPECT_EQ(p, original);
    }
}

TEST(ApplyFlip, ThousandFlipsOnEightByEightMatchFromScratch) {
    const auto g = fixture::grid(8, 8, {0, 7, 56, 63});
    auto p = Partition::from_assignment(g, fixture::column_bands(8, 8, 4));
    Rng rng(8);
    for (int i = 0; i < 1000; ++i) {
        if (p.boundary_pairs().empty()) break;
        p.apply_flip(fixture::random_flip(p, rng));
    }
    const auto fresh = Partition::from_assignment(g, {p.assignment().begin(), p.assignment().end()});
    expect_matches_oracle(g, p);
    for (DistrictIndex d = 0; d < 4; ++d) {
        EXPECT_EQ(p.district(d).population, fresh.district(d).population);
        EXPECT_NEAR(p.district(d).perimeter, fresh.district(d).perimeter, 1e-9);
    }
    EXPECT_EQ(p, fresh);
}

TEST(ApplyFlip, InvalidMovesThrow) {
    const auto g = fixture::grid(1, 3, {0, 2});
    auto p = Partition::from_assignment(g, {0, 0, 1});
    EXPECT_THROW(p.apply_flip({0, 1, 0}), InvalidMoveError);  // wrong donor
    EXPECT_THROW(p.apply_flip({0, 0, 1}), InvalidMoveError);  // not adjacent to district 1
    EXPECT_THROW(p.apply_flip({1, 0, 0}), InvalidMoveError);
    EXPECT_NO_THROW(p.apply_flip({1, 0, 1}));
}

TEST(GeometryDelta, UnitCellExamples) {
    const auto g = fixture::grid(1, 3, {0, 2});
    const auto p = Partition::from_assignment(g, {0, 0, 1});
    const auto one_neighbor = district_geometry_delta(g, {1, 0, 1}, p);
    EXPECT_DOUBLE_EQ(one_neighbor.donor_perimeter, -2.0);
    EXPECT_DOUBLE_EQ(one_neighbor.donor_area, -1.0);
    EXPECT_DOUBLE_EQ(one_neighbor.recipient_perimeter, 2.0);

    const auto q = Partition::from_assignment(g, {0, 1, 1});
    const auto isolated = district_geometry_delta(g, {0, 0, 1}, q);
    EXPECT_DOUBLE_EQ(isolated.donor_perimeter, -4.0);
}

TEST(GeometryDelta, RandomSixBySixFlipsMatchScratchPerimeter) {
    const auto g = fixture::grid(6, 6, {0, 35});
    auto p = Partition::from_assignment(g, fixture::column_bands(6, 6, 2));
    Rng rng(66);
    for (int i = 0; i < 500 && !p.boundary_pairs().empty(); ++i) {
        const auto move = fixture::random_flip(p, rng);
        const auto delta = district_geometry_delta(g, move, p);
        const double donor_before = p.district(move.donor).perimeter;
        const double recipient_before = p.district(move.recipient).perimeter;
        p.apply_flip(move);
        const auto stats = oracle::district_stats(g, {p.assignment().begin(), p.assignment().end()});
        EXPECT_NEAR(donor_before + delta.donor_perimeter, stats[move.donor].perimeter, 1e-9);
        EXPECT_NEAR(recipient_before + delta.recipient_perimeter, stats[move.recipient].perimeter, 1e-9);
    }
}

TEST(Connectivity, PathDistrict) {
    const auto g = fixture::grid(1, 4, {0, 3});
    const auto p = Partition::from_assignment(g, {0, 0, 0, 1});
    EXPECT_FALSE(is_district_connected_after_removal(g, p, 1));
    EXPECT_TRUE(is_district_connected_after_removal(g, p, 0));
    EXPECT_TRUE(is_district_connected_after_removal(g, p, 2));
    EXPECT_TRUE(is_district_connected_after_removal(g, p, 3));  // empties the district
}

TEST(Connectivity, RandomSixBySixAgreesWithFullSearch) {
    // The local search assumes the district is connected beforehand, which
    // the chain maintains; walk only through contiguous plans.
    const auto g = fixture::grid(6, 6, {0, 5, 30});
    Rng rng(9);
    ConnectivityScratch scratch;
    auto p = Partition::from_assignment(g, fixture::column_bands(6, 6, 3));
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        const std::vector<DistrictIndex> a(p.assignment().begin(), p.assignment().end());
        for (NodeIndex u = 0; u < 36; ++u) {
            const bool expected = oracle::district_connected(g, a, a[u], u);
            EXPECT_EQ(is_district_connected_after_removal(p, u, scratch), expected);
            checked += expected ? 0 : 1;
        }
        for (;;) {
            const auto move = fixture::random_flip(p, rng);
            if (p.district(move.donor).size > 1 && oracle::district_connected(g, a, move.donor, move.node)) {
                p.apply_flip(move);
                break;
            }
        }
    }
    EXPECT_GT(checked, 0);
}
