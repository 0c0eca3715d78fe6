#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "jetflow/partition.hpp"

using namespace jetflow;

TEST(Balance, Examples) {
  EXPECT_EQ(balance(10, 4), (std::vector<int>{3, 3, 2, 2}));
  EXPECT_EQ(balance(8, 4), (std::vector<int>{2, 2, 2, 2}));
  std::vector<int> expect(20, 18);
  expect[0] = 19;
  EXPECT_EQ(balance(361, 20), expect);
}

TEST(Balance, Infeasible) {
  EXPECT_THROW(balance(3, 4), PartitionError);
  EXPECT_THROW(balance(10, 0), PartitionError);
}

TEST(Balance, RandomizedSumAndSpread) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 2000; ++t) {
    const int nb = std::uniform_int_distribution<int>(1, 500)(rng);
    const long long tot = std::uniform_int_distribution<long long>(nb, 200000)(rng);
    const auto parts = balance(tot, nb);
    ASSERT_EQ(static_cast<int>(parts.size()), nb);
    EXPECT_EQ(std::accumulate(parts.begin(), parts.end(), 0LL), tot);
    const auto [lo, hi] = std::minmax_element(parts.begin(), parts.end());
    EXPECT_LE(*hi - *lo, 1);
    EXPECT_TRUE(std::is_sorted(parts.rbegin(), parts.rend()));
  }
}

TEST(Topology, AxialPair) {
  const PartitionTopology t = build_topology({10, 5, 5, false, false}, {2, 1});
  ASSERT_EQ(t.parts.size(), 2u);
  EXPECT_EQ(t.parts[0].layout.i_begin, 0);
  EXPECT_EQ(t.parts[0].layout.i_end, 5);
  EXPECT_EQ(t.parts[1].layout.i_begin, 5);
  EXPECT_EQ(t.parts[1].layout.i_end, 10);
  EXPECT_EQ(t.parts[0].east, 1);
  EXPECT_EQ(t.parts[1].west, 0);
  EXPECT_FALSE(t.parts[0].west);
  EXPECT_FALSE(t.parts[1].east);
  EXPECT_TRUE(t.parts[0].holds_entrance);
  EXPECT_TRUE(t.parts[1].holds_exit);
}

TEST(Topology, AzimuthalRing) {
  const PartitionTopology t = build_topology({16, 8, 17, true, true}, {1, 4});
  for (int p = 0; p < 4; ++p) {
    EXPECT_EQ(t.parts[p].north, (p + 1) % 4);
    EXPECT_EQ(t.parts[p].south, (p + 3) % 4);
    EXPECT_FALSE(t.parts[p].east);
    EXPECT_FALSE(t.parts[p].west);
  }
  EXPECT_EQ(t.ring(0), (std::vector<int>{0, 1, 2, 3}));
  // All 17 stations, superposed one included, split 4 ways: 5, 4, 4, 4.
  EXPECT_EQ(t.parts[3].layout.k_end, 17);
  EXPECT_EQ(t.parts[0].layout.k_end - t.parts[0].layout.k_begin, 5);
  EXPECT_EQ(t.parts[3].layout.k_end - t.parts[3].layout.k_begin, 4);
}

TEST(Topology, SinglePartitionHoldsEverything) {
  const PartitionTopology t = build_topology({16, 8, 17, true, true}, {1, 1});
  const Partition& p = t.parts[0];
  EXPECT_FALSE(p.west || p.east || p.south || p.north);
  EXPECT_TRUE(p.holds_entrance && p.holds_exit && p.holds_centerline && p.holds_farfield);
}

TEST(Topology, IdsAreAxialMajor) {
  const PartitionTopology t = build_topology({32, 8, 25, true, true}, {3, 2});
  for (int px = 0; px < 3; ++px)
    for (int pz = 0; pz < 2; ++pz) {
      EXPECT_EQ(t.at(px, pz).id, px * 2 + pz);
      EXPECT_EQ(t.at(px, pz).px, px);
      EXPECT_EQ(t.at(px, pz).pz, pz);
    }
}

TEST(Topology, OverDecompositionNamesDirection) {
  try {
    build_topology({8, 8, 9, true, true}, {4, 1});
    FAIL();
  } catch (const PartitionError& e) {
    EXPECT_NE(std::string(e.what()).find("axial"), std::string::npos) << e.what();
  }
  EXPECT_THROW(build_topology({32, 8, 9, true, true}, {1, 4}), PartitionError);
}

TEST(Topology, OwnedRangesTileTheGrid) {
  const GridDims d{37, 8, 31, true, true};
  const PartitionTopology t = build_topology(d, {3, 5});
  std::vector<int> hits(static_cast<std::size_t>(d.ni * d.nk), 0);
  for (const Partition& p : t.parts)
    for (int k = p.layout.k_begin; k < p.layout.k_end; ++k)
      for (int i = p.layout.i_begin; i < p.layout.i_end; ++i) ++hits[static_cast<std::size_t>(k * d.ni + i)];
  for (int h : hits) EXPECT_EQ(h, 1);
}
