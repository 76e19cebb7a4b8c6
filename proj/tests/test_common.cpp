#include <gtest/gtest.h>

#include <atomic>
#include <numeric>

#include "learnad/common.hpp"

using namespace learnad;

TEST(EdgeId, CanonicalOrder) {
    const EdgeId e = make_edge(17, 3);
    EXPECT_EQ(e.i, 3);
    EXPECT_EQ(e.j, 17);
    EXPECT_EQ(make_edge(3, 17), e);
    EXPECT_LT(make_edge(0, 5), make_edge(1, 2));
    EXPECT_LT(make_edge(1, 2), make_edge(1, 3));
}

TEST(EdgeId, RejectsBadPairs) {
    EXPECT_THROW(make_edge(7, 7), Error);
    EXPECT_THROW(make_edge(90, 2), Error);
    EXPECT_THROW(make_edge(-1, 2), Error);
    try {
        make_edge(7, 7);
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("self-edge"), std::string::npos);
    }
    try {
        make_edge(90, 2);
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("region index out of range"), std::string::npos);
    }
}

TEST(EdgeId, LowerTriangleCount) {
    EXPECT_EQ(edge_count(84), 3486u);
    const auto edges = all_edges(5);
    ASSERT_EQ(edges.size(), 10u);
    EXPECT_TRUE(std::is_sorted(edges.begin(), edges.end()));
    EXPECT_EQ(edges.front(), make_edge(0, 1));
    EXPECT_EQ(edges.back(), make_edge(3, 4));
}

TEST(Rng, Deterministic) {
    Rng a(42);
    Rng b(42);
    for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next_u64(), b.next_u64());
    Rng c(43);
    EXPECT_NE(Rng(42).next_u64(), c.next_u64());
}

TEST(Rng, RangesAndShuffle) {
    Rng rng(1);
    for (int k = 0; k < 1000; ++k) {
        EXPECT_LT(rng.below(7), 7u);
        const double u = rng.uniform(0.6, 0.95);
        EXPECT_GE(u, 0.6);
        EXPECT_LT(u, 0.95);
    }
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    rng.shuffle(v);
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k < 50; ++k) EXPECT_EQ(sorted[static_cast<std::size_t>(k)], k);
}

TEST(Rng, NormalMoments) {
    Rng rng(5);
    std::vector<double> xs;
    for (int k = 0; k < 20000; ++k) xs.push_back(rng.normal());
    EXPECT_NEAR(mean_of(xs), 0.0, 0.05);
    EXPECT_NEAR(sample_std(xs), 1.0, 0.05);
}

TEST(Stats, SampleStd) {
    EXPECT_NEAR(sample_std({20.0, 24.0}), 2.8284271247461903, 1e-12);
    EXPECT_EQ(sample_std({5.0}), 0.0);
    EXPECT_EQ(mean_of({20.0, 24.0}), 22.0);
}

TEST(ParallelFor, VisitsEachIndexOnce) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), [&](std::size_t k) { hits[k]++; }, 4);
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, Rethrows) {
    EXPECT_THROW(parallel_for(10, [](std::size_t k) { if (k == 3) throw Error("boom"); }, 3), Error);
}

TEST(Labels, Names) {
    EXPECT_EQ(label_name(Label::AD), "AD");
    EXPECT_EQ(parse_label("cn"), Label::CN);
    EXPECT_THROW(parse_label("MCI"), Error);
}
