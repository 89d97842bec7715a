#include <gtest/gtest.h>

#include "ftu/post.hpp"
#include "oracles.hpp"

using namespace ftu;

namespace {

/// Square-ish blob of exactly n pixels starting at (x0, y0), filled row by row
/// with the given row width.
void paint_blob(BinaryMask& m, std::size_t x0, std::size_t y0, std::size_t n, std::size_t row = 3) {
    for (std::size_t i = 0; i < n; ++i) m(x0 + i % row, y0 + i / row) = 1;
}

bool same_partition(const Labeling& got, const oracle::Components& want) {
    if (got.areas != want.areas) return false;
    return got.labels == want.labels;
}

} // namespace

TEST(Post, DefaultsMatchPublishedTable) {
    const auto c = OrganPostConfig::defaults();
    EXPECT_EQ(c.at(Organ::kidney).min_region_ratio, 0.001);
    EXPECT_EQ(c.at(Organ::prostate).min_region_ratio, 0.0005);
    EXPECT_EQ(c.at(Organ::large_intestine).min_region_ratio, 0.0001);
    EXPECT_EQ(c.at(Organ::spleen).min_region_ratio, 0.001);
    EXPECT_EQ(c.at(Organ::lung).min_region_ratio, 0.000001);
    for (Organ o : kAllOrgans) {
        EXPECT_EQ(c.at(o).threshold, 0.5);
        EXPECT_EQ(c.at(o).connectivity, Connectivity::eight);
    }
}

TEST(Binarize, Examples) {
    for (auto v : oracle::values(binarize(ProbMap(3, 3, 1, 0.6f), 0.5))) EXPECT_EQ(v, 1);
    for (auto v : oracle::values(binarize(ProbMap(3, 3, 1, 0.5f), 0.5))) EXPECT_EQ(v, 1);
    EXPECT_EQ(binarize(ProbMap(2, 1, 1, std::vector<float>{0.2f, 0.8f}), 0.5).buffer(),
              (std::vector<std::uint8_t>{0, 1}));
    EXPECT_THROW(binarize(ProbMap(1, 1), 1.5), ContractError);
}

TEST(Binarize, RaisingThresholdNeverAddsForeground) {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    std::vector<float> v(400);
    for (auto& x : v) x = u(g);
    const ProbMap map(20, 20, 1, v);
    BinaryMask prev = binarize(map, 0.0);
    for (double t = 0.05; t <= 1.0; t += 0.05) {
        const BinaryMask cur = binarize(map, t);
        for (std::size_t i = 0; i < v.size(); ++i) ASSERT_LE(cur.data()[i], prev.data()[i]);
        prev = cur;
    }
}

TEST(Components, Examples) {
    EXPECT_TRUE(connected_components(BinaryMask(5, 5)).areas.empty());
    const BinaryMask diag(2, 2, 1, std::vector<std::uint8_t>{1, 0, 0, 1});
    EXPECT_EQ(connected_components(diag, Connectivity::eight).areas.size(), 1u);
    EXPECT_EQ(connected_components(diag, Connectivity::four).areas.size(), 2u);
    const auto full = connected_components(BinaryMask(7, 4, 1, 1));
    ASSERT_EQ(full.areas.size(), 1u);
    EXPECT_EQ(full.areas[0], 28u);
}

TEST(Components, UShapeMergesLabels) {
    // Two arms that only meet at the bottom row.
    const BinaryMask u(3, 3, 1, std::vector<std::uint8_t>{1, 0, 1, 1, 0, 1, 1, 1, 1});
    const auto l = connected_components(u, Connectivity::four);
    ASSERT_EQ(l.areas.size(), 1u);
    EXPECT_EQ(l.areas[0], 7u);
}

TEST(Components, MatchFloodFillOracle) {
    std::mt19937_64 g(2);
    std::uniform_int_distribution<std::size_t> dim(1, 16);
    std::uniform_real_distribution<double> dens(0.05, 0.95);
    for (int iter = 0; iter < 3000; ++iter) {
        const BinaryMask m = oracle::random_mask(g, dim(g), dim(g), dens(g));
        for (bool eight : {false, true}) {
            const auto got = connected_components(m, eight ? Connectivity::eight : Connectivity::four);
            ASSERT_TRUE(same_partition(got, oracle::flood_fill(m, eight))) << "iteration " << iter;
            for (std::size_t i = 0; i < m.pixel_count(); ++i) ASSERT_EQ(got.labels[i] != 0, m.data()[i] == 1);
        }
    }
}

TEST(RemoveSmallRegions, KidneyBoundaryIsStrict) {
    const auto cfg = OrganPostConfig::defaults();
    BinaryMask m(100, 100);
    paint_blob(m, 5, 5, 9);
    paint_blob(m, 50, 50, 10);
    const BinaryMask out = remove_small_regions(m, Organ::kidney, cfg);
    EXPECT_EQ(foreground_count(out), 10u);
    EXPECT_EQ(out(5, 5), 0);
    EXPECT_EQ(out(50, 50), 1);
}

TEST(RemoveSmallRegions, LungKeepsEverything) {
    std::mt19937_64 g(3);
    const BinaryMask m = oracle::random_mask(g, 100, 100, 0.1);
    EXPECT_EQ(remove_small_regions(m, Organ::lung, OrganPostConfig::defaults()), m);
    EXPECT_EQ(remove_small_regions(BinaryMask(9, 9), Organ::kidney, OrganPostConfig::defaults()), BinaryMask(9, 9));
    OrganPostConfig none;
    EXPECT_THROW(remove_small_regions(m, Organ::lung, none), ConfigError);
}

TEST(RemoveSmallRegions, IdempotentAndShrinking) {
    std::mt19937_64 g(4);
    OrganPostConfig cfg = OrganPostConfig::defaults();
    cfg.organs[Organ::spleen].min_region_ratio = 0.01;
    for (int iter = 0; iter < 200; ++iter) {
        const BinaryMask m = oracle::random_mask(g, 30, 30, 0.3 + 0.002 * iter);
        const BinaryMask once = remove_small_regions(m, Organ::spleen, cfg);
        ASSERT_EQ(remove_small_regions(once, Organ::spleen, cfg), once);
        for (std::size_t i = 0; i < m.pixel_count(); ++i) ASSERT_LE(once.data()[i], m.data()[i]);
    }
}

TEST(Postprocess, Examples) {
    const auto cfg = OrganPostConfig::defaults();
    for (Organ o : kAllOrgans) {
        EXPECT_EQ(foreground_count(postprocess(ProbMap(20, 20, 1, 0.6f), o, cfg)), 400u);
        EXPECT_EQ(foreground_count(postprocess(ProbMap(20, 20, 1, 0.4f), o, cfg)), 0u);
    }
    ProbMap single(200, 200, 1, 0.0f);
    single(100, 100) = 0.9f;
    EXPECT_EQ(foreground_count(postprocess(single, Organ::kidney, cfg)), 0u);
    EXPECT_EQ(foreground_count(postprocess(single, Organ::lung, cfg)), 1u);
}

TEST(Postprocess, UsesOrganThresholdAndConnectivity) {
    OrganPostConfig cfg = OrganPostConfig::defaults();
    cfg.organs[Organ::kidney].threshold = 0.7;
    EXPECT_EQ(foreground_count(postprocess(ProbMap(10, 10, 1, 0.6f), Organ::kidney, cfg)), 0u);
    // Two diagonal 2x2 blocks on 10x10: each has ratio 0.04, together 0.08.
    cfg.organs[Organ::kidney] = {0.05, 0.5, Connectivity::four};
    ProbMap m(10, 10, 1, 0.0f);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            m(i, j) = 1.0f;
            m(2 + i, 2 + j) = 1.0f;
        }
    EXPECT_EQ(foreground_count(postprocess(m, Organ::kidney, cfg)), 0u);
    cfg.organs[Organ::kidney].connectivity = Connectivity::eight;
    EXPECT_EQ(foreground_count(postprocess(m, Organ::kidney, cfg)), 8u);
}
