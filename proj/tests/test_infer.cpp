#include <gtest/gtest.h>

#include <atomic>
#include <bit>

#include "ftu/infer/ensemble.hpp"
#include "ftu/infer/external.hpp"
#include "ftu/infer/params.hpp"
#include "ftu/infer/protocol.hpp"
#include "ftu/infer/pseudo.hpp"
#include "ftu/infer/stack.hpp"
#include "ftu/infer/stitch.hpp"
#include "ftu/infer/tiles.hpp"
#include "ftu/infer/tta.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ftu;
using namespace ftu::infer;

namespace {

ProbMap normalized_green(const ByteImage& img) {
    return ChannelIdentityPredictor{}.predict(img);
}

ProbMap corner_delta(const ByteImage& img) {
    ProbMap p(img.width(), img.height(), 1, 0.0f);
    p(0, 0) = 1.0f;
    return p;
}

/// Returns a map one pixel too narrow.
class ShrinkingPredictor final : public Predictor {
public:
    ProbMap predict(const ByteImage& tile) const override {
        return ProbMap(tile.width() > 1 ? tile.width() - 1 : 2, tile.height(), 1, 0.5f);
    }
    std::string name() const override { return "shrinking"; }
};

std::string echo_command(const std::string& extra = {}) {
    return support::quote(FTU_ECHO_PREDICTOR) + (extra.empty() ? "" : " " + extra);
}

bool bit_equal(const ProbMap& a, const ProbMap& b) {
    if (!a.same_shape(b)) return false;
    for (std::size_t i = 0; i < a.pixel_count(); ++i)
        if (std::bit_cast<std::uint32_t>(a.data()[i]) != std::bit_cast<std::uint32_t>(b.data()[i])) return false;
    return true;
}

} // namespace

TEST(Tiles, Examples) {
    EXPECT_EQ(window_stride(1024, 0.75), 256u);
    EXPECT_EQ(axis_offsets(1500, 1024, 256), (std::vector<std::size_t>{0, 256, 476}));
    EXPECT_EQ(axis_offsets(1024, 1024, 256), (std::vector<std::size_t>{0}));
    const TileGrid g = plan_tiles(1500, 1024, 1024, 0.75);
    EXPECT_EQ(g.tile_count(), 3u);
    EXPECT_FALSE(g.padded());
    EXPECT_THROW(plan_tiles(100, 100, 64, 1.0), ContractError);
    EXPECT_THROW(plan_tiles(100, 100, 64, -0.1), ContractError);
    EXPECT_THROW(plan_tiles(100, 100, 0, 0.5), ContractError);
}

TEST(Tiles, SmallImagesGetOnePaddedWindow) {
    const TileGrid g = plan_tiles(300, 700, 1024, 0.75);
    EXPECT_EQ(g.padded_width, 1024u);
    EXPECT_EQ(g.padded_height, 1024u);
    EXPECT_EQ(g.tile_count(), 1u);
    EXPECT_TRUE(g.padded());
}

TEST(Tiles, CoverCountsMatchBruteForce) {
    std::mt19937_64 g(1);
    std::uniform_int_distribution<std::size_t> dim(1, 90), win(1, 40);
    std::uniform_real_distribution<double> ov(0.0, 0.95);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t w = dim(g), h = dim(g), window = win(g);
        const TileGrid grid = plan_tiles(w, h, window, ov(g));
        const auto fast = cover_counts(grid);
        const auto slow = oracle::cover_counts(grid.padded_width, grid.padded_height, window, grid.xs, grid.ys);
        ASSERT_EQ(fast, slow);
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x) ASSERT_GE(fast[y * grid.padded_width + x], 1u);
        for (std::size_t x : grid.xs) ASSERT_LE(x + window, grid.padded_width);
        for (std::size_t y : grid.ys) ASSERT_LE(y + window, grid.padded_height);
    }
}

TEST(Stitch, ConstantPredictorIsExact) {
    std::mt19937_64 g(2);
    const ByteImage img = oracle::random_image(g, 70, 45, 3);
    const ConstantPredictor p(0.7f);
    for (double overlap : {0.0, 0.5, 0.75, 0.9}) {
        const ProbMap out = predict_sliding(img, p, plan_tiles(70, 45, 32, overlap));
        for (float v : out.data()) ASSERT_EQ(v, 0.7f);
    }
}

TEST(Stitch, IdentityPredictorReproducesChannel) {
    std::mt19937_64 g(3);
    const ChannelIdentityPredictor p;
    for (auto [w, h, win] : {std::tuple{70, 45, 32}, {33, 90, 40}, {20, 10, 64}, {64, 64, 64}}) {
        const ByteImage img = oracle::random_image(g, w, h, 3);
        const ProbMap want = normalized_green(img);
        for (double overlap : {0.0, 0.3, 0.75}) {
            const ProbMap out = predict_sliding(img, p, plan_tiles(w, h, win, overlap));
            for (std::size_t i = 0; i < want.pixel_count(); ++i) ASSERT_LE(std::abs(out.data()[i] - want.data()[i]), 1e-12);
        }
    }
}

TEST(Stitch, SingleWindowEqualsPredictor) {
    std::mt19937_64 g(4);
    const ByteImage img = oracle::random_image(g, 32, 32, 3);
    const LuminanceSigmoidPredictor p;
    EXPECT_TRUE(bit_equal(predict_sliding(img, p, plan_tiles(32, 32, 32, 0.75)), p.predict(img)));
}

TEST(Stitch, ThreadCountDoesNotChangeBits) {
    std::mt19937_64 g(5);
    const ByteImage img = oracle::random_image(g, 150, 110, 3);
    const LuminanceSigmoidPredictor p(7.0, 0.4);
    const TileGrid grid = plan_tiles(150, 110, 40, 0.75);
    const ProbMap one = predict_sliding(img, p, grid, {1, 4});
    for (std::size_t threads : {2u, 8u}) {
        for (std::size_t batch : {1u, 3u}) {
            EXPECT_TRUE(bit_equal(one, predict_sliding(img, p, grid, {threads, batch})));
        }
    }
}

TEST(Stitch, WrongPredictorDimsRejected) {
    const ByteImage img(40, 40, 3, 1);
    EXPECT_THROW(predict_sliding(img, ShrinkingPredictor{}, plan_tiles(40, 40, 16, 0.5)), ContractError);
    EXPECT_THROW(predict_sliding(img, ConstantPredictor(0.1f), plan_tiles(41, 40, 16, 0.5)), ContractError);
}

TEST(ParallelFor, RethrowsLowestIndexError) {
    std::atomic<int> ran{0};
    try {
        parallel_for(20, 4, [&](std::size_t i) {
            ++ran;
            if (i == 7 || i == 13) throw DataError("item " + std::to_string(i));
        });
        FAIL();
    } catch (const DataError& e) {
        EXPECT_STREQ(e.what(), "item 7");
    }
    EXPECT_EQ(ran.load(), 20);
}

TEST(Tta, CornerDeltaAndConstants) {
    const ByteImage img(6, 4, 3, 9);
    const ProbMap out = tta_predict(img, corner_delta);
    EXPECT_EQ(out(0, 0), 0.25f);
    EXPECT_EQ(out(5, 0), 0.25f);
    EXPECT_EQ(out(0, 3), 0.25f);
    EXPECT_EQ(out(5, 3), 0.25f);
    float total = 0.0f;
    for (float v : out.data()) total += v;
    EXPECT_EQ(total, 1.0f);

    const ConstantPredictor c(0.3f);
    const ProbMap flat = tta_predict(img, [&](const ByteImage& x) { return c.predict(x); });
    for (float v : flat.data()) EXPECT_EQ(v, 0.3f);
}

TEST(Tta, CommutesWithHorizontalFlip) {
    std::mt19937_64 g(6);
    const LuminanceSigmoidPredictor p(6.0, 0.5);
    const PredictFn fn = [&](const ByteImage& x) { return p.predict(x); };
    for (int iter = 0; iter < 10; ++iter) {
        const ByteImage img = oracle::random_image(g, 9 + iter, 7, 3);
        const ProbMap a = tta_predict(apply_flip(img, Flip::horizontal), fn);
        const ProbMap b = apply_flip(tta_predict(img, fn), Flip::horizontal);
        for (std::size_t i = 0; i < a.pixel_count(); ++i) ASSERT_NEAR(a.data()[i], b.data()[i], 1e-7);
    }
}

TEST(Tta, RejectsWrongDims) {
    const ByteImage img(5, 4, 3, 9);
    EXPECT_THROW(tta_predict(img, [](const ByteImage&) { return ProbMap(3, 3, 1, 0.0f); }), ContractError);
}

TEST(Ensemble, Examples) {
    const ProbMap a(2, 2, 1, 0.2f), b(2, 2, 1, 0.8f), zero(2, 2, 1, 0.0f);
    const std::vector<ProbMap> same{a, a, a};
    EXPECT_EQ(ensemble(same), a);
    const std::vector<ProbMap> pair{a, b};
    for (float v : oracle::values(ensemble(pair))) EXPECT_FLOAT_EQ(v, 0.5f);
    const std::vector<ProbMap> weighted{zero, b};
    const std::vector<double> w{1.0, 3.0};
    for (float v : oracle::values(ensemble(weighted, w))) EXPECT_FLOAT_EQ(v, 0.6f);
}

TEST(Ensemble, Errors) {
    const ProbMap a(2, 2, 1, 0.2f), c(3, 2, 1, 0.2f);
    EXPECT_THROW(ensemble(std::span<const ProbMap>{}), ContractError);
    const std::vector<ProbMap> mixed{a, c};
    EXPECT_THROW(ensemble(mixed), ContractError);
    const std::vector<ProbMap> two{a, a};
    const std::vector<double> neg{1.0, -1.0}, zeros{0.0, 0.0}, one{1.0};
    EXPECT_THROW(ensemble(two, neg), ContractError);
    EXPECT_THROW(ensemble(two, zeros), ContractError);
    EXPECT_THROW(ensemble(two, one), ContractError);
}

TEST(Stack, MembersAndWholeImageMode) {
    std::mt19937_64 g(7);
    const ByteImage img = oracle::random_image(g, 40, 30, 3);
    std::vector<Member> members{{"a", make_reference_predictor("constant:0.2"), 1.0},
                                {"b", make_reference_predictor("constant:0.6"), 1.0}};
    WindowSettings s;
    s.window = 16;
    for (float v : oracle::values(predict_ensemble(img, members, s))) ASSERT_FLOAT_EQ(v, 0.4f);
    s.window = 0;
    const auto id = make_reference_predictor("identity");
    EXPECT_TRUE(bit_equal(predict_member(img, *id, s), tta_predict(img, [&](const ByteImage& x) { return id->predict(x); })));
    EXPECT_THROW(predict_ensemble(img, {}, s), ConfigError);
}

TEST(ReferencePredictors, Specs) {
    EXPECT_EQ(make_reference_predictor("identity")->name(), "identity");
    EXPECT_NO_THROW(make_reference_predictor("luminance-sigmoid:5:0.3"));
    EXPECT_THROW(make_reference_predictor("constant:1.5"), ConfigError);
    EXPECT_THROW(make_reference_predictor("constant:x"), ConfigError);
    EXPECT_THROW(make_reference_predictor("unet"), ConfigError);
    const ByteImage dark(1, 1, 1, 0), light(1, 1, 1, 255);
    const LuminanceSigmoidPredictor p;
    EXPECT_GT(p.predict(dark)(0, 0), 0.99f);
    EXPECT_LT(p.predict(light)(0, 0), 0.01f);
}

TEST(Params, AverageExamples) {
    const ParameterSet a{{{"w", {1.0f, 3.0f}}}}, b{{{"w", {3.0f, 5.0f}}}};
    const std::vector<ParameterSet> single{a};
    EXPECT_EQ(average_parameters(single), a);
    const std::vector<ParameterSet> pair{a, b};
    EXPECT_EQ(average_parameters(pair), (ParameterSet{{{"w", {2.0f, 4.0f}}}}));
    const std::vector<ParameterSet> triple{{{{"v", {0.0f}}}}, {{{"v", {3.0f}}}}, {{{"v", {6.0f}}}}};
    EXPECT_EQ(average_parameters(triple).find("v")->at(0), 3.0f);
}

TEST(Params, CopiesAverageToThemselves) {
    std::mt19937_64 g(8);
    std::normal_distribution<float> n(0.0f, 3.0f);
    ParameterSet p;
    for (int e = 0; e < 4; ++e) {
        std::vector<float> v(50);
        for (auto& x : v) x = n(g);
        p.entries.emplace_back("layer" + std::to_string(e), v);
    }
    for (std::size_t k = 1; k <= 7; ++k) {
        const std::vector<ParameterSet> copies(k, p);
        EXPECT_EQ(average_parameters(copies), p) << k;
    }
}

TEST(Params, SchemaMismatch) {
    const ParameterSet a{{{"w", {1.0f, 3.0f}}}};
    const std::vector<ParameterSet> renamed{a, {{{"u", {1.0f, 3.0f}}}}};
    const std::vector<ParameterSet> resized{a, {{{"w", {1.0f}}}}};
    const std::vector<ParameterSet> extra{a, {{{"w", {1.0f, 3.0f}}, {"b", {0.0f}}}}};
    EXPECT_THROW(average_parameters(renamed), ContractError);
    EXPECT_THROW(average_parameters(resized), ContractError);
    EXPECT_THROW(average_parameters(extra), ContractError);
    EXPECT_THROW(average_parameters(std::span<const ParameterSet>{}), ContractError);
}

TEST(Params, FileFormat) {
    support::TempDir dir("pset");
    const ParameterSet p{{{"conv.weight", {0.5f, -1.0f, 2.0f}}, {"bias", {}}}};
    write_parameter_set(p, dir / "p.pset");
    EXPECT_EQ(read_parameter_set(dir / "p.pset"), p);
    const std::string bytes = encode_parameter_set(p);
    EXPECT_EQ(bytes.substr(0, 4), "PSET");
    // magic + count + ("conv.weight": 2 + 11 + 4 + 12) + ("bias": 2 + 4 + 4)
    EXPECT_EQ(bytes.size(), 4u + 4u + 29u + 10u);
    EXPECT_THROW(decode_parameter_set("XSET" + bytes.substr(4)), FormatError);
    EXPECT_THROW(decode_parameter_set(bytes.substr(0, bytes.size() - 2)), FormatError);
    EXPECT_THROW(decode_parameter_set(bytes + "z"), FormatError);
}

TEST(Protocol, RequestLayout) {
    const std::vector<ByteImage> tiles{ByteImage(2, 1, 3, 255), ByteImage(2, 1, 3, 0)};
    const std::string req = protocol::encode_request(tiles);
    EXPECT_EQ(req.size(), 20u + 2u * 2u * 3u * 4u);
    const auto s = protocol::decode_request_header(req.substr(0, 20));
    EXPECT_EQ(s.count, 2u);
    EXPECT_EQ(s.height, 1u);
    EXPECT_EQ(s.width, 2u);
    EXPECT_EQ(s.channels, 3u);
    const std::vector<ByteImage> mixed{ByteImage(2, 1, 3, 0), ByteImage(1, 2, 3, 0)};
    EXPECT_THROW(protocol::encode_request(mixed), ContractError);
    EXPECT_THROW(protocol::decode_request_header("PRB1" + req.substr(4, 16)), FormatError);
}

TEST(Protocol, ResponseRoundTrip) {
    const std::vector<ProbMap> maps{ProbMap(3, 2, 1, 0.25f), ProbMap(3, 2, 1, 1.0f)};
    const std::string resp = protocol::encode_response(maps);
    const protocol::FrameShape s{2, 2, 3, 1};
    const auto back = protocol::decode_response_body(s, std::string_view(resp).substr(16));
    EXPECT_EQ(back, maps);
}

TEST(External, EchoMatchesInProcessIdentity) {
    std::mt19937_64 g(9);
    const ExternalPredictor echo(echo_command(), "echo");
    const ChannelIdentityPredictor ident;
    for (auto [w, h] : {std::pair{50, 37}, {20, 64}}) {
        const ByteImage img = oracle::random_image(g, w, h, 3);
        const TileGrid grid = plan_tiles(w, h, 24, 0.75);
        for (std::size_t threads : {1u, 4u}) {
            EXPECT_TRUE(bit_equal(predict_sliding(img, echo, grid, {threads, 3}), predict_sliding(img, ident, grid)));
        }
    }
    const ByteImage grayimg = oracle::random_image(g, 10, 10, 1);
    EXPECT_TRUE(bit_equal(echo.predict(grayimg), ident.predict(grayimg)));
}

TEST(External, ErrorFramesBecomePredictorErrors) {
    const ExternalPredictor failing(echo_command("--fail 'model exploded'"), "bad");
    try {
        failing.predict(ByteImage(4, 4, 3, 1));
        FAIL();
    } catch (const PredictorError& e) {
        EXPECT_NE(std::string(e.what()).find("model exploded"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
    }
}

TEST(External, DeadProcessIsReported) {
    const ExternalPredictor gone("exit 0", "gone");
    EXPECT_THROW(gone.predict(ByteImage(4, 4, 3, 1)), PredictorError);
    const ExternalPredictor garbage("printf 'JUNKJUNKJUNKJUNK'; cat >/dev/null", "junk");
    EXPECT_THROW(garbage.predict(ByteImage(4, 4, 3, 1)), PredictorError);
}

TEST(External, ConstantModeRangeChecked) {
    const ExternalPredictor bad(echo_command("--constant 1.5"), "range");
    EXPECT_THROW(bad.predict(ByteImage(2, 2, 3, 1)), PredictorError);
    const ExternalPredictor ok(echo_command("--constant 0.25"), "ok");
    for (float v : oracle::values(ok.predict(ByteImage(2, 2, 3, 1)))) EXPECT_EQ(v, 0.25f);
}

TEST(Pseudo, Examples) {
    std::vector<PoolSample> pool;
    for (int i = 0; i < 3; ++i) {
        SampleMeta m;
        m.id = "p" + std::to_string(i);
        m.organ = kAllOrgans[i];
        pool.push_back({m, ByteImage(30 + i, 20, 3, 50)});
    }
    const auto post = OrganPostConfig::defaults();
    const auto zero = pseudo_label(pool, [](const ByteImage& img, const SampleMeta&) {
        return ProbMap(img.width(), img.height(), 1, 0.0f);
    }, post, 1);
    for (const auto& p : zero) {
        EXPECT_TRUE(p.empty);
        EXPECT_EQ(foreground_count(p.mask), 0u);
        EXPECT_EQ(p.round, 1);
    }
    // Working resolution smaller than the image: mask is resampled back.
    const SamplePredictFn half = [](const ByteImage& img, const SampleMeta&) {
        return ProbMap(img.width() / 2, img.height() / 2, 1, 0.6f);
    };
    const auto r1 = pseudo_label(pool, half, post, 1);
    const auto r2 = pseudo_label(pool, half, post, 2);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        EXPECT_FALSE(r1[i].empty);
        EXPECT_TRUE(r1[i].mask.same_shape(pool[i].image));
        EXPECT_EQ(foreground_count(r1[i].mask), pool[i].image.pixel_count());
        EXPECT_EQ(r1[i].mask, r2[i].mask);
        EXPECT_EQ(r2[i].round, 2);
    }
}

TEST(Pseudo, ErrorsNameTheSample) {
    std::vector<PoolSample> pool{{SampleMeta{}, ByteImage(4, 4, 3, 1)}};
    pool[0].meta.id = "slide-17";
    try {
        pseudo_label(pool, [](const ByteImage&, const SampleMeta&) -> ProbMap { throw PredictorError("boom"); },
                     OrganPostConfig::defaults(), 0);
        FAIL();
    } catch (const PredictorError& e) {
        EXPECT_NE(std::string(e.what()).find("slide-17"), std::string::npos);
    }
}
