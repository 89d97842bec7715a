#include <gtest/gtest.h>

#include <map>

#include "ftu/eval/folds.hpp"
#include "ftu/eval/losses.hpp"
#include "ftu/eval/lr_plateau.hpp"
#include "ftu/eval/metrics.hpp"
#include "oracles.hpp"

using namespace ftu;
using namespace ftu::eval;

namespace {

std::vector<SampleMeta> corpus(const std::map<Organ, std::size_t>& counts) {
    std::vector<SampleMeta> v;
    for (const auto& [organ, n] : counts)
        for (std::size_t i = 0; i < n; ++i) {
            SampleMeta m;
            m.id = std::string(to_string(organ)) + "-" + std::to_string(i);
            m.organ = organ;
            v.push_back(m);
        }
    return v;
}

void check_balanced(const std::vector<SampleMeta>& metas, const FoldAssignment& f) {
    ASSERT_EQ(f.folds.size(), metas.size());
    std::vector<std::size_t> total(f.k, 0);
    for (Organ o : kAllOrgans) {
        std::vector<std::size_t> per(f.k, 0);
        for (std::size_t i = 0; i < metas.size(); ++i) {
            ASSERT_LT(f.folds[i], f.k);
            if (metas[i].organ == o) ++per[f.folds[i]];
        }
        ASSERT_LE(*std::max_element(per.begin(), per.end()) - *std::min_element(per.begin(), per.end()), 1u);
    }
    for (std::size_t x : f.folds) ++total[x];
    ASSERT_LE(*std::max_element(total.begin(), total.end()) - *std::min_element(total.begin(), total.end()), 1u);
}

std::vector<double> random_probs(std::mt19937_64& g, std::size_t n) {
    std::uniform_real_distribution<double> u(0.02, 0.98);
    std::vector<double> v(n);
    for (auto& x : v) x = u(g);
    return v;
}

std::vector<double> random_labels(std::mt19937_64& g, std::size_t n) {
    std::bernoulli_distribution b(0.4);
    std::vector<double> v(n);
    for (auto& x : v) x = b(g) ? 1.0 : 0.0;
    return v;
}

} // namespace

TEST(Dice, Examples) {
    const BinaryMask a(3, 1, 1, std::vector<std::uint8_t>{1, 1, 0});
    const BinaryMask b(3, 1, 1, std::vector<std::uint8_t>{1, 0, 0});
    const BinaryMask c(3, 1, 1, std::vector<std::uint8_t>{0, 0, 1});
    EXPECT_EQ(dice(a, a), 1.0);
    EXPECT_EQ(dice(b, c), 0.0);
    const BinaryMask p(5, 1, 1, std::vector<std::uint8_t>{1, 1, 0, 0, 0});
    const BinaryMask t(5, 1, 1, std::vector<std::uint8_t>{0, 1, 1, 1, 0});
    EXPECT_NEAR(dice(p, t), 0.4, 1e-12);
    EXPECT_EQ(dice(BinaryMask(2, 2), BinaryMask(2, 2)), 1.0);
    EXPECT_EQ(dice(a, BinaryMask(3, 1)), 0.0);
    EXPECT_THROW(dice(a, BinaryMask(1, 3)), ContractError);
}

TEST(Dice, SymmetryAndSelf) {
    std::mt19937_64 g(1);
    for (int i = 0; i < 1000; ++i) {
        const BinaryMask x = oracle::random_mask(g, 9, 7, 0.3);
        const BinaryMask y = oracle::random_mask(g, 9, 7, 0.3);
        ASSERT_EQ(dice(x, y), dice(y, x));
        ASSERT_EQ(dice(x, x), 1.0);
    }
}

TEST(MeanDice, Examples) {
    const BinaryMask a(2, 1, 1, std::vector<std::uint8_t>{1, 0});
    const BinaryMask b(2, 1, 1, std::vector<std::uint8_t>{0, 1});
    const std::vector<MaskPair> single{{&a, &b}};
    EXPECT_EQ(mean_dice(single), 0.0);
    const std::vector<MaskPair> mixed{{&a, &a}, {&a, &b}};
    EXPECT_EQ(mean_dice(mixed), 0.5);
    EXPECT_THROW(mean_dice(std::span<const MaskPair>{}), ContractError);
}

TEST(OrganReport, OneRowPerOrganPlusOverall) {
    const std::vector<Organ> organs{Organ::spleen, Organ::kidney, Organ::lung, Organ::prostate,
                                    Organ::large_intestine, Organ::kidney};
    const std::vector<double> scores{0.5, 1.0, 0.2, 0.4, 0.9, 0.0};
    const auto rows = organ_report(organs, scores);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0].group, "kidney");
    EXPECT_EQ(rows[0].n_samples, 2u);
    EXPECT_EQ(rows[0].mean_dice, 0.5);
    EXPECT_EQ(rows[5].group, "overall");
    EXPECT_NEAR(rows[5].mean_dice, 3.0 / 6.0, 1e-15);
}

TEST(AdjustPublicScore, Examples) {
    EXPECT_NEAR(adjust_public_score(0.61453, 0.72), 0.8535, 5e-5);
    EXPECT_EQ(adjust_public_score(0.7, 1.0), 0.7);
    EXPECT_EQ(adjust_public_score(0.0, 0.72), 0.0);
    EXPECT_EQ(adjust_public_score(0.9, 0.5), 1.0);
    EXPECT_THROW(adjust_public_score(0.5, 0.0), ContractError);
    EXPECT_THROW(adjust_public_score(0.5, -1.0), ContractError);
}

TEST(Folds, FullCorpus) {
    const auto metas = corpus({{Organ::kidney, 99}, {Organ::prostate, 93}, {Organ::large_intestine, 58},
                               {Organ::spleen, 53}, {Organ::lung, 49}});
    ASSERT_EQ(metas.size(), 352u);
    const auto f = stratified_kfold(metas, 5, 2022);
    check_balanced(metas, f);
    std::vector<std::size_t> sizes(5, 0);
    for (std::size_t x : f.folds) ++sizes[x];
    for (std::size_t s : sizes) EXPECT_TRUE(s == 70 || s == 71) << s;
    const auto again = stratified_kfold(metas, 5, 2022);
    EXPECT_EQ(f.folds, again.folds);
    EXPECT_NE(f.folds, stratified_kfold(metas, 5, 2023).folds);
}

TEST(Folds, SmallCases) {
    const auto five = corpus({{Organ::lung, 5}});
    const auto f = stratified_kfold(five, 5, 1);
    std::vector<std::size_t> sorted = f.folds;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
    EXPECT_EQ(f.fold_of("lung-2"), f.folds[2]);
    EXPECT_THROW(f.fold_of("nope"), DataError);
    EXPECT_THROW(stratified_kfold(five, 1, 1), ContractError);
}

TEST(Folds, BalancedForRandomDistributions) {
    std::mt19937_64 g(3);
    std::uniform_int_distribution<std::size_t> n(0, 40), k(2, 9);
    for (int iter = 0; iter < 300; ++iter) {
        std::map<Organ, std::size_t> counts;
        for (Organ o : kAllOrgans) counts[o] = n(g);
        const auto metas = corpus(counts);
        check_balanced(metas, stratified_kfold(metas, k(g), iter));
    }
}

TEST(Losses, Examples) {
    const std::vector<double> p{0.9}, y{1.0};
    EXPECT_NEAR(focal_loss(p, y, 2.0), 0.0010536, 1e-7);
    EXPECT_NEAR(focal_loss(p, y, 2.0), -0.01 * std::log(0.9), 1e-15);
    const std::vector<double> exact{1.0, 0.0, 1.0, 0.0};
    for (double s : {1e-2, 1e-4, 1e-6}) {
        EXPECT_LT(soft_dice_loss(exact, exact, s), 1e-6);
        EXPECT_LT(jaccard_loss(exact, exact, s), 1e-6);
    }
    EXPECT_THROW(focal_loss(p, y, -1.0), ContractError);
    EXPECT_THROW(bce(p, std::vector<double>{1.0, 0.0}), ContractError);
    EXPECT_THROW(bce(std::vector<double>{}, std::vector<double>{}), ContractError);
}

TEST(Losses, FocalWithZeroGammaIsBce) {
    std::mt19937_64 g(4);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_probs(g, 64), y = random_labels(g, 64);
        ASSERT_NEAR(focal_loss(p, y, 0.0), bce(p, y), 1e-12);
    }
}

TEST(Losses, Ranges) {
    std::mt19937_64 g(5);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_probs(g, 64), y = random_labels(g, 64);
        const double d = soft_dice_loss(p, y), j = jaccard_loss(p, y);
        ASSERT_GE(bce(p, y), 0.0);
        ASSERT_GE(focal_loss(p, y), 0.0);
        ASSERT_GE(d, 0.0);
        ASSERT_LE(d, 1.0);
        ASSERT_LE(j, 1.0);
        ASSERT_GE(j, d - 1e-15);
        ASSERT_GE(combined_loss(p, y), 0.0);
    }
}

TEST(Losses, CombinedIsWeightedMean) {
    std::mt19937_64 g(6);
    const auto p = random_probs(g, 16), y = random_labels(g, 16);
    const double mean = (bce(p, y) + soft_dice_loss(p, y) + focal_loss(p, y) + jaccard_loss(p, y)) / 4.0;
    EXPECT_NEAR(combined_loss(p, y), mean, 1e-15);
    EXPECT_NEAR(combined_loss(p, y, {}, {1, 0, 0, 0}), bce(p, y), 1e-15);
    EXPECT_THROW(combined_loss(p, y, {}, {0, 0, 0, 0}), ContractError);
}

TEST(LossGradients, BceExamples) {
    const std::vector<double> p(4, 0.5), y(4, 1.0);
    for (double v : loss_gradient(p, y, LossKind::bce)) EXPECT_NEAR(v, -2.0 / 4.0, 1e-15);
    const std::vector<double> at_optimum{kLossEps, 1.0 - kLossEps};
    const std::vector<double> labels{0.0, 1.0};
    for (double v : loss_gradient(at_optimum, labels, LossKind::bce)) EXPECT_LE(std::abs(v), 1.0);
}

TEST(LossGradients, MatchFiniteDifferences) {
    std::mt19937_64 g(7);
    for (LossKind kind : {LossKind::bce, LossKind::soft_dice, LossKind::focal, LossKind::jaccard}) {
        for (int iter = 0; iter < 25; ++iter) {
            const auto p = random_probs(g, 64), y = random_labels(g, 64);
            const auto analytic = loss_gradient(p, y, kind);
            const auto f = [&](const std::vector<double>& q) { return loss(kind, q, y); };
            for (std::size_t i = 0; i < p.size(); ++i) {
                ASSERT_NEAR(analytic[i], oracle::central_difference(f, p, i, 1e-4), 1e-5)
                    << "kind " << static_cast<int>(kind) << " index " << i;
            }
        }
    }
}

TEST(LrPlateau, Traces) {
    LrPlateauState s;
    for (int i = 0; i < 20; ++i) {
        s = lr_plateau_step(s, 1.0 - 0.01 * i);
        ASSERT_EQ(s.current_lr, 0.001);
    }
    LrPlateauState flat;
    flat.best_metric = 0.5;
    for (int i = 0; i < 3; ++i) flat = lr_plateau_step(flat, 0.5);
    EXPECT_EQ(flat.current_lr, 0.001);
    flat = lr_plateau_step(flat, 0.5);
    EXPECT_EQ(flat.current_lr, 0.0005);
    for (int i = 0; i < 4; ++i) flat = lr_plateau_step(flat, 0.5);
    EXPECT_EQ(flat.current_lr, 0.00025);
}

TEST(LrPlateau, NeverIncreases) {
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LrPlateauState s;
    double prev = s.current_lr;
    for (int i = 0; i < 500; ++i) {
        s = lr_plateau_step(s, u(g));
        ASSERT_LE(s.current_lr, prev);
        prev = s.current_lr;
    }
    LrPlateauState bad;
    bad.factor = 1.0;
    EXPECT_THROW(lr_plateau_step(bad, 0.1), ContractError);
}
