#include <gtest/gtest.h>

#include <cmath>

#include "condnet/sensitivity.hpp"
#include "oracles.hpp"

using namespace condnet;

namespace {

Network hand_net() {
    // Rows are hidden neurons, columns inputs.
    auto net = Network::zeros(2, 2);
    net.w1 << 1, -2, 0.5, 1;
    net.w2 << 1, 0.5;
    net.b1 << 3, -7;  // biases must not matter
    net.b2 << 11;
    return net;
}

}  // namespace

TEST(ConnectionWeights, HandCase) {
    const auto r = connection_weights(hand_net());
    EXPECT_EQ(r.contribution[0], 1.25);
    EXPECT_EQ(r.contribution[1], -1.5);
    EXPECT_NEAR(r.importance_pct[0], 45.45454545454545, 1e-12);
    EXPECT_NEAR(r.importance_pct[1], 54.54545454545454, 1e-12);
    EXPECT_FALSE(r.degenerate);
    EXPECT_EQ(r.labels, (std::vector<std::string>{"x1", "x2"}));
}

TEST(ConnectionWeights, ZeroOutputLayerIsDegenerate) {
    auto net = hand_net();
    net.w2.setZero();
    const auto r = connection_weights(net);
    EXPECT_TRUE(r.degenerate);
    EXPECT_TRUE(r.contribution.isZero(0.0));
    EXPECT_TRUE(std::isnan(r.importance_pct[0]));
}

TEST(ConnectionWeights, SingleInputIsHundredPercent) {
    auto net = Network::zeros(1, 3);
    net.w1 << 0.3, -0.2, 0.9;
    net.w2 << 1, 2, -1;
    EXPECT_EQ(connection_weights(net).importance_pct[0], 100.0);
}

TEST(ConnectionWeights, MeltLabelsForSixInputs) {
    Rng rng(1);
    const auto r = connection_weights(glorot_uniform_init(6, 10, 1, rng));
    EXPECT_EQ(r.labels.front(), "temperature_K");
    EXPECT_EQ(r.labels[2], "CaO");
    EXPECT_EQ(r.labels.back(), "FeO");
}

TEST(ConnectionWeights, MatchesMatrixProductOracle) {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const auto net = glorot_uniform_init(3, 5, 1, rng);
        const auto r = connection_weights(net);
        const Eigen::RowVectorXd product = net.w2 * net.w1;
        const auto loops = oracle::contributions(net);
        for (Eigen::Index i = 0; i < 3; ++i) {
            ASSERT_NEAR(r.contribution[i], product[i], 1e-12);
            ASSERT_NEAR(r.contribution[i], static_cast<double>(loops[static_cast<std::size_t>(i)]), 1e-12);
        }
        ASSERT_NEAR(r.importance_pct.sum(), 100.0, 1e-9);
        ASSERT_GE(r.importance_pct.minCoeff(), 0.0);
    }
}

TEST(ConnectionWeights, SymmetryProperties) {
    Rng rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const auto net = glorot_uniform_init(4, 6, 1, rng);
        const auto base = connection_weights(net);

        auto swapped = net;
        swapped.w1.col(0).swap(swapped.w1.col(2));
        const auto s = connection_weights(swapped);
        ASSERT_EQ(s.contribution[0], base.contribution[2]);
        ASSERT_EQ(s.contribution[2], base.contribution[0]);
        ASSERT_EQ(s.contribution[1], base.contribution[1]);
        ASSERT_EQ(s.contribution[3], base.contribution[3]);

        auto scaled = net;
        scaled.w2 *= 3.5;
        const auto sc = connection_weights(scaled);
        ASSERT_TRUE(sc.importance_pct.isApprox(base.importance_pct, 1e-12));

        auto negated = net;
        negated.w2 = -negated.w2;
        const auto ng = connection_weights(negated);
        ASSERT_TRUE(ng.contribution.isApprox(-base.contribution, 1e-15));
        ASSERT_TRUE(ng.importance_pct.isApprox(base.importance_pct, 1e-15));
    }
}
