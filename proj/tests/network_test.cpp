#include <gtest/gtest.h>

#include <cmath>

#include "condnet/network.hpp"
#include "condnet/rng.hpp"

using namespace condnet;

TEST(Rng, MatchesStandardMt19937_64) {
    // The standard fixes the 10000th output of a default-seeded mt19937_64.
    Rng rng(5489);
    std::uint64_t x = 0;
    for (int i = 0; i < 10000; ++i) x = rng.next_u64();
    EXPECT_EQ(x, 9981545732273789042ULL);
}

TEST(Rng, UniformAndBelowRanges) {
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_LT(rng.below(7), 7u);
    }
    EXPECT_EQ(rng.below(1), 0u);
}

TEST(Rng, StreamsAreIndependentAndReproducible) {
    auto a = Rng::stream(9, 1);
    auto b = Rng::stream(9, 1);
    auto c = Rng::stream(9, 2);
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
}

TEST(Rng, ShuffleIsPermutation) {
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[static_cast<std::size_t>(i)] = i;
    Rng rng(1);
    rng.shuffle(std::span(v));
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
    EXPECT_NE(v, sorted);
}

TEST(MinWidth, Boundary) {
    const auto wide = check_min_width(6, 100);
    EXPECT_TRUE(wide.ok);
    EXPECT_EQ(wide.minimum, 7);
    EXPECT_FALSE(check_min_width(6, 6).ok);
    EXPECT_TRUE(check_min_width(6, 7).ok);
    static_assert(!check_min_width(6, 6).ok);
}

TEST(GlorotInit, BoundsAndZeroBiases) {
    Rng rng(1);
    const auto net = glorot_uniform_init(6, 100, 1, rng);
    EXPECT_NEAR(glorot_limit(6, 100), 0.23791547571544325, 1e-15);
    EXPECT_LE(net.w1.cwiseAbs().maxCoeff(), glorot_limit(6, 100));
    EXPECT_LE(net.w2.cwiseAbs().maxCoeff(), glorot_limit(100, 1));
    EXPECT_TRUE(net.b1.isZero(0.0));
    EXPECT_TRUE(net.b2.isZero(0.0));
    EXPECT_EQ(net.input_dim(), 6);
    EXPECT_EQ(net.hidden_width(), 100);
    EXPECT_EQ(net.output_dim(), 1);
}

TEST(GlorotInit, DeterministicPerSeed) {
    Rng a(7), b(7), c(8);
    const auto n1 = glorot_uniform_init(6, 20, 1, a);
    const auto n2 = glorot_uniform_init(6, 20, 1, b);
    const auto n3 = glorot_uniform_init(6, 20, 1, c);
    EXPECT_EQ(n1, n2);
    EXPECT_FALSE(n1 == n3);
}

TEST(GlorotInit, RejectsNarrowLayer) {
    Rng rng(0);
    EXPECT_THROW(glorot_uniform_init(6, 6, 1, rng), ConfigError);
}

TEST(GlorotInit, Statistics) {
    Rng rng(123);
    Eigen::MatrixXd m(100, 1000);  // 1e5 draws, fan_in 1000, fan_out 100
    fill_glorot_uniform(m, rng);
    const double limit = glorot_limit(1000, 100);
    const double n = static_cast<double>(m.size());
    const double mean = m.mean();
    const double var = (m.array() - mean).square().sum() / n;
    EXPECT_LT(std::abs(mean), 3.0 * limit / std::sqrt(3.0 * n));
    EXPECT_NEAR(var, limit * limit / 3.0, 0.05 * limit * limit / 3.0);
    EXPECT_LE(m.cwiseAbs().maxCoeff(), limit);
}

TEST(Forward, ZeroNetworkGivesZero) {
    const auto net = Network::zeros(6, 7);
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(6, -3, 3);
    EXPECT_EQ(forward(net, x).y, 0.0);
}

TEST(Forward, ReluCases) {
    auto net = Network::zeros(1, 2);
    net.b1 << -1, 2;
    const auto r = forward(net, Eigen::VectorXd::Zero(1));
    EXPECT_EQ(r.hidden_pre[0], -1);
    EXPECT_EQ(r.hidden_post[0], 0);
    EXPECT_EQ(r.hidden_pre[1], 2);
    EXPECT_EQ(r.hidden_post[1], 2);
}

TEST(Forward, TwoNeuronHandCase) {
    auto net = Network::zeros(1, 2);
    net.w1 << 1, -1;
    net.w2 << 1, 1;
    Eigen::VectorXd x(1);
    x << 3;
    EXPECT_EQ(forward(net, x).y, 3.0);
    x << -3;
    EXPECT_EQ(forward(net, x).y, 3.0);
}

TEST(Forward, OverflowDetected) {
    auto net = Network::zeros(1, 2);
    net.w1 << 1e308, 1e308;
    net.w2 << 1e308, 1e308;
    Eigen::VectorXd x(1);
    x << 10;
    EXPECT_THROW(forward(net, x), NumericError);
    EXPECT_THROW(forward(net, Eigen::VectorXd::Zero(2)), ConfigError);
}

TEST(Forward, BatchMatchesSingle) {
    Rng rng(4);
    const auto net = glorot_uniform_init(6, 12, 1, rng);
    Eigen::MatrixXd x(6, 9);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1, 1);
    const auto batch = forward_batch(net, x);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const auto single = forward(net, x.col(j));
        EXPECT_NEAR(batch.y[j], single.y, 1e-14);
        EXPECT_TRUE(batch.hidden_post.col(j).isApprox(single.hidden_post, 1e-14));
    }
}

TEST(Forward, ReluOutputNonNegativeProperty) {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const auto net = glorot_uniform_init(6, 7 + trial % 20, 1, rng);
        Eigen::VectorXd x(6);
        for (auto& v : x) v = rng.uniform(-5, 5);
        ASSERT_GE(forward(net, x).hidden_post.minCoeff(), 0.0);
    }
}

TEST(Forward, PiecewiseLinearProperty) {
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const auto net = glorot_uniform_init(6, 16, 1, rng);
        Eigen::VectorXd x(6), d(6);
        for (auto& v : x) v = rng.uniform(0, 1);
        for (auto& v : d) v = rng.uniform(-1, 1);
        const auto base = forward(net, x);
        if (base.hidden_pre.cwiseAbs().minCoeff() < 1e-3) continue;
        const double s1 = (forward(net, x + 1e-6 * d).y - base.y) / 1e-6;
        const double s2 = (forward(net, x + 1e-5 * d).y - base.y) / 1e-5;
        ASSERT_NEAR(s1, s2, 1e-6);
    }
}

TEST(Validate, RejectsBadNetworks) {
    auto net = Network::zeros(2, 3);
    EXPECT_NO_THROW(validate(net));
    net.b1 = Eigen::VectorXd::Zero(2);
    EXPECT_THROW(validate(net), ModelFormatError);
    net = Network::zeros(2, 3);
    net.w2(0, 1) = std::nan("");
    EXPECT_THROW(validate(net), ModelFormatError);
}
