#include <frontdoor/citest.hpp>
#include <frontdoor/rng.hpp>

#include "support/stats.hpp"

#include <gtest/gtest.h>

using namespace frontdoor;
using Eigen::MatrixXd;

namespace {

MatrixXd gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
    MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = standard_normal(rng);
    return m;
}

CiMethod method(CiKind kind, std::uint64_t seed = 0) {
    CiMethod m;
    m.kind = kind;
    m.seed = seed;
    return m;
}

std::vector<double> null_pvalues(CiKind kind, std::size_t cond_dims, std::size_t seeds) {
    std::vector<double> p;
    for (std::size_t s = 0; s < seeds; ++s) {
        Rng rng = make_stream(100, s);
        const MatrixXd x = gaussian(1000, 1, rng);
        const MatrixXd y = gaussian(1000, 1, rng);
        const MatrixXd z = gaussian(1000, cond_dims, rng);
        p.push_back(test_ci(x, y, z, method(kind, s)).p_value);
    }
    return p;
}

}  // namespace

TEST(CiTest, RcotNullIsCalibrated) {
    EXPECT_LT(testkit::ks_uniform(null_pvalues(CiKind::rcot, 0, 500)), 0.08);
    EXPECT_LT(testkit::ks_uniform(null_pvalues(CiKind::rcot, 1, 500)), 0.08);
}

TEST(CiTest, FisherZNullIsCalibrated) {
    EXPECT_LT(testkit::ks_uniform(null_pvalues(CiKind::fisher_z, 0, 500)), 0.08);
    EXPECT_LT(testkit::ks_uniform(null_pvalues(CiKind::fisher_z, 2, 500)), 0.08);
}

TEST(CiTest, CoinFlipsAreCalibrated) {
    std::vector<double> p;
    for (std::size_t s = 0; s < 300; ++s) {
        Rng rng = make_stream(101, s);
        MatrixXd x(2000, 1);
        MatrixXd y(2000, 1);
        for (Eigen::Index r = 0; r < 2000; ++r) {
            x(r, 0) = uniform01(rng) < 0.5;
            y(r, 0) = uniform01(rng) < 0.5;
        }
        p.push_back(test_ci(x, y, MatrixXd(2000, 0), method(CiKind::rcot, s)).p_value);
    }
    EXPECT_LT(testkit::ks_uniform(p), 0.1);
}

TEST(CiTest, DetectsNearCopy) {
    Rng rng = make_stream(102, 0);
    const MatrixXd x = gaussian(1000, 1, rng);
    const MatrixXd y = x + 0.01 * gaussian(1000, 1, rng);
    for (auto kind : {CiKind::rcot, CiKind::fisher_z}) EXPECT_LT(test_ci(x, y, MatrixXd(1000, 0), method(kind)).p_value, 1e-6);
}

TEST(CiTest, ChainSizeUnderConditioning) {
    // x -> c -> y: x ⊥ y | c holds, so rejections occur at about the level.
    for (auto kind : {CiKind::rcot, CiKind::fisher_z}) {
        int rejections = 0;
        for (std::size_t s = 0; s < 200; ++s) {
            Rng rng = make_stream(103, s);
            const MatrixXd x = gaussian(5000, 1, rng);
            const MatrixXd c = 0.8 * x + gaussian(5000, 1, rng);
            const MatrixXd y = 0.8 * c + gaussian(5000, 1, rng);
            rejections += test_ci(x, y, c, method(kind, s)).p_value < 0.05;
        }
        const double rate = rejections / 200.0;
        EXPECT_GE(rate, 0.01) << to_string(kind);
        EXPECT_LE(rate, 0.12) << to_string(kind);
    }
}

TEST(CiTest, FisherZAgreesWithPermutation) {
    int agree = 0;
    for (std::size_t s = 0; s < 200; ++s) {
        Rng rng = make_stream(104, s);
        // half the instances carry a weak direct x -> y effect
        const double effect = s % 2 ? 0.0 : uniform(rng, 0.0, 0.15);
        const MatrixXd c = gaussian(2000, 1, rng);
        const MatrixXd x = 0.7 * c + gaussian(2000, 1, rng);
        const MatrixXd y = 0.7 * c + effect * x + gaussian(2000, 1, rng);
        const bool fz = test_ci(x, y, c, method(CiKind::fisher_z, s)).p_value < 0.05;
        const bool perm = test_ci(x, y, c, method(CiKind::permutation, s)).p_value < 0.05;
        agree += fz == perm;
    }
    EXPECT_GE(agree, 190);
}

TEST(CiTest, AffineRescalingLeavesRcotUnchanged) {
    Rng rng = make_stream(105, 0);
    const MatrixXd x = gaussian(500, 1, rng);
    const MatrixXd z = gaussian(500, 1, rng);
    const MatrixXd y = 0.3 * x + z + gaussian(500, 1, rng);
    const auto a = test_ci(x, y, z, method(CiKind::rcot, 9));
    const auto b = test_ci((3.0 * x).array() + 5.0, (2.0 * y).array() + 1.0, (0.5 * z).array() - 4.0,
                           method(CiKind::rcot, 9));
    EXPECT_NEAR(a.p_value, b.p_value, 1e-9);
    EXPECT_NEAR(a.statistic, b.statistic, 1e-6 * std::max(1.0, a.statistic));
}

TEST(CiTest, DeterministicPerSeed) {
    Rng rng = make_stream(106, 0);
    const MatrixXd x = gaussian(400, 2, rng);
    const MatrixXd y = gaussian(400, 1, rng);
    const MatrixXd z = gaussian(400, 2, rng);
    for (auto kind : {CiKind::rcot, CiKind::permutation, CiKind::fisher_z}) {
        const auto a = test_ci(x, y, z, method(kind, 4));
        const auto b = test_ci(x, y, z, method(kind, 4));
        EXPECT_EQ(a.p_value, b.p_value);
        EXPECT_EQ(a.statistic, b.statistic);
        EXPECT_GE(a.p_value, 0.0);
        EXPECT_LE(a.p_value, 1.0);
    }
}

TEST(CiTest, EmptyAndConstantInputs) {
    Rng rng = make_stream(107, 0);
    const MatrixXd x = gaussian(100, 1, rng);
    const auto empty = test_ci(MatrixXd(100, 0), x, MatrixXd(100, 0), method(CiKind::rcot));
    EXPECT_EQ(empty.p_value, 1.0);
    EXPECT_FALSE(empty.degenerate);

    const auto flat = test_ci(MatrixXd::Constant(100, 1, 3.0), x, MatrixXd(100, 0), method(CiKind::rcot));
    EXPECT_EQ(flat.p_value, 1.0);
    EXPECT_TRUE(flat.degenerate);
}

TEST(CiTest, TableOverloadChecksColumns) {
    Rng rng = make_stream(108, 0);
    const DataTable t(gaussian(50, 3, rng), {"a", "b", "c"});
    EXPECT_THROW(test_ci(t, {0}, {0}, {}, method(CiKind::fisher_z)), std::invalid_argument);
    EXPECT_THROW(test_ci(t, {0}, {1}, {1}, method(CiKind::fisher_z)), std::invalid_argument);
    EXPECT_EQ(test_ci_unconditional(t, {}, {1}, method(CiKind::rcot)).p_value, 1.0);
    const DataTable small(gaussian(20, 2, rng), {"a", "b"});
    EXPECT_THROW(test_ci(small, {0}, {1}, {}, method(CiKind::rcot)), std::invalid_argument);
}

TEST(CiTest, SingularConditioningIsFlagged) {
    Rng rng = make_stream(109, 0);
    MatrixXd z = gaussian(200, 1, rng);
    MatrixXd zz(200, 2);
    zz << z, 2.0 * z;
    const MatrixXd x = z + gaussian(200, 1, rng);
    const MatrixXd y = z + gaussian(200, 1, rng);
    const auto r = test_ci(x, y, zz, method(CiKind::fisher_z));
    EXPECT_TRUE(r.ridge_floor);
    EXPECT_GT(r.p_value, 0.0);
}

TEST(CiTest, BandwidthCacheGivesIdenticalResults) {
    Rng rng = make_stream(110, 0);
    const DataTable t(gaussian(300, 4, rng), {"a", "b", "c", "d"});
    BandwidthCache cache;
    for (int pass = 0; pass < 2; ++pass) {
        const auto cached = test_ci(t, {0}, {1}, {2, 3}, method(CiKind::rcot, 3), &cache);
        const auto plain = test_ci(t, {0}, {1}, {2, 3}, method(CiKind::rcot, 3));
        EXPECT_EQ(cached.p_value, plain.p_value);
    }
}

TEST(CiTest, MethodValidation) {
    CiMethod m;
    m.rcot.n_features_xy = 0;
    EXPECT_THROW(m.validate(), std::invalid_argument);
    EXPECT_EQ(parse_ci_kind("fisher_z"), CiKind::fisher_z);
    EXPECT_THROW(parse_ci_kind("gtest"), std::invalid_argument);
}
