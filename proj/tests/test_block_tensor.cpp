#include <gtest/gtest.h>

#include <sstream>

#include "fragdmrg/block_tensor.hpp"
#include "fragdmrg/serialize.hpp"
#include "test_utils.hpp"

using namespace fragdmrg;

namespace {

Index phys_index(Direction dir = Direction::In) {
    return Index(dir, {{{0, 0}, 1}, {{1, -1}, 1}, {{1, 1}, 1}, {{2, 0}, 1}});
}

} // namespace

TEST(QNumTest, ArithmeticAndOrdering) {
    QNum a{1, 1}, b{1, -1};
    EXPECT_EQ(a + b, (QNum{2, 0}));
    EXPECT_EQ(a - a, (QNum{0, 0}));
    EXPECT_EQ(-a, (QNum{-1, -1}));
    EXPECT_TRUE(b < a);
    EXPECT_TRUE((QNum{0, 0}) < a);
}

TEST(IndexTest, CanonicalSectorOrder) {
    Index idx(Direction::In, {{{2, 0}, 1}, {{0, 0}, 1}, {{1, 1}, 1}, {{1, -1}, 1}});
    ASSERT_EQ(idx.n_sectors(), 4);
    EXPECT_EQ(idx.sectors[0].q, (QNum{0, 0}));
    EXPECT_EQ(idx.sectors[1].q, (QNum{1, -1}));
    EXPECT_EQ(idx.sectors[2].q, (QNum{1, 1}));
    EXPECT_EQ(idx.sectors[3].q, (QNum{2, 0}));
    EXPECT_EQ(idx.total_dim(), 4);
    EXPECT_THROW(Index(Direction::In, {{{0, 0}, 1}, {{0, 0}, 2}}), IncompatibleIndex);
}

TEST(BlockTensorTest, FluxRuleGatesBlocks) {
    BlockTensor t({1, 1}, {phys_index(Direction::Out)});
    EXPECT_NO_THROW(t.block({2}));
    EXPECT_THROW(t.block({0}), IncompatibleIndex);
    // incoming flips the signed charge
    BlockTensor s({-1, 1}, {phys_index(Direction::In)});
    EXPECT_NO_THROW(s.block({1}));
}

TEST(BlockTensorTest, DenseRoundTripExact) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Index> idx{testutil::random_fermion_bond(rng, 3),
                               testutil::random_fermion_bond(rng, 2).flipped(),
                               testutil::random_fermion_bond(rng, 3)};
        QNum flux{std::uniform_int_distribution<int>(-1, 1)(rng), 0};
        BlockTensor t(flux, idx);
        t.fill_random(rng);
        const auto d = t.to_dense();
        BlockTensor back = BlockTensor::from_dense(flux, idx, d);
        const auto d2 = back.to_dense();
        ASSERT_EQ(d.size(), d2.size());
        EXPECT_EQ(testutil::max_abs_diff(d, d2), 0.0);
    }
}

TEST(BlockTensorTest, PermutedMatchesDense) {
    std::mt19937_64 rng(11);
    std::vector<Index> idx{testutil::random_fermion_bond(rng, 3),
                           testutil::random_fermion_bond(rng, 4).flipped(),
                           testutil::random_fermion_bond(rng, 2)};
    BlockTensor t({0, 0}, idx);
    t.fill_random(rng);
    const std::vector<int> perm{2, 0, 1};
    BlockTensor p = t.permuted(perm);
    const auto dims = t.dense_dims();
    std::vector<double> expect;
    dense_permute(t.to_dense(), dims, perm, expect);
    EXPECT_EQ(testutil::max_abs_diff(p.to_dense(), expect), 0.0);
}

TEST(BlockTensorTest, VectorOps) {
    std::mt19937_64 rng(3);
    std::vector<Index> idx{phys_index(), testutil::random_fermion_bond(rng, 3).flipped()};
    BlockTensor a({0, 0}, idx), b({0, 0}, idx);
    a.fill_random(rng);
    b.fill_random(rng);
    BlockTensor c = a;
    c.axpy(2.0, b);
    EXPECT_NEAR(c.dot(a), a.norm2() + 2.0 * b.dot(a), 1e-12 * (1 + a.norm2()));
    c.scale(0.0);
    EXPECT_EQ(c.norm(), 0.0);
}

TEST(SerializeTest, RoundTripBytesStable) {
    std::mt19937_64 rng(23);
    std::vector<Index> idx{testutil::random_fermion_bond(rng, 3),
                           testutil::random_fermion_bond(rng, 3).flipped(),
                           phys_index()};
    BlockTensor t({1, -1}, idx);
    t.fill_random(rng);
    std::ostringstream os1(std::ios::binary);
    write_tensor(os1, t);
    std::istringstream is(os1.str(), std::ios::binary);
    BlockTensor u = read_tensor(is);
    EXPECT_EQ(u.flux, t.flux);
    ASSERT_EQ(u.blocks.size(), t.blocks.size());
    EXPECT_EQ(testutil::max_abs_diff(u.to_dense(), t.to_dense()), 0.0);
    std::ostringstream os2(std::ios::binary);
    write_tensor(os2, u);
    EXPECT_EQ(os1.str(), os2.str());
}
