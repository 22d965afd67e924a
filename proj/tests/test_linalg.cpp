#include <gtest/gtest.h>

#include "fragdmrg/linalg.hpp"
#include "test_utils.hpp"

using namespace fragdmrg;

namespace {

BlockTensor identity_on(const Index &in_like) {
    // rank-2 identity: (out, in) over the same sectors
    BlockTensor id({0, 0}, {in_like.flipped(), in_like});
    for (int s = 0; s < in_like.n_sectors(); ++s) {
        auto &blk = id.block({s, s});
        const int d = in_like.sectors[s].dim;
        for (int i = 0; i < d; ++i)
            blk[i * d + i] = 1.0;
    }
    return id;
}

} // namespace

TEST(ContractTest, IdentityIsNeutral) {
    std::mt19937_64 rng(5);
    Index bond = testutil::random_fermion_bond(rng, 4); // In
    BlockTensor t({0, 0}, {testutil::random_fermion_bond(rng, 3), bond.flipped()});
    t.fill_random(rng);
    // t's last index is Out; contract with identity's In slot
    BlockTensor id = identity_on(bond);
    BlockTensor r = contract(t, id.permuted({1, 0}), {{1, 0}});
    EXPECT_LT(testutil::max_abs_diff(r.to_dense(), t.to_dense()), 1e-15);
}

TEST(ContractTest, ScalarSectorProduct) {
    Index li(Direction::In, {{{0, 0}, 1}});
    BlockTensor a({0, 0}, {li.flipped(), li});
    a.block({0, 0})[0] = 3.0;
    BlockTensor b({0, 0}, {li.flipped(), li});
    b.block({0, 0})[0] = -2.0;
    BlockTensor c = contract(a, b, {{1, 0}});
    EXPECT_DOUBLE_EQ(c.block({0, 0})[0], -6.0);
}

TEST(ContractTest, MatchesDenseEmbeddingOracle) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        Index shared1 = testutil::random_fermion_bond(rng, 3);
        Index shared2 = testutil::random_fermion_bond(rng, 2);
        BlockTensor a({0, 0}, {testutil::random_fermion_bond(rng, 3), shared1.flipped(),
                               shared2.flipped()});
        BlockTensor b({1, 1}, {shared1, testutil::random_fermion_bond(rng, 3).flipped(),
                               shared2});
        a.fill_random(rng);
        b.fill_random(rng);
        BlockTensor c = contract(a, b, {{1, 0}, {2, 2}});
        std::vector<int> odims;
        auto expect = testutil::dense_tensordot(a.to_dense(), a.dense_dims(), b.to_dense(),
                                                b.dense_dims(), {{1, 0}, {2, 2}}, &odims);
        const auto got = c.to_dense();
        ASSERT_EQ(got.size(), expect.size());
        EXPECT_LT(testutil::max_abs_diff(got, expect), 1e-12);
    }
}

TEST(ContractTest, ErrorsOnBadPairs) {
    std::mt19937_64 rng(2);
    Index bond = testutil::random_fermion_bond(rng, 2);
    BlockTensor a({0, 0}, {bond, bond.flipped()});
    BlockTensor b({0, 0}, {bond, bond.flipped()});
    EXPECT_THROW(contract(a, b, {{1, 5}}), RankError);
    EXPECT_THROW(contract(a, b, {{0, 0}}), IncompatibleIndex); // both In
    Index other(Direction::In, {{{0, 0}, 3}});
    BlockTensor c({0, 0}, {other, other.flipped()});
    EXPECT_THROW(contract(a, c, {{1, 0}}), IncompatibleIndex); // sector mismatch
}

TEST(SvdTest, RankOneKeepsSingleValue) {
    Index li(Direction::In, {{{0, 0}, 3}, {{1, 1}, 2}});
    BlockTensor t({0, 0}, {li.flipped(), li});
    // rank-1 within the (0,0) sector
    auto &blk = t.block({0, 0});
    const double u[3] = {1, 2, -1}, v[3] = {0.5, -1, 2};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            blk[i * 3 + j] = u[i] * v[j];
    SvdResult r = svd_truncate(t, {0}, {1}, 8, 1e-20);
    EXPECT_EQ(r.kept_total(), 1);
    EXPECT_LE(r.discarded_weight, 1e-20);
}

TEST(SvdTest, CapForcesDiscard) {
    Index li(Direction::In, {{{0, 0}, 3}});
    BlockTensor t({0, 0}, {li.flipped(), li});
    auto &blk = t.block({0, 0});
    blk[0] = 3.0;
    blk[4] = 2.0;
    blk[8] = 1.0;
    SvdResult r = svd_truncate(t, {0}, {1}, 2, 0.0);
    ASSERT_EQ(r.kept_total(), 2);
    EXPECT_NEAR(r.singular_values[0].second[0], 3.0, 1e-12);
    EXPECT_NEAR(r.singular_values[0].second[1], 2.0, 1e-12);
    EXPECT_NEAR(r.discarded_weight, 1.0, 1e-12);
}

TEST(SvdTest, ReconstructionAndOrthonormality) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        Index li = testutil::random_fermion_bond(rng, 3);
        Index ri = testutil::random_fermion_bond(rng, 3);
        BlockTensor t({1, -1}, {li.flipped(), testutil::random_fermion_bond(rng, 2).flipped(), ri});
        t.fill_random(rng);
        if (t.blocks.empty())
            continue;
        SvdResult r = svd_truncate(t, {0, 1}, {2}, 1000, 1e-24);
        // reconstruction
        BlockTensor us = attach_singular_values(r.u, 2, r.singular_values);
        BlockTensor rec = contract(us, r.vt, {{2, 0}});
        EXPECT_LT(testutil::max_abs_diff(rec.to_dense(), t.to_dense()), 1e-12 * (1 + t.max_abs()));
        // orthonormality of U columns: U^T U = I over the fused left side
        BlockTensor utu = contract(r.u.conjugated(), r.u, {{0, 0}, {1, 1}});
        BlockTensor id = identity_on(utu.indices[1]);
        EXPECT_LT(testutil::max_abs_diff(utu.to_dense(), id.to_dense()), 1e-12);
        BlockTensor vvt = contract(r.vt, r.vt.conjugated(), {{1, 1}});
        BlockTensor idv = identity_on(vvt.indices[1]);
        EXPECT_LT(testutil::max_abs_diff(vvt.to_dense(), idv.to_dense()), 1e-12);
    }
}

TEST(SvdTest, DiscardedWeightMatchesFrobeniusLoss) {
    std::mt19937_64 rng(31);
    Index li = testutil::random_fermion_bond(rng, 4);
    Index ri = testutil::random_fermion_bond(rng, 4);
    BlockTensor t({0, 0}, {li.flipped(), ri});
    t.fill_random(rng);
    SvdResult r = svd_truncate(t, {0}, {1}, 3, 0.0);
    BlockTensor us = attach_singular_values(r.u, 1, r.singular_values);
    BlockTensor rec = contract(us, r.vt, {{1, 0}});
    BlockTensor diff = t;
    diff.axpy(-1.0, rec);
    EXPECT_NEAR(diff.norm2(), r.discarded_weight, 1e-12 * (1 + t.norm2()));
}

TEST(SvdTest, EmptySpectrumThrows) {
    Index li(Direction::In, {{{0, 0}, 2}});
    BlockTensor t({0, 0}, {li.flipped(), li});
    EXPECT_THROW(svd_truncate(t, {0}, {1}, 0, 0.0), EmptySpectrum);
}

TEST(QrTest, LeftAndRightOrthonormal) {
    std::mt19937_64 rng(41);
    Index li = testutil::random_fermion_bond(rng, 3);
    BlockTensor t({1, 1}, {li.flipped(), testutil::random_fermion_bond(rng, 2).flipped(),
                           testutil::random_fermion_bond(rng, 4)});
    t.fill_random(rng);
    auto [q, r] = qr_left(t, {0, 1}, {2});
    BlockTensor rec = contract(q, r, {{2, 0}});
    EXPECT_LT(testutil::max_abs_diff(rec.to_dense(), t.to_dense()), 1e-12 * (1 + t.max_abs()));
    BlockTensor qtq = contract(q.conjugated(), q, {{0, 0}, {1, 1}});
    EXPECT_LT(testutil::max_abs_diff(qtq.to_dense(), identity_on(qtq.indices[1]).to_dense()),
              1e-12);

    auto [l, q2] = qr_right(t, {0}, {1, 2});
    BlockTensor rec2 = contract(l, q2, {{1, 0}});
    BlockTensor perm = rec2; // already (0, 1, 2) order
    EXPECT_LT(testutil::max_abs_diff(perm.to_dense(), t.to_dense()), 1e-12 * (1 + t.max_abs()));
    BlockTensor qqt = contract(q2, q2.conjugated(), {{1, 1}, {2, 2}});
    EXPECT_LT(testutil::max_abs_diff(qqt.to_dense(), identity_on(qqt.indices[1]).to_dense()),
              1e-12);
}

TEST(EighTest, BlockedSymmetricEig) {
    std::mt19937_64 rng(43);
    Index li = testutil::random_fermion_bond(rng, 5);
    BlockTensor a({0, 0}, {li.flipped(), li});
    a.fill_random(rng);
    // symmetrize
    BlockTensor at = a.permuted({1, 0}).conjugated();
    a.axpy(1.0, at);
    BlockedEig e = eigh_blocked(a);
    for (std::size_t s = 0; s < e.charges.size(); ++s)
        for (std::size_t i = 0; i + 1 < e.values[s].size(); ++i)
            EXPECT_GE(e.values[s][i], e.values[s][i + 1]);
}
