#include <gtest/gtest.h>

#include "fragdmrg/fci.hpp"
#include "test_utils.hpp"

using namespace fragdmrg;

namespace {

Integrals random_integrals(int k, std::mt19937_64 &rng, double vscale = 0.5) {
    std::normal_distribution<double> dist;
    Integrals ints(k);
    for (int p = 0; p < k; ++p)
        for (int q = 0; q <= p; ++q)
            ints.set_h(p, q, dist(rng));
    for (int p = 0; p < k; ++p)
        for (int q = 0; q <= p; ++q)
            for (int r = 0; r <= p; ++r)
                for (int s = 0; s <= (r == p ? q : r); ++s)
                    ints.set_v(p, q, r, s, vscale * dist(rng));
    ints.e_core = dist(rng);
    ints.n_elec = k;
    return ints;
}

} // namespace

TEST(DeterminantBasisTest, SizeAndOrder) {
    DeterminantBasis b(4, 2, 2);
    EXPECT_EQ(b.size(), 36u);
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
        EXPECT_LT(b.dets[i], b.dets[i + 1]);
    for (uint64_t d : b.dets) {
        int nu = 0, nd = 0;
        for (int p = 0; p < 4; ++p) {
            nu += (d >> (2 * p)) & 1;
            nd += (d >> (2 * p + 1)) & 1;
        }
        EXPECT_EQ(nu, 2);
        EXPECT_EQ(nd, 2);
    }
}

TEST(FciTest, HubbardDimerAnalytic) {
    Integrals ints = build_hubbard_uniform(2, 1.0, 4.0);
    FciResult res = fci_solve(ints, 1, 1, 1);
    const double expect = (4.0 - std::sqrt(16.0 + 16.0)) / 2.0; // (U - sqrt(U^2+16t^2))/2
    EXPECT_NEAR(res.energies[0], expect, 1e-10);
    EXPECT_NEAR(res.energies[0], 2.0 - 2.0 * std::sqrt(2.0), 1e-10);
}

TEST(FciTest, NonInteractingChainFillsLevels) {
    const int k = 6;
    Integrals ints = build_hubbard_uniform(k, 1.0, 0.0);
    FciResult res = fci_solve(ints, 3, 3, 1);
    Eigen::MatrixXd h(k, k);
    for (int p = 0; p < k; ++p)
        for (int q = 0; q < k; ++q)
            h(p, q) = ints.h_el(p, q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    double expect = 0.0;
    for (int i = 0; i < 3; ++i)
        expect += 2.0 * es.eigenvalues()(i);
    EXPECT_NEAR(res.energies[0], expect, 1e-10);
}

TEST(FciTest, RandomIntegralsMatchDenseDiagonalization) {
    std::mt19937_64 rng(99);
    Integrals ints = random_integrals(4, rng);
    DeterminantBasis basis(4, 2, 2);
    Eigen::MatrixXd hmat = fci_dense_hamiltonian(ints, basis);
    EXPECT_LT((hmat - hmat.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hmat);
    FciResult res = fci_solve(ints, 2, 2, 3);
    for (int r = 0; r < 3; ++r)
        EXPECT_NEAR(res.energies[r], es.eigenvalues()(r), 1e-10);
}

TEST(FciTest, EnergiesInvariantUnderOrbitalPermutation) {
    std::mt19937_64 rng(123);
    Integrals ints = random_integrals(4, rng);
    std::vector<int> order{2, 0, 3, 1};
    Integrals perm = ints.reordered(order);
    FciResult a = fci_solve(ints, 2, 2, 2);
    FciResult b = fci_solve(perm, 2, 2, 2);
    EXPECT_NEAR(a.energies[0], b.energies[0], 1e-10);
    EXPECT_NEAR(a.energies[1], b.energies[1], 1e-10);
}

TEST(FciTest, DavidsonPathMatchesDenseOnLargerSector) {
    Integrals ints = build_hubbard_uniform(6, 1.0, 4.0);
    FciResult res = fci_solve(ints, 3, 3, 2); // 400-dim sector, dense path
    DeterminantBasis basis(6, 3, 3);
    // force the sparse path through a hand-run Davidson
    fci::SparseHamiltonian ham(ints);
    auto apply = [&](const std::vector<double> &x) {
        std::vector<double> y(basis.size(), 0.0);
        ham.apply(basis, x, y);
        return y;
    };
    const std::vector<double> diag = ham.diagonal(basis);
    std::vector<double> guess(basis.size(), 0.0);
    guess[std::min_element(diag.begin(), diag.end()) - diag.begin()] = 1.0;
    auto dres = davidson(apply, {guess}, 1, {1e-11, 400, 20}, &diag);
    EXPECT_NEAR(dres.eigenvalues[0], res.energies[0], 1e-9);
}

TEST(FciTest, BasisTooLargeThrows) {
    EXPECT_THROW(DeterminantBasis(12, 6, 6), BasisTooLarge);
}
