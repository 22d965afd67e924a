#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>

#include "davidson.hpp"
#include "integrals.hpp"

namespace fragdmrg {

// Exact-diagonalization reference. Determinants are bit patterns over
// interleaved spin orbitals: bit 2p is (p, up), bit 2p+1 is (p, down) —
// the same Jordan–Wigner ordering the MPO uses, so signs agree by
// construction.
namespace fci {

inline int jw_pos(int orbital, int spin_dn) { return 2 * orbital + spin_dn; }

inline int parity_below(uint64_t det, int pos) {
    const uint64_t mask = (pos == 0) ? 0ull : ((1ull << pos) - 1ull);
    return std::popcount(det & mask) & 1;
}

// apply a single elementary operator; returns false when annihilating an
// empty slot or creating an occupied one
inline bool apply_elem(uint64_t &det, int pos, bool cre, int &sign) {
    const uint64_t bit = 1ull << pos;
    if (cre) {
        if (det & bit)
            return false;
        sign ^= parity_below(det, pos);
        det |= bit;
    } else {
        if (!(det & bit))
            return false;
        sign ^= parity_below(det, pos);
        det &= ~bit;
    }
    return true;
}

} // namespace fci

struct DeterminantBasis {
    int k = 0;
    int n_up = 0, n_dn = 0;
    std::vector<uint64_t> dets; // ascending

    DeterminantBasis() = default;
    DeterminantBasis(int k_, int n_up_, int n_dn_) : k(k_), n_up(n_up_), n_dn(n_dn_) {
        if (k > 10)
            throw BasisTooLarge("determinant basis limited to k <= 10");
        std::vector<uint64_t> ups = patterns(k, n_up), dns = patterns(k, n_dn);
        for (uint64_t u : ups)
            for (uint64_t d : dns)
                dets.push_back(spread(u) | (spread(d) << 1));
        std::sort(dets.begin(), dets.end());
        if (dets.size() > 4000000ull)
            throw BasisTooLarge("determinant basis exceeds 4e6");
    }

    std::size_t size() const { return dets.size(); }

    long find(uint64_t det) const {
        auto it = std::lower_bound(dets.begin(), dets.end(), det);
        if (it == dets.end() || *it != det)
            return -1;
        return it - dets.begin();
    }

    static std::vector<uint64_t> patterns(int k, int n) {
        std::vector<uint64_t> out;
        for (uint64_t b = 0; b < (1ull << k); ++b)
            if (std::popcount(b) == n)
                out.push_back(b);
        return out;
    }

    // spread orbital bits to even positions
    static uint64_t spread(uint64_t b) {
        uint64_t out = 0;
        for (int i = 0; b; ++i, b >>= 1)
            if (b & 1)
                out |= 1ull << (2 * i);
        return out;
    }
};

namespace fci {

// Operator-driven H application: loops over stored nonzero integrals and
// applies elementary strings with explicit parity signs.
struct SparseHamiltonian {
    struct OneBody {
        int p, q;
        double val;
    };
    struct TwoBody {
        int p, q, r, s;
        double val;
    };
    std::vector<OneBody> ones;
    std::vector<TwoBody> twos;
    double e_core = 0.0;
    int k = 0;

    explicit SparseHamiltonian(const Integrals &ints) : e_core(ints.e_core), k(ints.n_orb) {
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q)
                if (ints.h_el(p, q) != 0.0)
                    ones.push_back({p, q, ints.h_el(p, q)});
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q)
                for (int r = 0; r < k; ++r)
                    for (int s = 0; s < k; ++s)
                        if (ints.v_el(p, q, r, s) != 0.0)
                            twos.push_back({p, q, r, s, ints.v_el(p, q, r, s)});
    }

    // y += H x over the basis
    void apply(const DeterminantBasis &basis, const std::vector<double> &x,
               std::vector<double> &y) const {
        for (std::size_t col = 0; col < basis.size(); ++col) {
            const double amp = x[col];
            if (amp == 0.0)
                continue;
            const uint64_t d0 = basis.dets[col];
            y[col] += e_core * amp;
            for (const auto &ob : ones)
                for (int sp = 0; sp < 2; ++sp) {
                    uint64_t d = d0;
                    int sign = 0;
                    if (!apply_elem(d, jw_pos(ob.q, sp), false, sign))
                        continue;
                    if (!apply_elem(d, jw_pos(ob.p, sp), true, sign))
                        continue;
                    const long row = basis.find(d);
                    if (row >= 0)
                        y[row] += (sign ? -1.0 : 1.0) * ob.val * amp;
                }
            for (const auto &tb : twos)
                for (int sp = 0; sp < 2; ++sp)
                    for (int tau = 0; tau < 2; ++tau) {
                        uint64_t d = d0;
                        int sign = 0;
                        if (!apply_elem(d, jw_pos(tb.q, sp), false, sign))
                            continue;
                        if (!apply_elem(d, jw_pos(tb.s, tau), false, sign))
                            continue;
                        if (!apply_elem(d, jw_pos(tb.r, tau), true, sign))
                            continue;
                        if (!apply_elem(d, jw_pos(tb.p, sp), true, sign))
                            continue;
                        const long row = basis.find(d);
                        if (row >= 0)
                            y[row] += 0.5 * (sign ? -1.0 : 1.0) * tb.val * amp;
                    }
        }
    }

    std::vector<double> diagonal(const DeterminantBasis &basis) const {
        std::vector<double> diag(basis.size(), e_core);
        for (std::size_t col = 0; col < basis.size(); ++col) {
            const uint64_t d0 = basis.dets[col];
            for (const auto &ob : ones) {
                if (ob.p != ob.q)
                    continue;
                for (int sp = 0; sp < 2; ++sp)
                    if (d0 & (1ull << jw_pos(ob.p, sp)))
                        diag[col] += ob.val;
            }
            for (const auto &tb : twos)
                for (int sp = 0; sp < 2; ++sp)
                    for (int tau = 0; tau < 2; ++tau) {
                        uint64_t d = d0;
                        int sign = 0;
                        if (!apply_elem(d, jw_pos(tb.q, sp), false, sign))
                            continue;
                        if (!apply_elem(d, jw_pos(tb.s, tau), false, sign))
                            continue;
                        if (!apply_elem(d, jw_pos(tb.r, tau), true, sign))
                            continue;
                        if (!apply_elem(d, jw_pos(tb.p, sp), true, sign))
                            continue;
                        if (d == d0)
                            diag[col] += 0.5 * (sign ? -1.0 : 1.0) * tb.val;
                    }
        }
        return diag;
    }
};

} // namespace fci

struct FciResult {
    std::vector<double> energies;
    std::vector<std::vector<double>> vectors; // over the determinant basis
    DeterminantBasis basis;
};

inline FciResult fci_solve(const Integrals &ints, int n_up, int n_dn, int n_roots,
                           double tol = 1e-11) {
    FciResult res;
    res.basis = DeterminantBasis(ints.n_orb, n_up, n_dn);
    const std::size_t n = res.basis.size();
    fci::SparseHamiltonian ham(ints);
    if (n == 0)
        throw EmptyBasis("empty determinant sector");

    const std::vector<double> diag = ham.diagonal(res.basis);
    if (n <= 600) { // dense path for tiny sectors
        Eigen::MatrixXd hmat = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t c = 0; c < n; ++c) {
            std::vector<double> e(n, 0.0), y(n, 0.0);
            e[c] = 1.0;
            ham.apply(res.basis, e, y);
            for (std::size_t r = 0; r < n; ++r)
                hmat(r, c) = y[r];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hmat);
        for (int r = 0; r < n_roots && r < static_cast<int>(n); ++r) {
            res.energies.push_back(es.eigenvalues()(r));
            res.vectors.emplace_back(es.eigenvectors().col(r).data(),
                                     es.eigenvectors().col(r).data() + n);
        }
        return res;
    }

    auto apply = [&](const std::vector<double> &x) {
        std::vector<double> y(n, 0.0);
        ham.apply(res.basis, x, y);
        return y;
    };
    // seed with the lowest-diagonal determinants
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });
    std::vector<std::vector<double>> guesses;
    for (int g = 0; g < std::max(n_roots, 1); ++g) {
        std::vector<double> v(n, 0.0);
        v[order[g % n]] = 1.0;
        guesses.push_back(std::move(v));
    }
    DavidsonOptions opt;
    opt.tol = tol;
    opt.max_iter = 600;
    auto dres = davidson(apply, std::move(guesses), n_roots, opt, &diag);
    res.energies = dres.eigenvalues;
    res.vectors = std::move(dres.eigenvectors);
    return res;
}

// Dense sector Hamiltonian, for small oracle comparisons.
inline Eigen::MatrixXd fci_dense_hamiltonian(const Integrals &ints,
                                             const DeterminantBasis &basis) {
    fci::SparseHamiltonian ham(ints);
    const std::size_t n = basis.size();
    Eigen::MatrixXd hmat = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> e(n, 0.0), y(n, 0.0);
        e[c] = 1.0;
        ham.apply(basis, e, y);
        for (std::size_t r = 0; r < n; ++r)
            hmat(r, c) = y[r];
    }
    return hmat;
}

// Map between determinant bits and the 4^k product-state index used by the
// dense MPS embedding (site 0 most significant, local order vac/dn/up/updn).
inline int site_code_from_bits(int up, int dn) {
    if (!up && !dn)
        return 0;
    if (!up && dn)
        return 1;
    if (up && !dn)
        return 2;
    return 3;
}

inline std::size_t product_index(uint64_t det, int k) {
    std::size_t idx = 0;
    for (int p = 0; p < k; ++p) {
        const int up = (det >> fci::jw_pos(p, 0)) & 1;
        const int dn = (det >> fci::jw_pos(p, 1)) & 1;
        idx = idx * 4 + static_cast<std::size_t>(site_code_from_bits(up, dn));
    }
    return idx;
}

} // namespace fragdmrg
