#pragma once

#include <Eigen/Dense>
#include <optional>
#include <tuple>

#include "block_tensor.hpp"

namespace fragdmrg {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<RowMat>;
using CMapRM = Eigen::Map<const RowMat>;

// ---------------------------------------------------------------------------
// contract
// ---------------------------------------------------------------------------

// Pairwise tensor contraction. Paired indices must carry identical sector
// lists and opposite directions; the result keeps a's free indices followed
// by b's, and flux adds.
inline BlockTensor contract(const BlockTensor &a, const BlockTensor &b,
                            const std::vector<std::pair<int, int>> &pairs) {
    for (auto [ia, ib] : pairs) {
        if (ia < 0 || ia >= a.rank() || ib < 0 || ib >= b.rank())
            throw RankError("contraction pair refers to missing index");
        if (!a.indices[ia].same_sectors(b.indices[ib]))
            throw IncompatibleIndex("paired indices have different sector lists");
        if (a.indices[ia].dir == b.indices[ib].dir)
            throw IncompatibleIndex("paired indices have equal directions");
    }
    std::vector<int> a_con(a.rank(), -1), b_con(b.rank(), -1);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (a_con[pairs[p].first] >= 0 || b_con[pairs[p].second] >= 0)
            throw RankError("index paired twice");
        a_con[pairs[p].first] = static_cast<int>(p);
        b_con[pairs[p].second] = static_cast<int>(p);
    }
    std::vector<int> a_free, b_free;
    for (int i = 0; i < a.rank(); ++i)
        if (a_con[i] < 0)
            a_free.push_back(i);
    for (int i = 0; i < b.rank(); ++i)
        if (b_con[i] < 0)
            b_free.push_back(i);

    std::vector<Index> out_idx;
    for (int i : a_free)
        out_idx.push_back(a.indices[i]);
    for (int i : b_free)
        out_idx.push_back(b.indices[i]);
    BlockTensor out(a.flux + b.flux, std::move(out_idx));

    // permutations moving contracted axes last (a) / first (b), in pair order
    std::vector<int> aperm = a_free, bperm;
    for (const auto &pr : pairs)
        aperm.push_back(pr.first);
    for (const auto &pr : pairs)
        bperm.push_back(pr.second);
    for (int i : b_free)
        bperm.push_back(i);

    // group b blocks by contracted signature
    std::map<Key, std::vector<const Key *>> b_by_sig;
    for (const auto &[key, data] : b.blocks) {
        Key sig(pairs.size());
        for (std::size_t p = 0; p < pairs.size(); ++p)
            sig[p] = key[pairs[p].second];
        b_by_sig[sig].push_back(&key);
    }

    std::vector<double> abuf, bbuf;
    for (const auto &[akey, adata] : a.blocks) {
        Key sig(pairs.size());
        for (std::size_t p = 0; p < pairs.size(); ++p)
            sig[p] = akey[pairs[p].first];
        auto it = b_by_sig.find(sig);
        if (it == b_by_sig.end())
            continue;
        const auto adims = a.block_dims(akey);
        dense_permute(adata, adims, aperm, abuf);
        long rows_a = 1, inner = 1;
        for (std::size_t i = 0; i < a_free.size(); ++i)
            rows_a *= adims[a_free[i]];
        for (const auto &pr : pairs)
            inner *= adims[pr.first];
        CMapRM A(abuf.data(), rows_a, inner);
        for (const Key *bkeyp : it->second) {
            const Key &bkey = *bkeyp;
            const auto bdims = b.block_dims(bkey);
            dense_permute(b.blocks.at(bkey), bdims, bperm, bbuf);
            long cols_b = 1;
            for (std::size_t i = 0; i < b_free.size(); ++i)
                cols_b *= bdims[b_free[i]];
            CMapRM B(bbuf.data(), inner, cols_b);
            Key okey;
            okey.reserve(a_free.size() + b_free.size());
            for (int i : a_free)
                okey.push_back(akey[i]);
            for (int i : b_free)
                okey.push_back(bkey[i]);
            MapRM C(out.block(okey).data(), rows_a, cols_b);
            C.noalias() += A * B;
        }
    }
    out.prune_zero_blocks();
    return out;
}

// ---------------------------------------------------------------------------
// matricization over a bipartition of indices
// ---------------------------------------------------------------------------

struct FusedSide {
    // one entry per distinct fused charge
    std::vector<QNum> charges;
    // per charge: list of (sector combo, offset, extent)
    std::vector<std::vector<std::tuple<Key, int, int>>> combos;
    std::vector<int> dims; // total fused dimension per charge

    int find(QNum q) const {
        for (std::size_t i = 0; i < charges.size(); ++i)
            if (charges[i] == q)
                return static_cast<int>(i);
        return -1;
    }
};

// Enumerate sector combinations of the chosen axes, grouped by signed fused
// charge. Combos are ordered lexicographically so layouts are reproducible.
inline FusedSide fuse_side(const BlockTensor &t, const std::vector<int> &axes) {
    std::map<QNum, std::vector<std::pair<Key, int>>> grouped;
    Key combo(axes.size(), 0);
    if (axes.empty()) {
        grouped[QNum{}].push_back({combo, 1});
    } else {
        while (true) {
            QNum q;
            int extent = 1;
            for (std::size_t i = 0; i < axes.size(); ++i) {
                q += t.indices[axes[i]].signed_q(combo[i]);
                extent *= t.indices[axes[i]].sectors[combo[i]].dim;
            }
            grouped[q].push_back({combo, extent});
            int a = static_cast<int>(axes.size()) - 1;
            while (a >= 0) {
                if (++combo[a] < t.indices[axes[a]].n_sectors())
                    break;
                combo[a] = 0;
                --a;
            }
            if (a < 0)
                break;
        }
    }
    FusedSide f;
    for (auto &[q, list] : grouped) {
        f.charges.push_back(q);
        std::vector<std::tuple<Key, int, int>> cl;
        int off = 0;
        for (auto &[combo2, extent] : list) {
            cl.emplace_back(combo2, off, extent);
            off += extent;
        }
        f.combos.push_back(std::move(cl));
        f.dims.push_back(off);
    }
    return f;
}

struct Matricized {
    FusedSide left, right;
    std::vector<int> left_axes, right_axes;
    // matrices[i] pairs left charge block i with the right charge of flux - qL
    std::vector<std::optional<RowMat>> mats;
    std::vector<int> right_of_left; // right charge ordinal per left ordinal, -1 if absent
};

inline Matricized matricize(const BlockTensor &t, const std::vector<int> &left_axes,
                            const std::vector<int> &right_axes) {
    if (left_axes.empty() || right_axes.empty())
        throw RankError("bipartition sides must be nonempty");
    if (left_axes.size() + right_axes.size() != static_cast<std::size_t>(t.rank()))
        throw RankError("bipartition must cover all indices");
    Matricized m;
    m.left = fuse_side(t, left_axes);
    m.right = fuse_side(t, right_axes);
    m.left_axes = left_axes;
    m.right_axes = right_axes;
    m.mats.resize(m.left.charges.size());
    m.right_of_left.assign(m.left.charges.size(), -1);
    for (std::size_t li = 0; li < m.left.charges.size(); ++li)
        m.right_of_left[li] = m.right.find(t.flux - m.left.charges[li]);

    std::vector<int> perm = left_axes;
    perm.insert(perm.end(), right_axes.begin(), right_axes.end());
    std::vector<double> buf;
    for (const auto &[key, data] : t.blocks) {
        Key lc(left_axes.size()), rc(right_axes.size());
        for (std::size_t i = 0; i < left_axes.size(); ++i)
            lc[i] = key[left_axes[i]];
        for (std::size_t i = 0; i < right_axes.size(); ++i)
            rc[i] = key[right_axes[i]];
        QNum ql;
        for (std::size_t i = 0; i < left_axes.size(); ++i)
            ql += t.indices[left_axes[i]].signed_q(lc[i]);
        const int li = m.left.find(ql);
        const int ri = m.right_of_left[li];
        if (ri < 0)
            throw IncompatibleIndex("internal: block with no right charge partner");
        if (!m.mats[li])
            m.mats[li] = RowMat::Zero(m.left.dims[li], m.right.dims[ri]);
        int loff = -1, lext = 0, roff = -1, rext = 0;
        for (const auto &[combo, off, extent] : m.left.combos[li])
            if (combo == lc) {
                loff = off;
                lext = extent;
                break;
            }
        for (const auto &[combo, off, extent] : m.right.combos[ri])
            if (combo == rc) {
                roff = off;
                rext = extent;
                break;
            }
        dense_permute(data, t.block_dims(key), perm, buf);
        m.mats[li]->block(loff, roff, lext, rext) = CMapRM(buf.data(), lext, rext);
    }
    return m;
}

// Scatter a fused matrix element range back into block-tensor form. `bond_dims`
// gives, per left charge ordinal, the retained bond dimension (0 = absent).
// Returns (U-like tensor, bond index) where columns of each U block span the
// kept space. Used by SVD/QR factorizations below.
// Bond sectors are labeled with the negated signed fused charge, so a
// left-canonical MPS bond shows the accumulated physical charge.
inline QNum bond_label(QNum fused_left_charge) { return -fused_left_charge; }

inline BlockTensor unfuse_left(const BlockTensor &t, const Matricized &m,
                               const std::vector<RowMat> &per_charge, // dims[li] x kept[li]
                               const std::vector<int> &kept, Direction bond_dir,
                               QNum out_flux, Index *bond_out) {
    std::vector<Sector> bond_secs;
    for (std::size_t li = 0; li < m.left.charges.size(); ++li)
        if (kept[li] > 0)
            bond_secs.push_back({bond_label(m.left.charges[li]), kept[li]});
    Index bond(bond_dir, bond_secs);
    std::vector<Index> idx;
    for (int a : m.left_axes)
        idx.push_back(t.indices[a]);
    idx.push_back(bond);
    BlockTensor u(out_flux, idx);
    for (std::size_t li = 0; li < m.left.charges.size(); ++li) {
        if (kept[li] <= 0)
            continue;
        const int bond_sec = bond.find_sector(bond_label(m.left.charges[li]));
        for (const auto &[combo, off, extent] : m.left.combos[li]) {
            RowMat sub = per_charge[li].block(off, 0, extent, kept[li]);
            if (sub.cwiseAbs().maxCoeff() == 0.0)
                continue;
            Key key = combo;
            key.push_back(bond_sec);
            // reshape: rows enumerate the left combo in row-major order already
            auto &dst = u.block(key);
            std::memcpy(dst.data(), sub.data(), sub.size() * sizeof(double));
        }
    }
    if (bond_out)
        *bond_out = bond;
    return u;
}

inline BlockTensor unfuse_right(const BlockTensor &t, const Matricized &m,
                                const std::vector<RowMat> &per_charge, // kept[li] x dims[ri]
                                const std::vector<int> &kept, Direction bond_dir,
                                QNum out_flux) {
    std::vector<Sector> bond_secs;
    for (std::size_t li = 0; li < m.left.charges.size(); ++li)
        if (kept[li] > 0)
            bond_secs.push_back({bond_label(m.left.charges[li]), kept[li]});
    Index bond(bond_dir, bond_secs);
    std::vector<Index> idx;
    idx.push_back(bond);
    for (int a : m.right_axes)
        idx.push_back(t.indices[a]);
    BlockTensor vt(out_flux, idx);
    for (std::size_t li = 0; li < m.left.charges.size(); ++li) {
        if (kept[li] <= 0)
            continue;
        const int ri = m.right_of_left[li];
        const int bond_sec = bond.find_sector(bond_label(m.left.charges[li]));
        for (const auto &[combo, off, extent] : m.right.combos[ri]) {
            RowMat sub = per_charge[li].block(0, off, kept[li], extent);
            if (sub.cwiseAbs().maxCoeff() == 0.0)
                continue;
            Key key;
            key.push_back(bond_sec);
            key.insert(key.end(), combo.begin(), combo.end());
            auto &dst = vt.block(key);
            std::memcpy(dst.data(), sub.data(), sub.size() * sizeof(double));
        }
    }
    return vt;
}

// ---------------------------------------------------------------------------
// truncated SVD
// ---------------------------------------------------------------------------

struct SvdResult {
    BlockTensor u;
    std::vector<std::pair<QNum, std::vector<double>>> singular_values;
    BlockTensor vt;
    double discarded_weight = 0.0;

    int kept_total() const {
        int n = 0;
        for (const auto &[q, s] : singular_values)
            n += static_cast<int>(s.size());
        return n;
    }
};

namespace detail {

// Shared DBSS selection: values sorted descending globally, ties keep the
// lower-sorted charge first. Drops the largest tail with total weight
// <= weight_threshold, then caps at max_states.
inline std::vector<int>
select_kept(const std::vector<QNum> &charges,
            const std::vector<std::vector<double>> &values, long max_states,
            double weight_threshold, double *discarded) {
    struct Item {
        double v;
        int charge_ord;
        int pos;
    };
    std::vector<Item> items;
    for (std::size_t c = 0; c < values.size(); ++c)
        for (std::size_t p = 0; p < values[c].size(); ++p)
            items.push_back({values[c][p], static_cast<int>(c), static_cast<int>(p)});
    std::sort(items.begin(), items.end(), [&](const Item &a, const Item &b) {
        if (a.v != b.v)
            return a.v > b.v;
        if (!(charges[a.charge_ord] == charges[b.charge_ord]))
            return charges[a.charge_ord] < charges[b.charge_ord];
        return a.pos < b.pos;
    });
    long keep = static_cast<long>(items.size());
    double w = 0.0;
    // drop smallest values while the discarded weight stays within threshold
    while (keep > 0) {
        const double add = items[keep - 1].v * items[keep - 1].v;
        if (w + add <= weight_threshold) {
            w += add;
            --keep;
        } else
            break;
    }
    while (keep > max_states) {
        --keep;
        w += items[keep].v * items[keep].v;
    }
    *discarded = w;
    std::vector<int> kept(values.size(), 0);
    for (long i = 0; i < keep; ++i)
        kept[items[i].charge_ord]++;
    return kept;
}

} // namespace detail

// Truncated SVD across an index bipartition. Keeps the smallest number of
// singular values with discarded weight <= weight_threshold, capped at
// max_states; selection is a global descending sweep across charge sectors.
inline SvdResult svd_truncate(const BlockTensor &t, const std::vector<int> &left_axes,
                              const std::vector<int> &right_axes, long max_states,
                              double weight_threshold) {
    Matricized m = matricize(t, left_axes, right_axes);
    const std::size_t nq = m.left.charges.size();
    std::vector<Eigen::JacobiSVD<Eigen::MatrixXd>> svds(nq);
    std::vector<std::vector<double>> values(nq);
    for (std::size_t li = 0; li < nq; ++li) {
        if (!m.mats[li])
            continue;
        Eigen::MatrixXd a = *m.mats[li];
        svds[li].compute(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto &sv = svds[li].singularValues();
        values[li].assign(sv.data(), sv.data() + sv.size());
    }
    std::vector<QNum> labels(nq);
    for (std::size_t li = 0; li < nq; ++li)
        labels[li] = bond_label(m.left.charges[li]);
    double discarded = 0.0;
    std::vector<int> kept =
        detail::select_kept(labels, values, max_states, weight_threshold, &discarded);
    SvdResult res;
    res.discarded_weight = discarded;
    int total_kept = 0;
    for (int k : kept)
        total_kept += k;
    if (total_kept == 0)
        throw EmptySpectrum("no singular values kept");

    std::vector<RowMat> umats(nq), vmats(nq);
    for (std::size_t li = 0; li < nq; ++li) {
        if (kept[li] <= 0)
            continue;
        umats[li] = svds[li].matrixU().leftCols(kept[li]);
        vmats[li] = svds[li].matrixV().leftCols(kept[li]).transpose();
        std::vector<double> s(values[li].begin(), values[li].begin() + kept[li]);
        res.singular_values.push_back({bond_label(m.left.charges[li]), std::move(s)});
    }
    res.u = unfuse_left(t, m, umats, kept, Direction::Out, QNum{}, nullptr);
    res.vt = unfuse_right(t, m, vmats, kept, Direction::In, t.flux);
    return res;
}

// Multiply singular values into a bond-adjacent tensor axis (0 = that
// tensor's axis matching the bond sector layout).
inline BlockTensor attach_singular_values(const BlockTensor &t, int axis,
                                          const std::vector<std::pair<QNum, std::vector<double>>> &sv,
                                          bool invert = false) {
    BlockTensor r = t;
    for (auto &[key, data] : r.blocks) {
        const QNum q = r.indices[axis].sectors[key[axis]].q;
        const std::vector<double> *vals = nullptr;
        for (const auto &[sq, v] : sv)
            if (sq == q) {
                vals = &v;
                break;
            }
        if (!vals)
            throw IncompatibleIndex("missing singular-value sector");
        const auto dims = r.block_dims(key);
        std::size_t outer = 1, inner = 1;
        for (int a = 0; a < axis; ++a)
            outer *= dims[a];
        for (int a = axis + 1; a < r.rank(); ++a)
            inner *= dims[a];
        for (std::size_t o = 0; o < outer; ++o)
            for (int d = 0; d < dims[axis]; ++d) {
                const double f = invert ? 1.0 / (*vals)[d] : (*vals)[d];
                double *p = data.data() + (o * dims[axis] + d) * inner;
                for (std::size_t i = 0; i < inner; ++i)
                    p[i] *= f;
            }
    }
    return r;
}

// ---------------------------------------------------------------------------
// QR factorizations (thin, deterministic sign gauge)
// ---------------------------------------------------------------------------

// t = Q * R with Q column-orthonormal over the fused left side.
inline std::pair<BlockTensor, BlockTensor> qr_left(const BlockTensor &t,
                                                   const std::vector<int> &left_axes,
                                                   const std::vector<int> &right_axes) {
    Matricized m = matricize(t, left_axes, right_axes);
    const std::size_t nq = m.left.charges.size();
    std::vector<RowMat> qs(nq), rs(nq);
    std::vector<int> kept(nq, 0);
    for (std::size_t li = 0; li < nq; ++li) {
        if (!m.mats[li])
            continue;
        Eigen::MatrixXd a = *m.mats[li];
        const long k = std::min(a.rows(), a.cols());
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), k);
        Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        for (long c = 0; c < k; ++c)
            if (r(c, c) < 0) {
                q.col(c) *= -1.0;
                r.row(c) *= -1.0;
            }
        qs[li] = q;
        rs[li] = r;
        kept[li] = static_cast<int>(k);
    }
    BlockTensor q = unfuse_left(t, m, qs, kept, Direction::Out, QNum{}, nullptr);
    BlockTensor r = unfuse_right(t, m, rs, kept, Direction::In, t.flux);
    return {q, r};
}

// t = L * Q with Q row-orthonormal over the fused right side.
inline std::pair<BlockTensor, BlockTensor> qr_right(const BlockTensor &t,
                                                    const std::vector<int> &left_axes,
                                                    const std::vector<int> &right_axes) {
    Matricized m = matricize(t, left_axes, right_axes);
    const std::size_t nq = m.left.charges.size();
    std::vector<RowMat> ls(nq), qs(nq);
    std::vector<int> kept(nq, 0);
    for (std::size_t li = 0; li < nq; ++li) {
        if (!m.mats[li])
            continue;
        Eigen::MatrixXd at = m.mats[li]->transpose();
        const long k = std::min(at.rows(), at.cols());
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(at);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(at.rows(), k);
        Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        for (long c = 0; c < k; ++c)
            if (r(c, c) < 0) {
                q.col(c) *= -1.0;
                r.row(c) *= -1.0;
            }
        ls[li] = r.transpose(); // dims[li] is on rows side for unfuse_left
        qs[li] = q.transpose();
        kept[li] = static_cast<int>(k);
    }
    BlockTensor l = unfuse_left(t, m, ls, kept, Direction::Out, QNum{}, nullptr);
    BlockTensor q = unfuse_right(t, m, qs, kept, Direction::In, t.flux);
    return {l, q};
}

// ---------------------------------------------------------------------------
// blocked symmetric eigendecomposition (descending eigenvalues)
// ---------------------------------------------------------------------------

// Diagonalize a flux-zero rank-2 tensor whose two indices carry identical
// sector lists. Returns per-sector descending eigenvalues and the orthogonal
// eigenvector tensor (rows: original index, cols: eigenbasis bond).
struct BlockedEig {
    std::vector<QNum> charges;
    std::vector<std::vector<double>> values; // descending per sector
    std::vector<RowMat> vectors;             // dim x dim per sector
};

inline BlockedEig eigh_blocked(const BlockTensor &rho) {
    if (rho.rank() != 2 || !(rho.flux == QNum{}))
        throw RankError("eigh_blocked expects a flux-zero rank-2 tensor");
    if (!rho.indices[0].same_sectors(rho.indices[1]))
        throw IncompatibleIndex("eigh_blocked expects matching sector lists");
    BlockedEig e;
    for (int s = 0; s < rho.indices[0].n_sectors(); ++s) {
        const int d = rho.indices[0].sectors[s].dim;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
        if (const auto *blk = rho.find({s, s}))
            a = CMapRM(blk->data(), d, d);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        std::vector<double> vals(d);
        RowMat vecs(d, d);
        for (int i = 0; i < d; ++i) {
            vals[i] = es.eigenvalues()(d - 1 - i);
            vecs.col(i) = es.eigenvectors().col(d - 1 - i);
        }
        // deterministic gauge: largest-magnitude component positive
        for (int c = 0; c < d; ++c) {
            int arg = 0;
            for (int rix = 1; rix < d; ++rix)
                if (std::fabs(vecs(rix, c)) > std::fabs(vecs(arg, c)))
                    arg = rix;
            if (vecs(arg, c) < 0)
                vecs.col(c) *= -1.0;
        }
        e.charges.push_back(rho.indices[0].sectors[s].q);
        e.values.push_back(std::move(vals));
        e.vectors.push_back(std::move(vecs));
    }
    return e;
}

} // namespace fragdmrg
