#pragma once

#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "qnum.hpp"

namespace fragdmrg {

using Key = std::vector<int>; // one sector ordinal per index

// Dense permutation: dst has src's axes reordered so that dst axis a is
// src axis perm[a]. Row-major layout on both sides.
inline void dense_permute(const std::vector<double> &src, const std::vector<int> &dims,
                          const std::vector<int> &perm, std::vector<double> &dst) {
    const int rank = static_cast<int>(dims.size());
    std::size_t total = 1;
    for (int d : dims)
        total *= static_cast<std::size_t>(d);
    dst.assign(total, 0.0);
    if (total == 0)
        return;
    std::vector<std::size_t> src_strides(rank, 1);
    for (int a = rank - 2; a >= 0; --a)
        src_strides[a] = src_strides[a + 1] * dims[a + 1];
    std::vector<int> out_dims(rank);
    for (int a = 0; a < rank; ++a)
        out_dims[a] = dims[perm[a]];
    std::vector<int> idx(rank, 0);
    std::size_t src_off = 0; // running source offset of the permuted multi-index
    for (std::size_t o = 0; o < total; ++o) {
        dst[o] = src[src_off];
        for (int a = rank - 1; a >= 0; --a) {
            if (++idx[a] < out_dims[a]) {
                src_off += src_strides[perm[a]];
                break;
            }
            idx[a] = 0;
            src_off -= src_strides[perm[a]] * (out_dims[a] - 1);
        }
    }
}

// Block-sparse dense tensor labeled by conserved charges. A block keyed by a
// sector selection may exist only when the signed charge sum over its sectors
// equals the tensor flux. Values are row-major over the sector dimensions.
struct BlockTensor {
    QNum flux;
    std::vector<Index> indices;
    std::map<Key, std::vector<double>> blocks;

    BlockTensor() = default;
    BlockTensor(QNum f, std::vector<Index> idx) : flux(f), indices(std::move(idx)) {}

    int rank() const { return static_cast<int>(indices.size()); }

    QNum key_charge(const Key &key) const {
        QNum q;
        for (int a = 0; a < rank(); ++a)
            q += indices[a].signed_q(key[a]);
        return q;
    }

    bool key_allowed(const Key &key) const { return key_charge(key) == flux; }

    std::vector<int> block_dims(const Key &key) const {
        std::vector<int> d(rank());
        for (int a = 0; a < rank(); ++a)
            d[a] = indices[a].sectors[key[a]].dim;
        return d;
    }

    std::size_t block_size(const Key &key) const {
        std::size_t n = 1;
        for (int a = 0; a < rank(); ++a)
            n *= static_cast<std::size_t>(indices[a].sectors[key[a]].dim);
        return n;
    }

    std::vector<double> &block(const Key &key) {
        auto it = blocks.find(key);
        if (it != blocks.end())
            return it->second;
        if (!key_allowed(key))
            throw IncompatibleIndex("block key violates charge conservation");
        return blocks.emplace(key, std::vector<double>(block_size(key), 0.0)).first->second;
    }

    const std::vector<double> *find(const Key &key) const {
        auto it = blocks.find(key);
        return it == blocks.end() ? nullptr : &it->second;
    }

    // Enumerate every charge-allowed key.
    std::vector<Key> allowed_keys() const {
        std::vector<Key> out;
        Key key(rank(), 0);
        if (rank() == 0) {
            if ((flux == QNum{}))
                out.push_back(key);
            return out;
        }
        while (true) {
            if (key_allowed(key))
                out.push_back(key);
            int a = rank() - 1;
            while (a >= 0) {
                if (++key[a] < indices[a].n_sectors())
                    break;
                key[a] = 0;
                --a;
            }
            if (a < 0)
                break;
        }
        return out;
    }

    void fill_random(std::mt19937_64 &rng, double scale = 1.0) {
        std::normal_distribution<double> dist(0.0, scale);
        for (const Key &key : allowed_keys())
            for (double &x : block(key))
                x = dist(rng);
    }

    void prune_zero_blocks(double tol = 0.0) {
        for (auto it = blocks.begin(); it != blocks.end();) {
            double mx = 0.0;
            for (double x : it->second)
                mx = std::max(mx, std::fabs(x));
            if (mx <= tol)
                it = blocks.erase(it);
            else
                ++it;
        }
    }

    // ---- vector-space operations -------------------------------------

    double dot(const BlockTensor &o) const {
        double s = 0.0;
        for (const auto &[key, data] : blocks) {
            const auto *ob = o.find(key);
            if (!ob)
                continue;
            s += std::inner_product(data.begin(), data.end(), ob->begin(), 0.0);
        }
        return s;
    }

    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }

    double max_abs() const {
        double m = 0.0;
        for (const auto &[key, data] : blocks)
            for (double x : data)
                m = std::max(m, std::fabs(x));
        return m;
    }

    void scale(double a) {
        for (auto &[key, data] : blocks)
            for (double &x : data)
                x *= a;
    }

    void axpy(double a, const BlockTensor &x) {
        for (const auto &[key, data] : x.blocks) {
            auto &dst = block(key);
            for (std::size_t i = 0; i < data.size(); ++i)
                dst[i] += a * data[i];
        }
    }

    BlockTensor scaled(double a) const {
        BlockTensor r = *this;
        r.scale(a);
        return r;
    }

    // ---- structural operations ---------------------------------------

    BlockTensor permuted(const std::vector<int> &perm) const {
        BlockTensor r(flux, {});
        r.indices.reserve(rank());
        for (int a : perm)
            r.indices.push_back(indices[a]);
        std::vector<double> tmp;
        for (const auto &[key, data] : blocks) {
            Key nk(rank());
            for (int a = 0; a < rank(); ++a)
                nk[a] = key[perm[a]];
            dense_permute(data, block_dims(key), perm, tmp);
            r.blocks.emplace(std::move(nk), tmp);
        }
        return r;
    }

    // Conjugate view for real tensors: directions flip, flux negates.
    BlockTensor conjugated() const {
        BlockTensor r = *this;
        r.flux = -flux;
        for (auto &idx : r.indices)
            idx.dir = flip(idx.dir);
        return r;
    }

    // ---- dense embedding ----------------------------------------------

    std::vector<int> dense_dims() const {
        std::vector<int> d(rank());
        for (int a = 0; a < rank(); ++a)
            d[a] = indices[a].total_dim();
        return d;
    }

    std::vector<double> to_dense() const {
        const auto dims = dense_dims();
        std::size_t total = 1;
        for (int d : dims)
            total *= static_cast<std::size_t>(d);
        std::vector<double> out(total, 0.0);
        std::vector<std::size_t> strides(rank(), 1);
        for (int a = rank() - 2; a >= 0; --a)
            strides[a] = strides[a + 1] * dims[a + 1];
        for (const auto &[key, data] : blocks) {
            const auto bd = block_dims(key);
            std::size_t base = 0;
            for (int a = 0; a < rank(); ++a)
                base += strides[a] * indices[a].sector_offset(key[a]);
            std::vector<int> idx(rank(), 0);
            for (std::size_t i = 0; i < data.size(); ++i) {
                std::size_t off = base;
                for (int a = 0; a < rank(); ++a)
                    off += strides[a] * idx[a];
                out[off] = data[i];
                for (int a = rank() - 1; a >= 0; --a) {
                    if (++idx[a] < bd[a])
                        break;
                    idx[a] = 0;
                }
            }
        }
        return out;
    }

    static BlockTensor from_dense(QNum flux, std::vector<Index> idx,
                                  const std::vector<double> &dense) {
        BlockTensor r(flux, std::move(idx));
        const auto dims = r.dense_dims();
        std::vector<std::size_t> strides(r.rank(), 1);
        for (int a = r.rank() - 2; a >= 0; --a)
            strides[a] = strides[a + 1] * dims[a + 1];
        for (const Key &key : r.allowed_keys()) {
            const auto bd = r.block_dims(key);
            std::size_t base = 0;
            for (int a = 0; a < r.rank(); ++a)
                base += strides[a] * r.indices[a].sector_offset(key[a]);
            auto &data = r.block(key);
            std::vector<int> ii(r.rank(), 0);
            for (std::size_t i = 0; i < data.size(); ++i) {
                std::size_t off = base;
                for (int a = 0; a < r.rank(); ++a)
                    off += strides[a] * ii[a];
                data[i] = dense[off];
                for (int a = r.rank() - 1; a >= 0; --a) {
                    if (++ii[a] < bd[a])
                        break;
                    ii[a] = 0;
                }
            }
        }
        r.prune_zero_blocks();
        return r;
    }
};

} // namespace fragdmrg
