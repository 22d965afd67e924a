#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "errors.hpp"

namespace fragdmrg {

// Conserved Abelian charge: (electron count, twice the z-spin projection).
struct QNum {
    int n = 0;
    int two_sz = 0;

    friend QNum operator+(QNum a, QNum b) { return {a.n + b.n, a.two_sz + b.two_sz}; }
    friend QNum operator-(QNum a, QNum b) { return {a.n - b.n, a.two_sz - b.two_sz}; }
    QNum operator-() const { return {-n, -two_sz}; }
    QNum &operator+=(QNum o) { n += o.n; two_sz += o.two_sz; return *this; }

    friend bool operator==(QNum a, QNum b) { return a.n == b.n && a.two_sz == b.two_sz; }
    friend bool operator!=(QNum a, QNum b) { return !(a == b); }
    friend bool operator<(QNum a, QNum b) {
        return a.n != b.n ? a.n < b.n : a.two_sz < b.two_sz;
    }

    friend std::ostream &operator<<(std::ostream &os, QNum q) {
        return os << "(" << q.n << "," << q.two_sz << ")";
    }
};

struct Sector {
    QNum q;
    int dim = 0;
    friend bool operator==(const Sector &a, const Sector &b) {
        return a.q == b.q && a.dim == b.dim;
    }
};

enum class Direction : uint8_t { In, Out };

inline Direction flip(Direction d) { return d == Direction::In ? Direction::Out : Direction::In; }

// A tensor leg: a direction plus an ordered list of charge sectors. The
// sector list is kept sorted by charge so layouts are reproducible.
struct Index {
    Direction dir = Direction::In;
    std::vector<Sector> sectors;

    Index() = default;
    Index(Direction d, std::vector<Sector> secs) : dir(d), sectors(std::move(secs)) {
        std::sort(sectors.begin(), sectors.end(),
                  [](const Sector &a, const Sector &b) { return a.q < b.q; });
        for (std::size_t i = 0; i + 1 < sectors.size(); ++i)
            if (sectors[i].q == sectors[i + 1].q)
                throw IncompatibleIndex("duplicate sector charge in index");
        for (const auto &s : sectors)
            if (s.dim < 1)
                throw IncompatibleIndex("sector dimension must be >= 1");
    }

    int n_sectors() const { return static_cast<int>(sectors.size()); }

    int total_dim() const {
        int d = 0;
        for (const auto &s : sectors)
            d += s.dim;
        return d;
    }

    int sector_offset(int s) const {
        int off = 0;
        for (int i = 0; i < s; ++i)
            off += sectors[i].dim;
        return off;
    }

    int find_sector(QNum q) const {
        for (std::size_t i = 0; i < sectors.size(); ++i)
            if (sectors[i].q == q)
                return static_cast<int>(i);
        return -1;
    }

    // Signed charge contribution of sector s: outgoing counts +q, incoming -q.
    QNum signed_q(int s) const {
        const QNum q = sectors[s].q;
        return dir == Direction::Out ? q : -q;
    }

    Index flipped() const {
        Index r = *this;
        r.dir = flip(dir);
        return r;
    }

    bool same_sectors(const Index &o) const { return sectors == o.sectors; }

    friend bool operator==(const Index &a, const Index &b) {
        return a.dir == b.dir && a.sectors == b.sectors;
    }
};

// Scalar index: one sector of charge q with dimension 1.
inline Index unit_index(Direction dir, QNum q = {}) { return Index(dir, {{q, 1}}); }

} // namespace fragdmrg
