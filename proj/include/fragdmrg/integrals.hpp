#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fragdmrg {

// One- and two-electron integrals over an orthonormal orbital basis, chemist
// convention (pq|rs), Hartree units.
struct Integrals {
    int n_orb = 0;
    std::vector<double> h; // k*k
    std::vector<double> v; // k^4, 8-fold permutational symmetry
    double e_core = 0.0;
    int n_elec = 0;
    int two_sz_target = 0;

    Integrals() = default;
    explicit Integrals(int k)
        : n_orb(k), h(static_cast<std::size_t>(k) * k, 0.0),
          v(static_cast<std::size_t>(k) * k * k * k, 0.0) {}

    double h_el(int p, int q) const { return h[static_cast<std::size_t>(p) * n_orb + q]; }
    double &h_el(int p, int q) { return h[static_cast<std::size_t>(p) * n_orb + q]; }

    std::size_t vidx(int p, int q, int r, int s) const {
        return ((static_cast<std::size_t>(p) * n_orb + q) * n_orb + r) * n_orb + s;
    }
    double v_el(int p, int q, int r, int s) const { return v[vidx(p, q, r, s)]; }

    void set_h(int p, int q, double val) {
        h_el(p, q) = val;
        h_el(q, p) = val;
    }

    // store (pq|rs) into all 8 equivalent slots
    void set_v(int p, int q, int r, int s, double val) {
        v[vidx(p, q, r, s)] = val;
        v[vidx(q, p, r, s)] = val;
        v[vidx(p, q, s, r)] = val;
        v[vidx(q, p, s, r)] = val;
        v[vidx(r, s, p, q)] = val;
        v[vidx(s, r, p, q)] = val;
        v[vidx(r, s, q, p)] = val;
        v[vidx(s, r, q, p)] = val;
    }

    void validate() const {
        for (int p = 0; p < n_orb; ++p)
            for (int q = 0; q < p; ++q)
                if (std::fabs(h_el(p, q) - h_el(q, p)) > 1e-12)
                    throw Error("one-electron integrals not symmetric");
        if (n_elec < 0 || n_elec > 2 * n_orb)
            throw Error("electron count out of range");
        if (std::abs(two_sz_target) > n_elec || ((two_sz_target ^ n_elec) & 1))
            throw Error("spin projection inconsistent with electron count");
    }

    // integrals with orbitals relabeled so that new index i refers to old
    // orbital order[i]
    Integrals reordered(const std::vector<int> &order) const {
        Integrals out(n_orb);
        out.e_core = e_core;
        out.n_elec = n_elec;
        out.two_sz_target = two_sz_target;
        for (int p = 0; p < n_orb; ++p)
            for (int q = 0; q < n_orb; ++q)
                out.h_el(p, q) = h_el(order[p], order[q]);
        for (int p = 0; p < n_orb; ++p)
            for (int q = 0; q < n_orb; ++q)
                for (int r = 0; r < n_orb; ++r)
                    for (int s = 0; s < n_orb; ++s)
                        out.v[out.vidx(p, q, r, s)] =
                            v_el(order[p], order[q], order[r], order[s]);
        return out;
    }
};

// Open Hubbard chain with per-bond hoppings and uniform on-site repulsion,
// half filling, Sz = 0.
inline Integrals build_hubbard(int n_sites, const std::vector<double> &t_pattern, double u) {
    if (static_cast<int>(t_pattern.size()) != n_sites - 1)
        throw Error("t_pattern needs n_sites - 1 entries");
    Integrals ints(n_sites);
    for (int i = 0; i + 1 < n_sites; ++i)
        ints.set_h(i, i + 1, -t_pattern[i]);
    for (int i = 0; i < n_sites; ++i)
        ints.set_v(i, i, i, i, u);
    ints.n_elec = n_sites;
    ints.two_sz_target = 0;
    return ints;
}

inline Integrals build_hubbard_uniform(int n_sites, double t, double u) {
    return build_hubbard(n_sites, std::vector<double>(n_sites - 1, t), u);
}

// ---------------------------------------------------------------------------
// FCIDUMP (Molpro convention, 1-based indices, chemist (ij|kl))
// ---------------------------------------------------------------------------

inline Integrals parse_fcidump(std::istream &is) {
    std::string header;
    {
        std::string line;
        bool in_header = true, started = false;
        while (in_header && std::getline(is, line)) {
            if (!started) {
                auto pos = line.find("&FCI");
                if (pos == std::string::npos)
                    throw MalformedHeader("missing &FCI namelist");
                started = true;
                line = line.substr(pos + 4);
            }
            auto end = line.find("&END");
            std::size_t slash = std::string::npos;
            // a namelist-terminating '/' must stand alone of tokens
            for (std::size_t i = 0; i < line.size(); ++i)
                if (line[i] == '/') {
                    slash = i;
                    break;
                }
            if (end != std::string::npos) {
                header += line.substr(0, end);
                in_header = false;
            } else if (slash != std::string::npos) {
                header += line.substr(0, slash);
                in_header = false;
            } else {
                header += line + " ";
            }
        }
        if (in_header)
            throw MalformedHeader("namelist not terminated by &END or /");
    }
    auto find_int = [&](const std::string &key, bool required, int fallback) {
        auto pos = header.find(key);
        if (pos == std::string::npos) {
            if (required)
                throw MalformedHeader("missing " + key);
            return fallback;
        }
        pos = header.find('=', pos);
        if (pos == std::string::npos)
            throw MalformedHeader("missing value for " + key);
        return std::atoi(header.c_str() + pos + 1);
    };
    const int norb = find_int("NORB", true, 0);
    const int nelec = find_int("NELEC", true, 0);
    const int ms2 = find_int("MS2", false, 0);
    if (norb <= 0)
        throw MalformedHeader("NORB must be positive");
    // ORBSYM/ISYM are read but carry no meaning here

    Integrals ints(norb);
    ints.n_elec = nelec;
    ints.two_sz_target = ms2;

    std::map<std::array<int, 4>, double> seen_v;
    std::map<std::array<int, 2>, double> seen_h;
    bool seen_core = false;
    double core_val = 0.0;

    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        double val;
        int i, j, k, l;
        if (!(ls >> val >> i >> j >> k >> l))
            continue; // blank or comment-ish line
        if (i < 0 || j < 0 || k < 0 || l < 0 || i > norb || j > norb || k > norb || l > norb)
            throw IndexOutOfRange("orbital label outside 1..NORB");
        if (i == 0 && j == 0 && k == 0 && l == 0) {
            if (seen_core && std::fabs(core_val - val) > 1e-10)
                throw DuplicateConflict("conflicting core energies");
            seen_core = true;
            core_val = val;
            ints.e_core = val;
        } else if (k == 0 && l == 0) {
            if (i == 0 || j == 0)
                throw IndexOutOfRange("bad one-electron label");
            std::array<int, 2> key{std::min(i, j), std::max(i, j)};
            auto it = seen_h.find(key);
            if (it != seen_h.end() && std::fabs(it->second - val) > 1e-10)
                throw DuplicateConflict("conflicting h values");
            seen_h[key] = val;
            ints.set_h(i - 1, j - 1, val);
        } else {
            if (i == 0 || j == 0 || k == 0 || l == 0)
                throw IndexOutOfRange("bad two-electron label");
            std::array<int, 4> cands[8] = {
                {i, j, k, l}, {j, i, k, l}, {i, j, l, k}, {j, i, l, k},
                {k, l, i, j}, {l, k, i, j}, {k, l, j, i}, {l, k, j, i}};
            std::array<int, 4> key = cands[0];
            for (const auto &c : cands)
                if (c < key)
                    key = c;
            auto it = seen_v.find(key);
            if (it != seen_v.end() && std::fabs(it->second - val) > 1e-10)
                throw DuplicateConflict("conflicting v values");
            seen_v[key] = val;
            ints.set_v(i - 1, j - 1, k - 1, l - 1, val);
        }
    }
    return ints;
}

inline Integrals parse_fcidump_file(const std::string &path) {
    std::ifstream ifs(path);
    if (!ifs.good())
        throw Error("cannot open FCIDUMP '" + path + "'");
    return parse_fcidump(ifs);
}

inline void write_fcidump(std::ostream &os, const Integrals &ints) {
    const int k = ints.n_orb;
    os << "&FCI NORB=" << k << ",NELEC=" << ints.n_elec << ",MS2=" << ints.two_sz_target
       << ",\n  ORBSYM=";
    for (int i = 0; i < k; ++i)
        os << "1,";
    os << "\n  ISYM=1,\n&END\n";
    char buf[64];
    auto emit = [&](double val, int i, int j, int kk, int ll) {
        std::snprintf(buf, sizeof buf, "%24.16e %4d %4d %4d %4d\n", val, i, j, kk, ll);
        os << buf;
    };
    for (int p = 0; p < k; ++p)
        for (int q = 0; q <= p; ++q)
            for (int r = 0; r <= p; ++r)
                for (int s = 0; s <= (r == p ? q : r); ++s) {
                    const double val = ints.v_el(p, q, r, s);
                    if (val != 0.0)
                        emit(val, p + 1, q + 1, r + 1, s + 1);
                }
    for (int p = 0; p < k; ++p)
        for (int q = 0; q <= p; ++q)
            if (ints.h_el(p, q) != 0.0)
                emit(ints.h_el(p, q), p + 1, q + 1, 0, 0);
    emit(ints.e_core, 0, 0, 0, 0);
}

inline void write_fcidump_file(const std::string &path, const Integrals &ints) {
    std::ofstream ofs(path);
    if (!ofs.good())
        throw Error("cannot open '" + path + "' for writing");
    write_fcidump(ofs, ints);
}

} // namespace fragdmrg
