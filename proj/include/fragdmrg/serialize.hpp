#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>

#include "block_tensor.hpp"

namespace fragdmrg {

// Binary tensor format: fixed header (rank, flux, per-index sector tables),
// then blocks in canonical key order as little-endian 8-byte reals.
namespace io {

inline void put_u32(std::ostream &os, uint32_t v) { os.write(reinterpret_cast<const char *>(&v), 4); }
inline void put_i32(std::ostream &os, int32_t v) { os.write(reinterpret_cast<const char *>(&v), 4); }
inline void put_u64(std::ostream &os, uint64_t v) { os.write(reinterpret_cast<const char *>(&v), 8); }

inline uint32_t get_u32(std::istream &is) {
    uint32_t v = 0;
    is.read(reinterpret_cast<char *>(&v), 4);
    return v;
}
inline int32_t get_i32(std::istream &is) {
    int32_t v = 0;
    is.read(reinterpret_cast<char *>(&v), 4);
    return v;
}
inline uint64_t get_u64(std::istream &is) {
    uint64_t v = 0;
    is.read(reinterpret_cast<char *>(&v), 8);
    return v;
}

} // namespace io

inline void write_tensor(std::ostream &os, const BlockTensor &t) {
    os.write("FRTN", 4);
    io::put_u32(os, 1u);
    io::put_u32(os, static_cast<uint32_t>(t.rank()));
    io::put_i32(os, t.flux.n);
    io::put_i32(os, t.flux.two_sz);
    for (const auto &idx : t.indices) {
        io::put_u32(os, idx.dir == Direction::Out ? 1u : 0u);
        io::put_u32(os, static_cast<uint32_t>(idx.sectors.size()));
        for (const auto &s : idx.sectors) {
            io::put_i32(os, s.q.n);
            io::put_i32(os, s.q.two_sz);
            io::put_u32(os, static_cast<uint32_t>(s.dim));
        }
    }
    io::put_u64(os, t.blocks.size());
    for (const auto &[key, data] : t.blocks) {
        for (int k : key)
            io::put_u32(os, static_cast<uint32_t>(k));
        os.write(reinterpret_cast<const char *>(data.data()),
                 static_cast<std::streamsize>(data.size() * sizeof(double)));
    }
    if (!os.good())
        throw Error("tensor write failed");
}

inline BlockTensor read_tensor(std::istream &is) {
    char magic[4];
    is.read(magic, 4);
    if (!is.good() || std::string(magic, 4) != "FRTN")
        throw Error("bad tensor magic");
    if (io::get_u32(is) != 1u)
        throw Error("unsupported tensor format version");
    const uint32_t rank = io::get_u32(is);
    QNum flux{io::get_i32(is), io::get_i32(is)};
    std::vector<Index> indices;
    for (uint32_t a = 0; a < rank; ++a) {
        const Direction dir = io::get_u32(is) ? Direction::Out : Direction::In;
        const uint32_t ns = io::get_u32(is);
        std::vector<Sector> secs(ns);
        for (uint32_t s = 0; s < ns; ++s) {
            secs[s].q.n = io::get_i32(is);
            secs[s].q.two_sz = io::get_i32(is);
            secs[s].dim = static_cast<int>(io::get_u32(is));
        }
        indices.emplace_back(dir, std::move(secs));
    }
    BlockTensor t(flux, std::move(indices));
    const uint64_t nblocks = io::get_u64(is);
    for (uint64_t b = 0; b < nblocks; ++b) {
        Key key(rank);
        for (uint32_t a = 0; a < rank; ++a)
            key[a] = static_cast<int>(io::get_u32(is));
        auto &data = t.block(key);
        is.read(reinterpret_cast<char *>(data.data()),
                static_cast<std::streamsize>(data.size() * sizeof(double)));
    }
    if (!is.good())
        throw Error("tensor read failed");
    return t;
}

inline void save_tensor(const std::string &path, const BlockTensor &t) {
    std::ofstream ofs(path, std::ios::binary);
    if (!ofs.good())
        throw Error("cannot open '" + path + "' for writing");
    write_tensor(ofs, t);
}

inline BlockTensor load_tensor(const std::string &path) {
    std::ifstream ifs(path, std::ios::binary);
    if (!ifs.good())
        throw Error("cannot open '" + path + "' for reading");
    return read_tensor(ifs);
}

} // namespace fragdmrg
