#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "codp/noise.hpp"

namespace codp {

// One sketch row: multiply-shift hashing over 64-bit keys. The index uses
// the high bits of a*key+b mapped onto [0,width) by fixed-point scaling;
// the sign comes from the top bit of an independent multiply-shift. The
// family is 2-universal, which is all the estimators require.
struct HashRow {
    std::uint64_t index_mul = 1;
    std::uint64_t index_add = 0;
    std::uint64_t sign_mul = 1;
    std::uint64_t sign_add = 0;
    std::uint64_t width = 1;
    bool sign_negated = false;

    std::uint64_t index(std::uint64_t key) const {
        const std::uint64_t mixed = index_mul * key + index_add;
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(mixed) * width) >> 64);
    }

    int sign(std::uint64_t key) const {
        const std::uint64_t mixed = sign_mul * key + sign_add;
        const int s = (mixed >> 63) ? 1 : -1;
        return sign_negated ? -s : s;
    }

    HashRow negated() const {
        HashRow copy = *this;
        copy.sign_negated = !copy.sign_negated;
        return copy;
    }
};

// All sketch variants derive their rows through this one helper, so plain,
// punctual and lazy instances built from the same seed hash identically.
inline std::vector<HashRow> make_rows(std::uint64_t seed, int depth, std::uint64_t width) {
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    if (width < 1) throw std::invalid_argument("width must be >= 1");
    std::vector<HashRow> rows;
    rows.reserve(static_cast<std::size_t>(depth));
    for (int i = 0; i < depth; ++i) {
        std::uint64_t s = derive_seed(seed, 0x68726f77ull, static_cast<std::uint64_t>(i));
        HashRow row;
        row.index_mul = splitmix64(s) | 1ull;
        row.index_add = splitmix64(s);
        row.sign_mul = splitmix64(s) | 1ull;
        row.sign_add = splitmix64(s);
        row.width = width;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace codp
