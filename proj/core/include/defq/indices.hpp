#pragma once

#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "defq/rational.hpp"

namespace defq {

/// Symmetric multi-index in the fiber variables (or, for base-level
/// operators, in the base coordinates): exponents[i] is the power of the
/// (i+1)-st variable.  Length is always the dimension d.
using YIndex = std::vector<int>;

inline int ydeg(const YIndex& y) { return std::accumulate(y.begin(), y.end(), 0); }

inline YIndex yzero(int d) { return YIndex(static_cast<std::size_t>(d), 0); }

inline YIndex yadd(const YIndex& a, const YIndex& b) {
    YIndex r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

/// Antisymmetric index sets (dx factors, polyvector derivative slots) as
/// bitmasks; bit i stands for index i+1.  Dimensions are desk scale, d <= 16.
using Mask = std::uint32_t;

inline int mask_count(Mask m) { return std::popcount(m); }

inline Mask mask_bit(int i) { return Mask{1} << (i - 1); } // i is 1-based

/// Koszul sign for merging two sorted odd-generator words a and b into one
/// sorted word: (-1)^{#{(i in a, j in b) : j < i}}.  Caller guarantees the
/// masks are disjoint.
inline int merge_sign(Mask a, Mask b) {
    int inversions = 0;
    for (Mask rest = a; rest;) {
        Mask low = rest & (~rest + 1);
        int i = std::countr_zero(low);
        inversions += std::popcount(b & (low - 1));
        (void)i;
        rest ^= low;
    }
    return (inversions % 2 == 0) ? 1 : -1;
}

/// Sign of removing generator i (1-based) from the sorted word s by acting
/// from the left: (-1)^{#{t in s : t < i}}.
inline int remove_front_sign(int i, Mask s) {
    return (std::popcount(s & (mask_bit(i) - 1)) % 2 == 0) ? 1 : -1;
}

/// Sign of moving generator i (1-based, member of s) to the end of the
/// sorted word: (-1)^{#{t in s : t > i}}.
inline int move_to_end_sign(int i, Mask s) {
    return (std::popcount(s & ~((mask_bit(i) << 1) - 1)) % 2 == 0) ? 1 : -1;
}

/// Multinomial count of distributing the multi-index beta over parts:
/// prod_t beta[t]! / prod_parts part[t]!.  Parts must sum to beta.
Rat multinomial(const YIndex& beta, const std::vector<YIndex>& parts);

/// All ways of splitting the multi-index beta into n ordered parts summing
/// to beta (componentwise compositions).
std::vector<std::vector<YIndex>> split_multi_index(const YIndex& beta, int n);

std::string yindex_str(const YIndex& y, const std::string& var);
std::string mask_str(Mask m, const std::string& sym);

} // namespace defq
