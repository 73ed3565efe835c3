#pragma once

#include <compare>
#include <limits>

#include "defq/indices.hpp"

namespace defq {

/// Per-term grading triple: exterior degree q, polyvector/operator degree k
/// (functions have k = -1), fiber polynomial degree p.  Parity is (q + k)
/// mod 2.
struct Grading {
    int q = 0;
    int k = -1;
    int p = 0;
    auto operator<=>(const Grading&) const = default;
};

/// Whether derivative slots act on the fiber variables or on the base
/// coordinates.  Base-level elements are the fiberwise case at infinite
/// truncation restricted to polynomial data: no fiber variables, no form
/// part.
enum class Family { fiber, base };

/// Sentinel for "exact at every degree" in the valid-to bookkeeping, and
/// for untruncated (base-level) containers.
inline constexpr int kInf = std::numeric_limits<int>::max() / 4;

inline int vmin(int a, int b) { return a < b ? a : b; }

/// INF-aware shift of a validity bound.
inline int vshift(int v, int delta) {
    if (v >= kInf) return kInf;
    int r = v + delta;
    return r < 0 ? 0 : (r >= kInf ? kInf : r);
}

} // namespace defq
