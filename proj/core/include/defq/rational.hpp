#pragma once

#include <gmpxx.h>

#include <string>

namespace defq {

/// Exact rational scalar.  All arithmetic in the library is exact; no
/// floating point anywhere.
using Rat = mpq_class;

inline bool is_zero(const Rat& r) { return sgn(r) == 0; }

/// n! as an exact rational.
inline Rat rat_factorial(int n) {
    Rat r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/// Canonical "p/q" (or "p" when q == 1) rendering.
inline std::string rat_str(const Rat& r) { return r.get_str(); }

/// Parse "p", "-p", or "p/q".  Throws ValidationError on malformed input.
Rat rat_parse(const std::string& s);

} // namespace defq
