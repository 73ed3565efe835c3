#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "defq/indices.hpp"
#include "defq/rational.hpp"

namespace defq {

/// Exact multivariate polynomial in the base coordinates x1..xd with
/// rational coefficients and an optional power of the formal deformation
/// parameter.  No stored zero coefficients; exponent vectors have length
/// exactly d.
class CoeffPoly {
public:
    struct Key {
        YIndex xexp;
        int hpow = 0;
        auto operator<=>(const Key&) const = default;
    };

    CoeffPoly() = default;
    explicit CoeffPoly(int d) : d_(d) {}
    CoeffPoly(int d, const Rat& c) : d_(d) { add_term(yzero(d), 0, c); }

    static CoeffPoly variable(int d, int i, int power = 1); // x_i^power, i 1-based
    static CoeffPoly hbar(int d, int power = 1);

    int dim() const { return d_; }
    bool zero() const { return terms_.empty(); }
    const std::map<Key, Rat>& terms() const { return terms_; }

    void add_term(const YIndex& xexp, int hpow, const Rat& c);

    CoeffPoly operator+(const CoeffPoly& o) const;
    CoeffPoly operator-(const CoeffPoly& o) const;
    CoeffPoly operator*(const CoeffPoly& o) const;
    CoeffPoly operator-() const;
    CoeffPoly scaled(const Rat& c) const;

    CoeffPoly& operator+=(const CoeffPoly& o);

    bool operator==(const CoeffPoly& o) const { return d_ == o.d_ && terms_ == o.terms_; }

    /// d/dx_i (i 1-based).
    CoeffPoly dx(int i) const;

    /// Substitute x_j -> images[j-1] (each a polynomial of arbitrary degree).
    CoeffPoly substitute(const std::vector<CoeffPoly>& images) const;

    /// Drop terms with hbar power above cap.
    CoeffPoly truncate_hbar(int cap) const;

    int x_degree() const;
    int hbar_degree() const;

    /// Deterministic rendering, e.g. "1 - 3/2*x1^2*x2 + hbar*x3".
    std::string str() const;

    /// Parse the spec-file polynomial grammar: rational literals, variables
    /// x1..xd, operators + - * ^, parentheses, whitespace-insensitive.
    static CoeffPoly parse(const std::string& text, int d);

private:
    int d_ = 0;
    std::map<Key, Rat> terms_;
};

} // namespace defq
