#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include "defq/fedosov.hpp"
#include "defq/poly_op.hpp"
#include "defq/poly_vec.hpp"

namespace defq::oracles {

/// Taylor expansion f(x + y) truncated at the fiber order: the flat-case
/// closed form of the resolution lift.
inline FormSection taylor_lift(const CoeffPoly& f, int trunc) {
    const int d = f.dim();
    FormSection out(d, trunc);
    // expand each monomial prod (x_t + y_t)^{e_t}
    for (const auto& [k, c] : f.terms()) {
        std::vector<std::pair<YIndex, YIndex>> parts; // (x part, y part)
        parts.emplace_back(yzero(d), yzero(d));
        std::vector<std::pair<YIndex, YIndex>> next;
        Rat binom;
        for (int t = 0; t < d; ++t) {
            next.clear();
            for (const auto& [xe, ye] : parts) {
                for (int j = 0; j <= k.xexp[static_cast<std::size_t>(t)]; ++j) {
                    YIndex x2 = xe, y2 = ye;
                    x2[static_cast<std::size_t>(t)] = k.xexp[static_cast<std::size_t>(t)] - j;
                    y2[static_cast<std::size_t>(t)] = j;
                    next.emplace_back(x2, y2);
                }
            }
            parts = next;
        }
        for (const auto& [xe, ye] : parts) {
            Rat coeff = c;
            for (int t = 0; t < d; ++t) {
                // binomial C(e_t, ye_t)
                int e = xe[static_cast<std::size_t>(t)] + ye[static_cast<std::size_t>(t)];
                int j = ye[static_cast<std::size_t>(t)];
                coeff *= rat_factorial(e) / (rat_factorial(j) * rat_factorial(e - j));
            }
            CoeffPoly cc(d);
            cc.add_term(xe, k.hpow, coeff);
            out.add_term(ye, 0, cc);
        }
    }
    return out;
}

/// The closed-form constant-coefficient star product: coefficient of
/// hbar^n is (1/n!)(1/2^n) a^{i1 j1}..a^{in jn} d_{i1..in} (x) d_{j1..jn}.
/// `alpha` is the full antisymmetric matrix (alpha[i][j] = -alpha[j][i]).
inline FiberPolyOp moyal_coefficient(const std::vector<std::vector<Rat>>& alpha, int n) {
    const int d = static_cast<int>(alpha.size());
    FiberPolyOp c(d, kInf, Family::base);
    std::vector<std::pair<YIndex, YIndex>> terms{{yzero(d), yzero(d)}};
    std::vector<Rat> coeffs{Rat(1)};
    for (int step = 0; step < n; ++step) {
        std::vector<std::pair<YIndex, YIndex>> nt;
        std::vector<Rat> nc;
        for (std::size_t t = 0; t < terms.size(); ++t)
            for (int i = 1; i <= d; ++i)
                for (int j = 1; j <= d; ++j) {
                    if (is_zero(alpha[static_cast<std::size_t>(i - 1)]
                                     [static_cast<std::size_t>(j - 1)]))
                        continue;
                    YIndex a = terms[t].first, b = terms[t].second;
                    a[static_cast<std::size_t>(i - 1)] += 1;
                    b[static_cast<std::size_t>(j - 1)] += 1;
                    nt.emplace_back(a, b);
                    nc.push_back(coeffs[t] * alpha[static_cast<std::size_t>(i - 1)]
                                                  [static_cast<std::size_t>(j - 1)]);
                }
        terms = std::move(nt);
        coeffs = std::move(nc);
    }
    Rat norm = 1 / (rat_factorial(n) * Rat(1 << n));
    for (std::size_t t = 0; t < terms.size(); ++t)
        c.add_term(yzero(d), 0, {terms[t].first, terms[t].second}, CoeffPoly(d, coeffs[t] * norm));
    return c;
}

/// Lie bracket of two vector fields written as first-order operators, via
/// direct evaluation on coordinate monomials: the decomposable-wedge
/// Schouten oracle for degree (0, 0).
inline FiberPolyVec lie_bracket_vectors(const FiberPolyVec& v, const FiberPolyVec& w) {
    const int d = v.dim();
    FiberPolyVec out(d, v.trunc(), v.family());
    auto comp = [&](const FiberPolyVec& u, int k) {
        FormSection c(u.dim(), u.trunc());
        for (const auto& [key, cc] : u.terms())
            if (key.dy == mask_bit(k)) c.add_term(key.y, 0, cc);
        return c;
    };
    for (int k = 1; k <= d; ++k) {
        FormSection acc(d, v.trunc());
        for (int i = 1; i <= d; ++i) {
            acc = acc + comp(v, i) * comp(w, k).dy(i);
            acc = acc - comp(w, i) * comp(v, k).dy(i);
        }
        for (const auto& [key, cc] : acc.terms()) out.add_term(key.y, 0, mask_bit(k), cc);
    }
    return out;
}

} // namespace defq::oracles
