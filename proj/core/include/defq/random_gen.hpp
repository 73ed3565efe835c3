#pragma once

#include <random>

#include "defq/poly_op.hpp"
#include "defq/poly_vec.hpp"

namespace defq {

/// Deterministic generators for randomized identity checks.  All draws use
/// the caller's engine so suites are reproducible byte-for-byte.
struct RandomGen {
    std::mt19937_64 rng;
    int d;
    int trunc;
    int max_ydeg = 3;
    int max_xdeg = 1;

    RandomGen(std::uint64_t seed, int d_, int trunc_) : rng(seed), d(d_), trunc(trunc_) {}

    Rat coeff() {
        std::uniform_int_distribution<int> num(-6, 6);
        return Rat(num(rng));
    }

    YIndex rand_yindex(int maxdeg) {
        std::uniform_int_distribution<int> deg(0, maxdeg);
        YIndex y = yzero(d);
        int total = deg(rng);
        std::uniform_int_distribution<int> var(0, d - 1);
        for (int i = 0; i < total; ++i) y[static_cast<std::size_t>(var(rng))] += 1;
        return y;
    }

    CoeffPoly rand_coeff_poly() {
        CoeffPoly p(d);
        std::uniform_int_distribution<int> nt(1, 2);
        int n = nt(rng);
        for (int i = 0; i < n; ++i) p.add_term(rand_yindex(max_xdeg), 0, coeff());
        return p;
    }

    Mask rand_mask(int max_size) {
        std::uniform_int_distribution<int> sz(0, max_size);
        std::uniform_int_distribution<int> var(1, d);
        Mask m = 0;
        int n = sz(rng);
        for (int i = 0; i < n; ++i) m |= mask_bit(var(rng));
        return m;
    }

    /// Uniform mask with exactly `size` bits (size <= d).
    Mask rand_mask_exact(int size) {
        std::vector<int> idx(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = i + 1;
        std::shuffle(idx.begin(), idx.end(), rng);
        Mask m = 0;
        for (int i = 0; i < size; ++i) m |= mask_bit(idx[static_cast<std::size_t>(i)]);
        return m;
    }

    FormSection rand_section(int terms = 3) {
        FormSection s(d, trunc);
        for (int i = 0; i < terms; ++i)
            s.add_term(rand_yindex(max_ydeg), rand_mask(d), rand_coeff_poly());
        return s;
    }

    /// Homogeneous in (q, k): fixed exterior degree and slot count.
    FiberPolyVec rand_polyvec_homog(int q, int k, int terms = 3) {
        FiberPolyVec v(d, trunc);
        if (q > d || k + 1 > d) return v;
        for (int i = 0; i < terms; ++i)
            v.add_term(rand_yindex(max_ydeg), rand_mask_exact(q), rand_mask_exact(k + 1),
                       rand_coeff_poly());
        return v;
    }

    FiberPolyVec rand_polyvec(int terms = 3) {
        FiberPolyVec v(d, trunc);
        for (int i = 0; i < terms; ++i)
            v.add_term(rand_yindex(max_ydeg), rand_mask(d), rand_mask(d), rand_coeff_poly());
        return v;
    }

    FiberPolyOp rand_polyop_homog(int q, int k, int max_order = 2, int terms = 3) {
        FiberPolyOp p(d, trunc);
        if (q > d) return p;
        std::uniform_int_distribution<int> ord(0, max_order);
        for (int i = 0; i < terms; ++i) {
            std::vector<YIndex> slots;
            for (int s = 0; s <= k; ++s) slots.push_back(rand_yindex(ord(rng)));
            p.add_term(rand_yindex(max_ydeg), rand_mask_exact(q), std::move(slots),
                       rand_coeff_poly());
        }
        return p;
    }

    FiberPolyOp rand_polyop(int max_k = 2, int terms = 3) {
        std::uniform_int_distribution<int> kk(-1, max_k);
        FiberPolyOp p(d, trunc);
        for (int i = 0; i < terms; ++i) {
            int k = kk(rng);
            std::vector<YIndex> slots;
            for (int s = 0; s <= k; ++s) slots.push_back(rand_yindex(2));
            p.add_term(rand_yindex(max_ydeg), rand_mask(d), std::move(slots), rand_coeff_poly());
        }
        return p;
    }
};

} // namespace defq
