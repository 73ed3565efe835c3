#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "defq/equivariance.hpp"
#include "defq/errors.hpp"
#include "defq/kontsevich.hpp"
#include "defq/random_gen.hpp"
#include "support/oracles.hpp"

using namespace defq;

namespace {

FiberPolyVec const_bivector(int d, int trunc, int i, int j, const Rat& c) {
    FiberPolyVec v(d, trunc);
    v.add_term(yzero(d), 0, mask_bit(i) | mask_bit(j), CoeffPoly(d, c));
    return v;
}

} // namespace

TEST_CASE("u1 is the antisymmetrization map") {
    const int d = 2, N = 6;
    RandomGen g(1, d, N);
    for (int rep = 0; rep < 10; ++rep) {
        FiberPolyVec v = g.rand_polyvec(3);
        CHECK(u1(v) == hkr(v));
    }
    // exterior passthrough
    FiberPolyVec gamma = g.rand_polyvec_homog(0, 1, 2);
    FiberPolyVec dx1gamma(d, N);
    for (const auto& [k, c] : gamma.terms()) {
        if (k.dx & mask_bit(1)) continue;
        dx1gamma.add_term(k.y, k.dx | mask_bit(1), k.dy, c);
    }
    CHECK(u1(dx1gamma) == [&] {
        FiberPolyOp r(d, N);
        for (const auto& [k, c] : u1(gamma).terms()) {
            if (k.dx & mask_bit(1)) continue;
            r.add_term(k.y, k.dx | mask_bit(1), k.slots, c);
        }
        return r;
    }());
}

TEST_CASE("u2 vanishing structure") {
    const int d = 3, N = 6;
    RandomGen g(2, d, N);
    for (int rep = 0; rep < 30; ++rep) {
        FiberPolyVec v1 = g.rand_polyvec_homog(0, 0, 2);
        FiberPolyVec v2 = g.rand_polyvec_homog(0, 0, 2);
        if (v1.zero() || v2.zero()) continue;
        CHECK(u2(v1, v2).zero());
        FiberPolyVec b = g.rand_polyvec_homog(0, 1, 2);
        if (b.zero()) continue;
        CHECK(u2(v1, b).zero());
        CHECK(u2(b, v2).zero());
    }
    // higher degrees are a capacity error
    FiberPolyVec tri(d, N);
    tri.add_term(yzero(d), 0, mask_bit(1) | mask_bit(2) | mask_bit(3), CoeffPoly(d, 1));
    FiberPolyVec b = const_bivector(d, N, 1, 2, 1);
    CHECK_THROWS_AS(u2(tri, b), CapacityError);
}

TEST_CASE("u2 weights reproduce the constant-coefficient star coefficient") {
    // On R^2 with alpha = d1 ^ d2 the arity-2 value must match the closed
    // form 2 * C2(moyal) = 1/4 a a d d (x) d d.
    const int d = 2, N = 6;
    FiberPolyVec alpha = const_bivector(d, N, 1, 2, 1);
    FiberPolyOp val = u2(alpha, alpha);
    std::vector<std::vector<Rat>> am{{Rat(0), Rat(1)}, {Rat(-1), Rat(0)}};
    FiberPolyOp moyal2 = oracles::moyal_coefficient(am, 2);
    // moyal_coefficient is base-level; rebuild as fiber and scale by 2! = 2
    FiberPolyOp expect(d, N);
    for (const auto& [k, c] : moyal2.terms()) expect.add_term(k.y, 0, k.slots, c.scaled(2));
    CHECK(val == expect);
}

TEST_CASE("weight table: solvable, minimal support, byte-stable round trip") {
    const WeightTable& wt = WeightTable::solved();
    REQUIRE(wt.shapes.size() == 9);
    bool nonzero = false;
    for (const auto& w : wt.weights) nonzero = nonzero || !is_zero(w);
    CHECK(nonzero);
    std::string s1 = wt.serialize();
    WeightTable back = WeightTable::deserialize(s1);
    CHECK(back.serialize() == s1);
    CHECK(back.order_cap == 2);
}

TEST_CASE("linear equivariance of u1 and u2") {
    const int d = 2, N = 6;
    RandomGen g(3, d, N);
    std::vector<AffineMap> maps;
    {
        AffineMap a = AffineMap::identity(d);
        a.m[0][0] = 3;
        a.m[0][1] = 1;
        maps.push_back(a);
        AffineMap rot = AffineMap::identity(d);
        rot.m = {{Rat(0), Rat(-1)}, {Rat(1), Rat(0)}};
        maps.push_back(rot);
    }
    for (const auto& gm : maps) {
        for (int rep = 0; rep < 8; ++rep) {
            FiberPolyVec v = g.rand_polyvec_homog(0, 1, 2);
            FiberPolyVec w = g.rand_polyvec_homog(0, 1, 2);
            if (v.zero() || w.zero()) continue;
            CHECK(act(gm, u1(v)) == u1(act(gm, v)));
            CHECK(act(gm, u2(v, w)) == u2(act(gm, v), act(gm, w)));
        }
    }
}

TEST_CASE("assembled morphism: caps and defects") {
    const int d = 2, N = 6;
    CHECK_THROWS_AS(assemble_fiber_morphism(3, d, N), CapacityError);
    LinfMorphism f1 = assemble_fiber_morphism(1, d, N);
    CHECK(f1.arity_cap == 1);
    LinfMorphism f2 = assemble_fiber_morphism(2, d, N);
    RandomGen g(4, d, N);
    for (int rep = 0; rep < 6; ++rep) {
        FiberPolyVec b1 = g.rand_polyvec_homog(0, 1, 2);
        FiberPolyVec b2 = g.rand_polyvec_homog(0, 1, 2);
        if (b1.zero() || b2.zero()) continue;
        std::vector<GradedValue> a2{GradedValue(b1), GradedValue(b2)};
        CHECK(gv_zero(linf_defect(f2, 2, a2)));
    }
}
