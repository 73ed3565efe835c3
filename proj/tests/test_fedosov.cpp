#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "defq/errors.hpp"
#include "defq/fedosov.hpp"
#include "defq/random_gen.hpp"
#include "support/oracles.hpp"

using namespace defq;

namespace {

// d = 2, Gamma^2_{11} = x2: the standing curved test connection.
ConnectionData curved2() {
    ConnectionData c(2);
    c.set(2, 1, 1, CoeffPoly::variable(2, 2));
    return c;
}

FormSection ymono(int d, int trunc, const YIndex& y, Mask dx = 0, const Rat& c = 1) {
    FormSection s(d, trunc);
    s.add_term(y, dx, CoeffPoly(d, c));
    return s;
}

} // namespace

TEST_CASE("delta on printed examples") {
    const int d = 2, N = 4;
    // delta(y1 y2) = dx1 y2 + dx2 y1
    FormSection a = ymono(d, N, {1, 1});
    FormSection expect = ymono(d, N, {0, 1}, mask_bit(1)) + ymono(d, N, {1, 0}, mask_bit(2));
    CHECK(delta(a) == expect);

    // delta m = 0
    CHECK(delta(FiberPolyOp::multiplication(d, N)).zero());

    RandomGen g(2, d, N);
    for (int rep = 0; rep < 20; ++rep) CHECK(delta(delta(g.rand_section())).zero());
}

TEST_CASE("delta_inv on printed examples") {
    const int d = 2, N = 4;
    CHECK(delta_inv(ymono(d, N, {0, 0}, mask_bit(1))) == ymono(d, N, {1, 0}));
    CHECK(delta_inv(ymono(d, N, {1, 0})).zero());
    CHECK(delta_inv(ymono(d, N, {1, 0}, mask_bit(2))) == ymono(d, N, {1, 1}, 0, Rat(1, 2)));
    // cross-check: delta(y1) = dx1
    CHECK(delta(ymono(d, N, {1, 0})) == ymono(d, N, {0, 0}, mask_bit(1)));
}

TEST_CASE("sigma keeps only the (0,0) part") {
    const int d = 2, N = 4;
    FormSection s = FormSection::constant(d, N, 3);
    s.add_term({0, 1}, 0, CoeffPoly::variable(d, 1));
    s.add_term({1, 0}, mask_bit(1), CoeffPoly(d, 1));
    CHECK(sigma(s) == FormSection::constant(d, N, 3));
    FiberPolyOp m = FiberPolyOp::multiplication(d, N);
    CHECK(sigma(m) == m);
    RandomGen g(3, d, N);
    for (int rep = 0; rep < 10; ++rep) CHECK(sigma(delta_inv(g.rand_section())).zero());
}

TEST_CASE("hodge identity on all three kinds, d in {2, 3}") {
    for (int d : {2, 3}) {
        const int N = 8; // headroom so delta_inv of degree-6 data stays exact
        RandomGen g(100 + d, d, N);
        g.max_ydeg = 6;
        for (int rep = 0; rep < 40; ++rep) {
            FormSection a = g.rand_section(4);
            CHECK(sigma(a) + delta(delta_inv(a)) + delta_inv(delta(a)) == a);
            FiberPolyVec v = g.rand_polyvec(4);
            CHECK(sigma(v) + delta(delta_inv(v)) + delta_inv(delta(v)) == v);
            FiberPolyOp p = g.rand_polyop(2, 4);
            CHECK(sigma(p) + delta(delta_inv(p)) + delta_inv(delta(p)) == p);
        }
    }
}

TEST_CASE("nabla: flat reduces to d, curved matches the direct formula") {
    const int d = 2, N = 4;
    ConnectionData flat = ConnectionData::flat(d);
    FormSection a(d, N);
    a.add_term({0, 1}, 0, CoeffPoly::variable(d, 1)); // x1 y2
    CHECK(nabla(a, flat) == ymono(d, N, {0, 1}, mask_bit(1)));

    // Gamma^2_{11} = x2: nabla(y2) = -x2 y1 dx1
    ConnectionData c = curved2();
    FormSection y2 = ymono(d, N, {0, 1});
    FormSection expect(d, N);
    expect.add_term({1, 0}, mask_bit(1), -CoeffPoly::variable(d, 2));
    CHECK(nabla(y2, c) == expect);

    // anticommutation with delta for any symmetric table
    RandomGen g(4, d, N);
    ConnectionData rnd(d);
    rnd.set(1, 1, 2, g.rand_coeff_poly());
    rnd.set(2, 2, 2, g.rand_coeff_poly());
    rnd.set(1, 1, 1, g.rand_coeff_poly());
    for (int rep = 0; rep < 15; ++rep) {
        FormSection s = g.rand_section();
        CHECK((delta(nabla(s, rnd)) + nabla(delta(s), rnd)).zero());
        FiberPolyVec v = g.rand_polyvec(3);
        CHECK((delta(nabla(v, rnd)) + nabla(delta(v), rnd)).zero());
        FiberPolyOp p = g.rand_polyop(1, 2);
        CHECK((delta(nabla(p, rnd)) + nabla(delta(p), rnd)).zero());
    }
}

TEST_CASE("curvature components and properties") {
    const int d = 2, N = 4;
    // constant christoffel with one entry is flat
    ConnectionData cc(d);
    cc.set(2, 1, 1, CoeffPoly(d, 5));
    CHECK(curvature(cc, N).zero());

    CHECK(curvature(ConnectionData::flat(d), N).zero());

    ConnectionData c = curved2();
    CHECK(riemann_component(c, 1, 2, 2, 1) == -CoeffPoly(d, 1));
    CHECK(riemann_component(c, 2, 1, 2, 1) == CoeffPoly(d, 1));
    CHECK(riemann_component(c, 1, 2, 1, 1).zero());
    CHECK(riemann_component(c, 1, 2, 2, 2).zero());
    CHECK(riemann_component(c, 1, 2, 1, 2).zero());

    // nabla^2 = R-action on random elements
    FiberPolyVec R = curvature(c, N);
    RandomGen g(5, d, N);
    for (int rep = 0; rep < 10; ++rep) {
        FormSection a = g.rand_section();
        CHECK(nabla(nabla(a, c), c) == vec_action(R, a));
        FiberPolyVec v = g.rand_polyvec(3);
        CHECK(nabla(nabla(v, c), c) == schouten(R, v));
        FiberPolyOp p = g.rand_polyop(1, 2);
        CHECK(nabla(nabla(p, c), c) == gerstenhaber(vec_to_op(R), p));
    }

    // Bianchi
    CHECK(delta(R).zero());
    CHECK(nabla(R, c).zero());
}

TEST_CASE("solve_connection: flat gives A = 0; curved satisfies the flatness equation") {
    const int d = 2, N = 6;
    FedosovState flat = solve_connection(ConnectionData::flat(d), N);
    CHECK(flat.A.zero());

    FedosovState st = solve_connection(curved2(), N);
    CHECK(st.A.min_y_degree() >= 2);
    CHECK(delta_inv(st.A).zero());

    // first iterate: y-degree-2 part of A equals delta_inv R, and its delta
    // recovers R
    FiberPolyVec a2 = st.A.y_truncated(2);
    CHECK(a2 == delta_inv(st.R));
    CHECK(delta(a2) == st.R);

    // residual of the flatness equation vanishes through degree N - 1
    FiberPolyVec res = delta(st.A) - st.R - nabla(st.A, st.conn) -
                       schouten(st.A, st.A).scaled(Rat(1, 2));
    CHECK(res.y_truncated(st.flat_valid_to).zero());
    CHECK(st.flat_valid_to == 5);

    // D^2 = 0 through the certified bound on a probe spread
    RandomGen g(6, d, N);
    for (int rep = 0; rep < 10; ++rep) {
        FormSection a = g.rand_section(3);
        FormSection dd = fedosov_d(fedosov_d(a, st), st);
        CHECK(dd.y_truncated(vmin(dd.valid_to(), st.flat_valid_to)).zero());
        FiberPolyOp p = g.rand_polyop(1, 2);
        FiberPolyOp ddp = fedosov_d(fedosov_d(p, st), st);
        CHECK(ddp.y_truncated(vmin(ddp.valid_to(), st.flat_valid_to)).zero());
    }

    // D agrees with d + [B, .] termwise
    FiberPolyVec b = fedosov_b(st);
    for (int rep = 0; rep < 10; ++rep) {
        FiberPolyVec v = g.rand_polyvec(3);
        FiberPolyVec lhs = fedosov_d(v, st);
        FiberPolyVec rhs = exterior_d(v) + schouten(b, v);
        CHECK(lhs == rhs);
        FiberPolyOp p = g.rand_polyop(1, 2);
        CHECK(fedosov_d(p, st) == exterior_d(p) + gerstenhaber(vec_to_op(b), p));
    }

    CHECK_THROWS_AS(solve_connection(curved2(), 1), ValidationError);
}

TEST_CASE("fedosov_d on flat data") {
    const int d = 2, N = 4;
    FedosovState st = solve_connection(ConnectionData::flat(d), N);
    // D = d - delta: D(y1) = -dx1
    FormSection y1 = ymono(d, N, {1, 0});
    CHECK(fedosov_d(y1, st) == -ymono(d, N, {0, 0}, mask_bit(1)));
    // m is D-closed for any test connection
    FedosovState stc = solve_connection(curved2(), 6);
    FiberPolyOp m = FiberPolyOp::multiplication(d, 6);
    FiberPolyOp dm = fedosov_d(m, stc);
    CHECK(dm.y_truncated(vmin(dm.valid_to(), stc.flat_valid_to)).zero());
}

TEST_CASE("solve_exact: flat printed examples and the roundtrip contract") {
    const int d = 2, N = 6;
    FedosovState st = solve_connection(ConnectionData::flat(d), N);

    // a = -dx1 -> b = y1
    FormSection a = -ymono(d, N, {0, 0}, mask_bit(1));
    CHECK(solve_exact(a, st) == ymono(d, N, {1, 0}));

    // a = dx1 dx2 -> b = -1/2 (y1 dx2 - y2 dx1)
    FormSection a2 = ymono(d, N, {0, 0}, mask_bit(1) | mask_bit(2));
    FormSection expect = ymono(d, N, {1, 0}, mask_bit(2), Rat(-1, 2)) +
                         ymono(d, N, {0, 1}, mask_bit(1), Rat(1, 2));
    FormSection b2 = solve_exact(a2, st);
    CHECK(b2 == expect);
    CHECK(fedosov_d(b2, st) == a2);

    // exterior degree 0 input is a precondition error
    CHECK_THROWS_AS(solve_exact(ymono(d, N, {1, 0}), st), ValidationError);

    // non-closed input reports its failing degree
    FormSection bad = ymono(d, N, {2, 0}, mask_bit(2));
    CHECK_THROWS_AS(solve_exact(bad, st), ValidationError);

    // randomized roundtrips on a curved state
    FedosovState stc = solve_connection(curved2(), N);
    RandomGen g(7, d, N);
    g.max_ydeg = 4;
    for (int rep = 0; rep < 25; ++rep) {
        FormSection c = g.rand_section(3);
        FormSection ax = fedosov_d(c, stc);
        if (ax.zero()) continue;
        FormSection b = solve_exact(ax, stc);
        FormSection db = fedosov_d(b, stc);
        int bound = vmin(vmin(db.valid_to(), ax.valid_to()), stc.flat_valid_to);
        CHECK((db - ax).y_truncated(bound).zero());
        CHECK(sigma(b).zero());
        CHECK(delta_inv(b).zero());
    }
}

TEST_CASE("tau_lift: flat equals the Taylor oracle; curved satisfies the contracts") {
    const int d = 2, N = 6;
    FedosovState flat = solve_connection(ConnectionData::flat(d), N);

    CoeffPoly x1 = CoeffPoly::variable(d, 1);
    CHECK(tau_lift_fn(x1, flat) == oracles::taylor_lift(x1, N));
    CoeffPoly x1sq = x1 * x1;
    CHECK(tau_lift_fn(x1sq, flat) == oracles::taylor_lift(x1sq, N));
    CoeffPoly mixed = CoeffPoly::parse("x1^3*x2 - 2*x2^2 + 5", d);
    CHECK(tau_lift_fn(mixed, flat) == oracles::taylor_lift(mixed, N));

    FedosovState stc = solve_connection(curved2(), N);
    RandomGen g(8, d, N);
    for (int rep = 0; rep < 15; ++rep) {
        CoeffPoly f = g.rand_coeff_poly();
        FormSection t = tau_lift_fn(f, stc);
        CHECK(scalar_part(sigma(t)) == f);
        FormSection dt = fedosov_d(t, stc);
        CHECK(dt.y_truncated(vmin(dt.valid_to(), stc.flat_valid_to)).zero());
    }

    // nonzero p or q input is a precondition error
    FormSection badp = ymono(d, N, {1, 0});
    CHECK_THROWS_AS(tau_lift(badp, stc), ValidationError);
    FormSection badq = ymono(d, N, {0, 0}, mask_bit(1));
    CHECK_THROWS_AS(tau_lift(badq, stc), ValidationError);
}

TEST_CASE("mu_project: printed examples and the morphism property") {
    const int d = 2, N = 6;
    FedosovState flat = solve_connection(ConnectionData::flat(d), N);

    // flat: mu(d/dy1) = d/dx1
    FiberPolyOp p(d, N);
    p.add_term(yzero(d), 0, {YIndex{1, 0}}, CoeffPoly(d, 1));
    FiberPolyOp expect(d, kInf, Family::base);
    expect.add_term(yzero(d), 0, {YIndex{1, 0}}, CoeffPoly(d, 1));
    CHECK(mu_project(p, flat) == expect);

    // mu(m) = m0 on flat and curved states
    FedosovState stc = solve_connection(curved2(), N);
    FiberPolyOp m = FiberPolyOp::multiplication(d, N);
    FiberPolyOp m0 = FiberPolyOp::multiplication(d, kInf, Family::base);
    CHECK(mu_project(m, flat) == m0);
    CHECK(mu_project(m, stc) == m0);

    // non-D-closed input is rejected
    FiberPolyOp bad(d, N);
    bad.add_term(YIndex{1, 0}, 0, {YIndex{1, 0}}, CoeffPoly(d, 1));
    CHECK_THROWS_AS(mu_project(bad, stc), ValidationError);

    // tau-lifted base vector fields return to themselves
    RandomGen g(9, d, N);
    for (int rep = 0; rep < 10; ++rep) {
        FiberPolyVec base(d, kInf, Family::base);
        base.add_term(yzero(d), 0, mask_bit(1 + rep % d), g.rand_coeff_poly());
        FiberPolyVec lifted = tau_lift(fiberize(base, N), stc);
        CHECK(mu_project_vec(lifted, stc) == base);
    }
}
