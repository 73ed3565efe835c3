#include "defq/suites.hpp"

#include <algorithm>
#include <functional>

#include "defq/errors.hpp"
#include "defq/random_gen.hpp"
#include "defq/star.hpp"

namespace defq {

namespace {

struct Suite {
    const ManifoldSpec& spec;
    std::vector<IdentityResult> out;

    void check(const std::string& name, const std::function<std::string()>& body) {
        try {
            std::string detail = body(); // empty = pass
            out.push_back({name, detail.empty(), detail});
        } catch (const std::exception& e) {
            out.push_back({name, false, e.what()});
        }
    }
};

int parity(int e) { return ((e % 2) + 2) % 2; }

std::string expect_zero(const FormSection& s, const std::string& what) {
    return s.zero() ? "" : what + " = " + s.str();
}
std::string expect_zero(const FiberPolyVec& s, const std::string& what) {
    return s.zero() ? "" : what + " = " + s.str();
}
std::string expect_zero(const FiberPolyOp& s, const std::string& what) {
    return s.zero() ? "" : what + " = " + s.str();
}

CoeffPoly xmono(int d, const YIndex& e) {
    CoeffPoly p(d);
    p.add_term(e, 0, 1);
    return p;
}

std::vector<CoeffPoly> monomials_upto(int d, int deg) {
    std::vector<CoeffPoly> out;
    struct Rec {
        int d;
        std::vector<CoeffPoly>& out;
        void go(YIndex& idx, int pos, int left) {
            if (pos == d - 1) {
                idx[static_cast<std::size_t>(pos)] = left;
                out.push_back(xmono(static_cast<int>(idx.size()), idx));
                return;
            }
            for (int v = left; v >= 0; --v) {
                idx[static_cast<std::size_t>(pos)] = v;
                go(idx, pos + 1, left - v);
            }
        }
    } rec{d, out};
    for (int total = 0; total <= deg; ++total) {
        YIndex idx = yzero(d);
        rec.go(idx, 0, total);
    }
    return out;
}

FiberPolyOp op_fiberize(const FiberPolyOp& base, int trunc) {
    FiberPolyOp r(base.dim(), trunc);
    for (const auto& [k, c] : base.terms()) r.add_term(k.y, 0, k.slots, c);
    return r;
}

// --------------------------------------------------------------------------

void suite_graded_core(Suite& s) {
    const int d = s.spec.d, N = s.spec.trunc;
    s.check("normalization_canonical", [&] {
        RandomGen g(11, d, N);
        for (int rep = 0; rep < 20; ++rep) {
            FormSection a = g.rand_section(4);
            std::vector<std::tuple<YIndex, Mask, CoeffPoly>> items;
            for (const auto& [k, c] : a.terms()) items.emplace_back(k.y, k.dx, c);
            std::shuffle(items.begin(), items.end(), g.rng);
            FormSection b(d, N);
            for (const auto& [y, dx, c] : items) {
                // split each coefficient into two inserts
                b.add_term(y, dx, c.scaled(Rat(1, 3)));
                b.add_term(y, dx, c.scaled(Rat(2, 3)));
            }
            if (!(a == b)) return std::string("reassembled element differs: ") + b.str();
        }
        return std::string();
    });
    s.check("wedge_associative", [&] {
        RandomGen g(12, d, N);
        for (int rep = 0; rep < 20; ++rep) {
            FormSection a = g.rand_section(), b = g.rand_section(), c = g.rand_section();
            if (!((a * b) * c == a * (b * c))) return std::string("associativity failed");
        }
        return std::string();
    });
    s.check("wedge_graded_commutative", [&] {
        RandomGen g(13, d, N);
        for (int rep = 0; rep < 30; ++rep) {
            FormSection a = g.rand_section(), b = g.rand_section();
            for (int qa = 0; qa <= d; ++qa)
                for (int qb = 0; qb <= d; ++qb) {
                    FormSection ah = a.ext_component(qa), bh = b.ext_component(qb);
                    FormSection lhs = ah * bh;
                    FormSection rhs = bh * ah;
                    if (parity(qa * qb) == 1) rhs = -rhs;
                    if (!(lhs == rhs)) return std::string("graded commutativity failed");
                }
        }
        return std::string();
    });
    s.check("apply_op_multilinear", [&] {
        RandomGen g(14, d, N);
        for (int rep = 0; rep < 10; ++rep) {
            FiberPolyOp p = g.rand_polyop_homog(0, 1, 2);
            FormSection a = g.rand_section(), a2 = g.rand_section(), b = g.rand_section();
            std::vector<FormSection> u{a + a2, b}, v{a, b}, w{a2, b};
            FormSection lhs = apply_op(p, u);
            FormSection rhs = apply_op(p, v) + apply_op(p, w);
            if (!(lhs == rhs)) return std::string("linearity in slot 0 failed");
        }
        return std::string();
    });
    s.check("grading_additive", [&] {
        RandomGen g(15, d, N);
        for (int rep = 0; rep < 20; ++rep) {
            FormSection a = g.rand_section(2), b = g.rand_section(2);
            FormSection prod = a * b;
            for (const auto& gr : prod.gradings()) {
                bool found = false;
                for (const auto& ga : a.gradings())
                    for (const auto& gb : b.gradings())
                        if (ga.q + gb.q == gr.q && ga.p + gb.p == gr.p) found = true;
                if (!found) return std::string("product grading outside componentwise sums");
            }
        }
        return std::string();
    });
}

void suite_brackets(Suite& s) {
    const int d = std::min(s.spec.d, 3), N = s.spec.trunc;
    s.check("schouten_graded_antisym", [&] {
        RandomGen g(21, d, N);
        for (int rep = 0; rep < 40; ++rep) {
            int qa = rep % 2, ka = rep % 3, qb = (rep / 2) % 2, kb = (rep / 3) % 3;
            FiberPolyVec a = g.rand_polyvec_homog(qa, ka - 1);
            FiberPolyVec b = g.rand_polyvec_homog(qb, kb - 1);
            if (a.zero() || b.zero()) continue;
            int ra = qa + ka - 1, rb = qb + kb - 1;
            FiberPolyVec lhs = schouten(a, b);
            FiberPolyVec rhs = schouten(b, a);
            if (parity(ra * rb) == 0) rhs = -rhs;
            if (!(lhs == rhs)) return std::string("[a,b] != -(-1)^{ra rb}[b,a]");
        }
        return std::string();
    });
    s.check("gerstenhaber_graded_antisym", [&] {
        RandomGen g(22, d, N);
        for (int rep = 0; rep < 40; ++rep) {
            int qa = rep % 2, ka = rep % 3, qb = (rep / 2) % 2, kb = (rep / 3) % 2;
            FiberPolyOp a = g.rand_polyop_homog(qa, ka - 1, 2);
            FiberPolyOp b = g.rand_polyop_homog(qb, kb - 1, 2);
            if (a.zero() || b.zero()) continue;
            int ra = qa + ka - 1, rb = qb + kb - 1;
            FiberPolyOp lhs = gerstenhaber(a, b);
            FiberPolyOp rhs = gerstenhaber(b, a);
            if (parity(ra * rb) == 0) rhs = -rhs;
            if (!(lhs == rhs)) return std::string("[a,b] != -(-1)^{ra rb}[b,a]");
        }
        return std::string();
    });
    s.check("schouten_graded_jacobi", [&] {
        RandomGen g(23, d, N);
        g.max_ydeg = 3;
        for (int rep = 0; rep < 25; ++rep) {
            FiberPolyVec a = g.rand_polyvec_homog(rep % 2, rep % 3 - 1, 2);
            FiberPolyVec b = g.rand_polyvec_homog((rep / 2) % 2, (rep + 1) % 3 - 1, 2);
            FiberPolyVec c = g.rand_polyvec_homog(0, (rep + 2) % 3 - 1, 2);
            if (a.zero() || b.zero() || c.zero()) continue;
            int ra = (rep % 2) + rep % 3 - 1, rb = ((rep / 2) % 2) + (rep + 1) % 3 - 1;
            FiberPolyVec lhs = schouten(a, schouten(b, c));
            FiberPolyVec rhs = schouten(schouten(a, b), c);
            FiberPolyVec extra = schouten(b, schouten(a, c));
            if (parity(ra * rb) == 1) extra = -extra;
            if (!(lhs == rhs + extra)) return std::string("graded Jacobi failed");
        }
        return std::string();
    });
    s.check("gerstenhaber_graded_jacobi", [&] {
        RandomGen g(24, d, N);
        g.max_ydeg = 3;
        for (int rep = 0; rep < 15; ++rep) {
            FiberPolyOp a = g.rand_polyop_homog(rep % 2, rep % 3 - 1, 1, 2);
            FiberPolyOp b = g.rand_polyop_homog((rep / 2) % 2, (rep + 1) % 3 - 1, 1, 2);
            FiberPolyOp c = g.rand_polyop_homog(0, (rep + 2) % 3 - 1, 1, 2);
            if (a.zero() || b.zero() || c.zero()) continue;
            int ra = (rep % 2) + rep % 3 - 1, rb = ((rep / 2) % 2) + (rep + 1) % 3 - 1;
            FiberPolyOp lhs = gerstenhaber(a, gerstenhaber(b, c));
            FiberPolyOp rhs = gerstenhaber(gerstenhaber(a, b), c);
            FiberPolyOp extra = gerstenhaber(b, gerstenhaber(a, c));
            if (parity(ra * rb) == 1) extra = -extra;
            if (!(lhs == rhs + extra)) return std::string("graded Jacobi failed");
        }
        return std::string();
    });
    s.check("multiplication_self_bracket", [&] {
        FiberPolyOp m = FiberPolyOp::multiplication(d, N);
        return expect_zero(gerstenhaber(m, m), "[m,m]");
    });
    s.check("hochschild_squares_to_zero", [&] {
        RandomGen g(25, d, N);
        for (int rep = 0; rep < 20; ++rep) {
            FiberPolyOp p = g.rand_polyop(2, 2);
            std::string r = expect_zero(hochschild_d(hochschild_d(p)), "dd(P)");
            if (!r.empty()) return r;
        }
        return std::string();
    });
    s.check("hochschild_derivation", [&] {
        RandomGen g(26, d, N);
        for (int rep = 0; rep < 15; ++rep) {
            int qa = rep % 2, ka = rep % 3;
            FiberPolyOp a = g.rand_polyop_homog(qa, ka - 1, 1, 2);
            FiberPolyOp b = g.rand_polyop_homog((rep / 2) % 2, (rep + 1) % 3 - 1, 1, 2);
            if (a.zero() || b.zero()) continue;
            FiberPolyOp lhs = hochschild_d(gerstenhaber(a, b));
            FiberPolyOp rhs = gerstenhaber(hochschild_d(a), b);
            FiberPolyOp extra = gerstenhaber(a, hochschild_d(b));
            if (parity(qa + ka - 1) == 1) extra = -extra;
            if (!(lhs == rhs + extra)) return std::string("derivation property failed");
        }
        return std::string();
    });
    s.check("schouten_directional_derivative", [&] {
        RandomGen g(27, d, N);
        for (int rep = 0; rep < 20; ++rep) {
            FiberPolyVec v = g.rand_polyvec_homog(0, 0, 2);
            FormSection f = g.rand_section(2).ext_component(0);
            FiberPolyVec lhs = schouten(v, FiberPolyVec::from_section(f));
            FormSection rhs = vec_action(v, f);
            if (!(lhs == FiberPolyVec::from_section(rhs)))
                return std::string("[v,f] is not the directional derivative");
        }
        return std::string();
    });
    s.check("hkr_identity_on_low_degrees", [&] {
        RandomGen g(28, d, N);
        for (int rep = 0; rep < 10; ++rep) {
            FiberPolyVec f = g.rand_polyvec_homog(1, -1, 2);
            FiberPolyVec v = g.rand_polyvec_homog(0, 0, 2);
            if (!(hkr(f) == vec_to_op(f)) || !(hkr(v) == vec_to_op(v)))
                return std::string("hkr is not the identity on degrees <= 0");
        }
        return std::string();
    });
    s.check("hkr_lands_in_cocycles", [&] {
        RandomGen g(29, d, N);
        for (int rep = 0; rep < 20; ++rep) {
            FiberPolyVec a = g.rand_polyvec(3);
            std::string r = expect_zero(hochschild_d(hkr(a)), "d(hkr a)");
            if (!r.empty()) return r;
        }
        return std::string();
    });
    s.check("hkr_defect_is_closed", [&] {
        RandomGen g(30, d, N);
        for (int rep = 0; rep < 15; ++rep) {
            FiberPolyVec a = g.rand_polyvec_homog(0, 1, 2);
            FiberPolyVec b = g.rand_polyvec_homog(0, 1, 2);
            FiberPolyOp defect = hkr(schouten(a, b)) - gerstenhaber(hkr(a), hkr(b));
            std::string r = expect_zero(hochschild_d(defect), "d(defect)");
            if (!r.empty()) return r;
        }
        return std::string();
    });
}

void suite_fedosov(Suite& s) {
    const int d = s.spec.d, N = s.spec.trunc;
    FedosovState st = solve_connection(s.spec.conn, N);

    s.check("hodge_identity", [&] {
        RandomGen g(31, d, N);
        g.max_ydeg = std::min(N, 5);
        for (int rep = 0; rep < 25; ++rep) {
            FormSection a = g.rand_section(4);
            FormSection back = sigma(a) + delta(delta_inv(a)) + delta_inv(delta(a));
            if (!(back == a)) return std::string("sections: ") + (back - a).str();
            FiberPolyVec v = g.rand_polyvec(4);
            FiberPolyVec bv = sigma(v) + delta(delta_inv(v)) + delta_inv(delta(v));
            if (!(bv == v)) return std::string("polyvectors: ") + (bv - v).str();
            FiberPolyOp p = g.rand_polyop(2, 3);
            FiberPolyOp bp = sigma(p) + delta(delta_inv(p)) + delta_inv(delta(p));
            if (!(bp == p)) return std::string("operators: ") + (bp - p).str();
        }
        return std::string();
    });
    s.check("delta_nilpotent", [&] {
        RandomGen g(32, d, N);
        for (int rep = 0; rep < 20; ++rep) {
            FormSection a = g.rand_section();
            std::string r = expect_zero(delta(delta(a)), "delta^2");
            if (!r.empty()) return r;
            r = expect_zero(delta_inv(delta_inv(a)), "delta_inv^2");
            if (!r.empty()) return r;
            r = expect_zero(sigma(delta_inv(a)), "sigma delta_inv");
            if (!r.empty()) return r;
            r = expect_zero(delta_inv(sigma(a)), "delta_inv sigma");
            if (!r.empty()) return r;
        }
        return std::string();
    });
    s.check("delta_nabla_anticommute", [&] {
        RandomGen g(33, d, N);
        for (int rep = 0; rep < 15; ++rep) {
            FormSection a = g.rand_section();
            std::string r = expect_zero(delta(nabla(a, st.conn)) + nabla(delta(a), st.conn),
                                        "delta nabla + nabla delta");
            if (!r.empty()) return r;
        }
        return std::string();
    });
    s.check("nabla_squared_is_curvature", [&] {
        RandomGen g(34, d, N);
        for (int rep = 0; rep < 10; ++rep) {
            FormSection a = g.rand_section();
            FormSection lhs = nabla(nabla(a, st.conn), st.conn);
            FormSection rhs = vec_action(st.R, a);
            if (!(lhs == rhs)) return std::string("sections: ") + (lhs - rhs).str();
            FiberPolyVec v = g.rand_polyvec(3);
            FiberPolyVec lv = nabla(nabla(v, st.conn), st.conn);
            FiberPolyVec rv = schouten(st.R, v);
            if (!(lv == rv)) return std::string("polyvectors: ") + (lv - rv).str();
            FiberPolyOp p = g.rand_polyop(1, 2);
            FiberPolyOp lp = nabla(nabla(p, st.conn), st.conn);
            FiberPolyOp rp = gerstenhaber(vec_to_op(st.R), p);
            if (!(lp == rp)) return std::string("operators: ") + (lp - rp).str();
        }
        return std::string();
    });
    s.check("bianchi_identities", [&] {
        std::string r = expect_zero(delta(st.R), "delta R");
        if (!r.empty()) return r;
        return expect_zero(nabla(st.R, st.conn), "nabla R");
    });
    s.check("flatness_residual", [&] {
        FiberPolyVec res = delta(st.A) - st.R - nabla(st.A, st.conn) -
                           schouten(st.A, st.A).scaled(Rat(1, 2));
        return expect_zero(res.y_truncated(st.flat_valid_to), "residual");
    });
    s.check("fedosov_d_squared", [&] {
        RandomGen g(35, d, N);
        for (int rep = 0; rep < 10; ++rep) {
            FormSection a = g.rand_section(3);
            FormSection dd = fedosov_d(fedosov_d(a, st), st);
            std::string r =
                expect_zero(dd.y_truncated(vmin(dd.valid_to(), st.flat_valid_to)), "D^2 a");
            if (!r.empty()) return r;
            FiberPolyVec v = g.rand_polyvec(3);
            FiberPolyVec dv = fedosov_d(fedosov_d(v, st), st);
            r = expect_zero(dv.y_truncated(vmin(dv.valid_to(), st.flat_valid_to)), "D^2 v");
            if (!r.empty()) return r;
            FiberPolyOp p = g.rand_polyop(1, 2);
            FiberPolyOp dp = fedosov_d(fedosov_d(p, st), st);
            r = expect_zero(dp.y_truncated(vmin(dp.valid_to(), st.flat_valid_to)), "D^2 P");
            if (!r.empty()) return r;
        }
        return std::string();
    });
    s.check("multiplication_is_d_closed", [&] {
        FiberPolyOp m = FiberPolyOp::multiplication(d, N);
        FiberPolyOp dm = fedosov_d(m, st);
        return expect_zero(dm.y_truncated(vmin(dm.valid_to(), st.flat_valid_to)), "D m");
    });
}

void suite_resolution(Suite& s) {
    const int d = s.spec.d, N = s.spec.trunc;
    FedosovState st = solve_connection(s.spec.conn, N);
    const int pd = std::min(s.spec.probe_degree, 4);

    s.check("sigma_tau_identity", [&] {
        for (const auto& f : monomials_upto(d, pd)) {
            FormSection t = tau_lift_fn(f, st);
            if (!(scalar_part(sigma(t)) == f))
                return std::string("sigma(tau f) != f for f = ") + f.str();
        }
        return std::string();
    });
    s.check("tau_lands_in_kernel", [&] {
        for (const auto& f : monomials_upto(d, pd)) {
            FormSection t = tau_lift_fn(f, st);
            FormSection dt = fedosov_d(t, st);
            std::string r =
                expect_zero(dt.y_truncated(vmin(dt.valid_to(), st.flat_valid_to)),
                            "D tau(" + f.str() + ")");
            if (!r.empty()) return r;
        }
        return std::string();
    });
    s.check("tau_linear_term_is_gradient", [&] {
        for (const auto& f : monomials_upto(d, pd)) {
            FormSection t = tau_lift_fn(f, st);
            FormSection lin = t.component(1, 0);
            FormSection expect(d, N);
            for (int i = 1; i <= d; ++i) {
                YIndex e = yzero(d);
                e[static_cast<std::size_t>(i - 1)] = 1;
                expect.add_term(e, 0, f.dx(i));
            }
            if (!(lin == expect)) return std::string("linear term wrong for ") + f.str();
        }
        return std::string();
    });
    s.check("solve_exact_roundtrip", [&] {
        RandomGen g(41, d, N);
        g.max_ydeg = std::min(N - 1, 4);
        for (int rep = 0; rep < 10; ++rep) {
            FormSection c = g.rand_section(3);
            FormSection a = fedosov_d(c, st);
            if (a.zero()) continue;
            FormSection b = solve_exact(a, st);
            FormSection db = fedosov_d(b, st);
            int bound = vmin(vmin(db.valid_to(), a.valid_to()), st.flat_valid_to);
            if (!((db - a).y_truncated(bound).zero()))
                return std::string("D b != a: ") + (db - a).y_truncated(bound).str();
            std::string r = expect_zero(sigma(b), "sigma b");
            if (!r.empty()) return r;
            r = expect_zero(delta_inv(b), "delta_inv b");
            if (!r.empty()) return r;
        }
        return std::string();
    });
    s.check("mu_of_multiplication", [&] {
        FiberPolyOp m = FiberPolyOp::multiplication(d, N);
        FiberPolyOp m0 = FiberPolyOp::multiplication(d, kInf, Family::base);
        if (!(mu_project(m, st) == m0)) return std::string("mu(m) != m0");
        return std::string();
    });
    s.check("mu_sigma_multiplicative", [&] {
        // tau-lifted base operators are D-closed; mu o sigma must take
        // composition to composition.
        std::vector<FiberPolyOp> bases;
        {
            FiberPolyOp p1(d, kInf, Family::base);
            YIndex e1 = yzero(d);
            e1[0] = 1;
            p1.add_term(yzero(d), 0, {e1}, CoeffPoly(d, 1));
            bases.push_back(p1); // d/dx1
            FiberPolyOp p2(d, kInf, Family::base);
            p2.add_term(yzero(d), 0, {e1}, xmono(d, e1)); // x1 d/dx1
            bases.push_back(p2);
            FiberPolyOp p3(d, kInf, Family::base);
            YIndex e2 = yzero(d);
            e2[static_cast<std::size_t>(d - 1)] = 1;
            p3.add_term(yzero(d), 0, {yadd(e1, e2)}, xmono(d, e2));
            bases.push_back(p3); // x_d d^2/dx1 dx_d
        }
        for (const auto& pa : bases)
            for (const auto& pb : bases) {
                FiberPolyOp fa = tau_lift(op_fiberize(pa, N), st);
                FiberPolyOp fb = tau_lift(op_fiberize(pb, N), st);
                FiberPolyOp lhs = mu_project(compose_ops(fa, fb), st);
                FiberPolyOp rhs = compose_ops(mu_project(fa, st), mu_project(fb, st));
                if (!(lhs == rhs)) return std::string("mu sigma not multiplicative");
            }
        return std::string();
    });
    s.check("mu_sigma_tau_identity_on_polyvectors", [&] {
        RandomGen g(42, d, N);
        for (int rep = 0; rep < 8; ++rep) {
            FiberPolyVec base(d, kInf, Family::base);
            for (int t = 0; t < 2; ++t)
                base.add_term(yzero(d), 0, g.rand_mask(2), g.rand_coeff_poly());
            FiberPolyVec lifted = tau_lift(fiberize(base, N), st);
            FiberPolyVec back = mu_project_vec(lifted, st);
            if (!(back == base)) return std::string("mu sigma tau != id: ") + back.str();
        }
        return std::string();
    });
}

void suite_linfinity(Suite& s) {
    const int d = std::min(s.spec.d, 3), N = s.spec.trunc;
    LinfMorphism F = assemble_fiber_morphism(2, d, N);

    auto rand_biv = [](RandomGen& g) {
        FiberPolyVec v = g.rand_polyvec_homog(0, 1, 2);
        return v;
    };

    s.check("defect_arity1_zero", [&] {
        RandomGen g(51, d, N);
        for (int rep = 0; rep < 15; ++rep) {
            FiberPolyVec v = g.rand_polyvec_homog(rep % 3, (rep % 4) - 1, 3);
            if (v.zero()) continue;
            std::vector<GradedValue> args{GradedValue(v)};
            GradedValue def = linf_defect(F, 1, args);
            if (!gv_zero(def)) return std::string("arity-1 defect: ") + gv_str(def);
        }
        return std::string();
    });
    s.check("defect_arity2_zero", [&] {
        RandomGen g(52, d, N);
        for (int rep = 0; rep < 10; ++rep) {
            FiberPolyVec b1 = rand_biv(g), b2 = rand_biv(g);
            if (b1.zero() || b2.zero()) continue;
            std::vector<GradedValue> args{GradedValue(b1), GradedValue(b2)};
            GradedValue def = linf_defect(F, 2, args);
            if (!gv_zero(def)) return std::string("arity-2 defect: ") + gv_str(def);
            FiberPolyVec v = g.rand_polyvec_homog(0, 0, 2);
            if (v.zero()) continue;
            std::vector<GradedValue> args2{GradedValue(v), GradedValue(b2)};
            GradedValue def2 = linf_defect(F, 2, args2);
            if (!gv_zero(def2)) return std::string("(vector, bivector) defect: ") + gv_str(def2);
        }
        return std::string();
    });
    s.check("rhs_dhom_closed", [&] {
        RandomGen g(53, d, N);
        for (int n = 2; n <= 3; ++n) {
            PolyMap rhs = [&F, n](std::span<const GradedValue> a) {
                return linf_rhs(F, n, a);
            };
            PolyMap closed = d_hom(rhs, n, 2 - n, F.source, F.target);
            for (int rep = 0; rep < 6; ++rep) {
                std::vector<GradedValue> args;
                for (int i = 0; i < n; ++i) {
                    FiberPolyVec v = g.rand_polyvec_homog(rep % 2, (rep + i) % 2, 2);
                    if (v.zero()) v = rand_biv(g);
                    if (v.zero()) break;
                    args.emplace_back(v);
                }
                if (static_cast<int>(args.size()) < n) continue;
                GradedValue val = closed(args);
                if (!gv_zero(val))
                    return std::string("d_hom of the bracket side is nonzero at arity ") +
                           std::to_string(n) + ": " + gv_str(val);
            }
        }
        return std::string();
    });
    s.check("shift_preserves_defects", [&] {
        RandomGen g(54, d, N);
        PolyMap v1 = [](std::span<const GradedValue> a) -> GradedValue {
            return delta_inv(hkr(gv_vec(a[0]))).scaled(Rat(3, 7));
        };
        LinfMorphism shifted = shift_morphism(F, 1, v1);
        for (int rep = 0; rep < 6; ++rep) {
            FiberPolyVec b1 = rand_biv(g), b2 = rand_biv(g);
            if (b1.zero() || b2.zero()) continue;
            std::vector<GradedValue> a1{GradedValue(b1)};
            GradedValue d1 = linf_defect(shifted, 1, a1);
            if (!gv_zero(d1)) return std::string("shifted arity-1 defect: ") + gv_str(d1);
            std::vector<GradedValue> a2{GradedValue(b1), GradedValue(b2)};
            GradedValue d2v = linf_defect(shifted, 2, a2);
            if (!gv_zero(d2v)) return std::string("shifted arity-2 defect: ") + gv_str(d2v);
        }
        return std::string();
    });
    s.check("twist_by_zero_is_identity", [&] {
        RandomGen g(55, d, N);
        MaurerCartanElement z_src{GradedValue(FiberPolyVec(d, N)), d};
        MaurerCartanElement z_tgt{GradedValue(FiberPolyOp(d, N)), d};
        LinfMorphism tw = twist(F, z_src, z_tgt);
        for (int rep = 0; rep < 6; ++rep) {
            FiberPolyVec b = rand_biv(g);
            if (b.zero()) continue;
            std::vector<GradedValue> a1{GradedValue(b)};
            if (!gv_equal(eval_map(tw, 1, a1), eval_map(F, 1, a1)))
                return std::string("twist by zero changed the arity-1 map");
        }
        return std::string();
    });
    s.check("b_wedge_power_vanishes", [&] {
        FedosovState st = solve_connection(s.spec.conn, N);
        FiberPolyVec b = fedosov_b(st);
        FiberPolyVec w = b;
        for (int i = 1; i <= s.spec.d; ++i) w = w * b;
        return expect_zero(w, "B^(d+1)");
    });
    s.check("vanishing_on_vector_fields", [&] {
        RandomGen g(56, d, N);
        for (int rep = 0; rep < 30; ++rep) {
            FiberPolyVec v1 = g.rand_polyvec_homog(0, 0, 2);
            FiberPolyVec v2 = g.rand_polyvec_homog(0, 0, 2);
            if (v1.zero() || v2.zero()) continue;
            std::string r = expect_zero(u2(v1, v2), "u2(v1, v2)");
            if (!r.empty()) return r;
            FiberPolyVec b2 = rand_biv(g);
            if (b2.zero()) continue;
            r = expect_zero(u2(v1, b2), "u2(v, bivector)");
            if (!r.empty()) return r;
        }
        return std::string();
    });
    s.check("capacity_errors_are_loud", [&] {
        try {
            assemble_fiber_morphism(3, d, N);
            return std::string("arity cap 3 was accepted");
        } catch (const CapacityError&) {
        }
        try {
            std::vector<GradedValue> args{GradedValue(FiberPolyVec(d, N)),
                                          GradedValue(FiberPolyVec(d, N)),
                                          GradedValue(FiberPolyVec(d, N))};
            // nonzero arguments required to reach the cap check
            RandomGen g(57, d, N);
            for (auto& a : args) a = GradedValue(g.rand_polyvec_homog(0, 1, 2));
            eval_map(F, 3, args);
            return std::string("arity-3 evaluation was accepted");
        } catch (const CapacityError&) {
        }
        return std::string();
    });
}

void suite_kontsevich(Suite& s) {
    const int d = std::min(s.spec.d, 3), N = s.spec.trunc;
    s.check("weight_table_solves", [&] {
        const WeightTable& wt = WeightTable::solved();
        if (wt.weights.empty()) return std::string("empty weight table");
        bool nonzero = false;
        for (const auto& w : wt.weights) nonzero = nonzero || !is_zero(w);
        return nonzero ? std::string() : std::string("all weights vanish");
    });
    s.check("weight_table_roundtrip", [&] {
        const WeightTable& wt = WeightTable::solved();
        WeightTable back = WeightTable::deserialize(wt.serialize());
        if (back.serialize() != wt.serialize()) return std::string("serialization not stable");
        return std::string();
    });
    s.check("linear_equivariance", [&] {
        RandomGen g(61, d, N);
        // a handful of exactly invertible linear maps
        std::vector<AffineMap> gs;
        {
            AffineMap a = AffineMap::identity(d);
            a.m[0][0] = 2;
            gs.push_back(a);
            AffineMap b = AffineMap::identity(d);
            b.m[0][static_cast<std::size_t>(d - 1)] = 1;
            gs.push_back(b);
            AffineMap c = AffineMap::identity(d);
            c.m[0][0] = 0;
            c.m[0][static_cast<std::size_t>(d - 1)] = -1;
            c.m[static_cast<std::size_t>(d - 1)][0] = 1;
            c.m[static_cast<std::size_t>(d - 1)][static_cast<std::size_t>(d - 1)] = 0;
            gs.push_back(c);
        }
        for (const auto& gmap : gs) {
            for (int rep = 0; rep < 6; ++rep) {
                FiberPolyVec v = g.rand_polyvec_homog(0, 1, 2);
                if (v.zero()) continue;
                if (!(act(gmap, u1(v)) == u1(act(gmap, v))))
                    return std::string("u1 not equivariant");
                FiberPolyVec w = g.rand_polyvec_homog(0, 1, 2);
                if (w.zero()) continue;
                if (!(act(gmap, u2(v, w)) == u2(act(gmap, v), act(gmap, w))))
                    return std::string("u2 not equivariant");
            }
        }
        return std::string();
    });
    s.check("u2_moyal_shape_on_constant_bivector", [&] {
        // On a constant bivector the solved weights must reproduce the
        // second-order product shape forced by associativity.
        const int dd = 2;
        FiberPolyVec alpha(dd, N);
        alpha.add_term(yzero(dd), 0, mask_bit(1) | mask_bit(2), CoeffPoly(dd, 1));
        FiberPolyOp val = u2(alpha, alpha);
        // second derivative slots only
        for (const auto& [k, c] : val.terms()) {
            if (k.slots.size() != 2) return std::string("u2 value is not bidifferential");
            if (ydeg(k.slots[0]) != 2 || ydeg(k.slots[1]) != 2)
                return std::string("unexpected slot orders on constant input: ") + val.str();
        }
        if (val.zero()) return std::string("u2 vanishes on the constant bivector");
        return std::string();
    });
}

void suite_equivariance(Suite& s) {
    const int d = s.spec.d, N = s.spec.trunc;
    AffineAction G = s.spec.group_gens ? s.spec.group()
                                       : AffineAction::from_generators(d, [&] {
                                             AffineMap m = AffineMap::identity(d);
                                             for (int i = 0; i < d; ++i)
                                                 m.m[static_cast<std::size_t>(i)]
                                                    [static_cast<std::size_t>(i)] = -1;
                                             return std::vector<AffineMap>{m};
                                         }());
    s.check("group_closure_valid", [&] {
        for (const auto& g : G.elements) {
            AffineMap gi = g.inverse();
            bool found = false;
            for (const auto& h : G.elements) found = found || h == gi;
            if (!found) return std::string("inverse missing from closure");
        }
        return std::string();
    });
    s.check("action_axioms", [&] {
        RandomGen r(71, d, N);
        AffineMap e = AffineMap::identity(d);
        for (int rep = 0; rep < 5; ++rep) {
            FiberPolyVec v = r.rand_polyvec(3);
            if (!(act(e, v) == v)) return std::string("identity acts nontrivially");
            for (std::size_t i = 0; i < G.elements.size(); ++i)
                for (std::size_t j = 0; j < G.elements.size(); ++j) {
                    const auto& g = G.elements[i];
                    const auto& h = G.elements[j];
                    FiberPolyVec lhs = act(g, act(h, v));
                    FiberPolyVec rhs = act(g.compose(h), v);
                    if (!(lhs == rhs)) return std::string("composition law failed");
                }
        }
        return std::string();
    });
    s.check("action_commutes_with_resolution_operators", [&] {
        RandomGen r(72, d, N);
        for (int rep = 0; rep < 6; ++rep) {
            FormSection a = r.rand_section(3);
            for (const auto& g : G.elements) {
                if (!(act(g, delta(a)) == delta(act(g, a))))
                    return std::string("delta does not commute");
                if (!(act(g, delta_inv(a)) == delta_inv(act(g, a))))
                    return std::string("delta_inv does not commute");
                if (!(act(g, sigma(a)) == sigma(act(g, a))))
                    return std::string("sigma does not commute");
            }
        }
        return std::string();
    });
    s.check("averaging_produces_invariant_connection", [&] {
        ConnectionData avg = average_connection(G, s.spec.conn);
        if (invariance_violation(G, avg)) return std::string("average is not invariant");
        ConnectionData again = average_connection(G, avg);
        for (int k = 1; k <= d; ++k)
            for (int i = 1; i <= d; ++i)
                for (int j = i; j <= d; ++j)
                    if (!(again.get(k, i, j) == avg.get(k, i, j)))
                        return std::string("averaging is not idempotent");
        return std::string();
    });
    s.check("invariant_connection_fixes_A", [&] {
        ConnectionData avg = average_connection(G, s.spec.conn);
        FedosovState st = solve_connection(avg, N);
        for (const auto& g : G.elements)
            if (!(act(g, st.A) == st.A)) return std::string("A moves under the action");
        return std::string();
    });
    s.check("christoffel_law_difference_is_linear", [&] {
        for (const auto& g : G.elements) {
            FiberPolyVec tensor = act(g, christoffel_vec(s.spec.conn, N));
            FiberPolyVec connlaw = christoffel_vec(act(g, s.spec.conn), N);
            FiberPolyVec diff = tensor - connlaw;
            if (diff.max_y_degree() > 1)
                return std::string("difference is not linear in the fiber variables");
        }
        return std::string();
    });
}

void suite_star(Suite& s) {
    s.check("star_product_builds", [&]() -> std::string {
        if (!s.spec.has_poisson()) return std::string(); // nothing to build
        if (s.spec.hbar_order > 2) return std::string();
        try {
            StarProduct star = build_star_product(s.spec);
            if (star.c.empty()) return std::string("no coefficient tables");
        } catch (const CapacityError& e) {
            // a loud capacity boundary is a valid outcome, not a failure
            s.out.push_back({"star_capacity_boundary", true, e.what()});
        }
        return std::string();
    });
    s.check("star_product_deterministic", [&]() -> std::string {
        if (!s.spec.has_poisson() || s.spec.hbar_order > 2) return std::string();
        try {
            StarProduct a = build_star_product(s.spec);
            StarProduct b = build_star_product(s.spec);
            for (std::size_t i = 0; i < a.c.size(); ++i)
                if (!(a.c[i] == b.c[i])) return std::string("rebuild differs");
        } catch (const CapacityError&) {
        }
        return std::string();
    });
}

} // namespace

std::vector<std::string> suite_names() {
    return {"graded_core", "brackets", "fedosov", "resolution",
            "linfinity",  "kontsevich", "equivariance", "star", "all"};
}

std::vector<IdentityResult> run_identity_suite(const ManifoldSpec& spec,
                                               const std::string& suite) {
    Suite s{spec, {}};
    bool known = false;
    auto want = [&](const char* name) {
        if (suite == name || suite == "all") {
            known = true;
            return true;
        }
        known = known || suite == name;
        return false;
    };
    if (want("graded_core")) suite_graded_core(s);
    if (want("brackets")) suite_brackets(s);
    if (want("fedosov")) suite_fedosov(s);
    if (want("resolution")) suite_resolution(s);
    if (want("linfinity")) suite_linfinity(s);
    if (want("kontsevich")) suite_kontsevich(s);
    if (want("equivariance")) suite_equivariance(s);
    if (want("star")) suite_star(s);
    if (suite == "all") known = true;
    if (!known) {
        auto names = suite_names();
        std::string all;
        for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
        throw ValidationError("unknown suite '" + suite + "'; available: " + all);
    }
    return s.out;
}

bool all_passed(const std::vector<IdentityResult>& rs) {
    for (const auto& r : rs)
        if (!r.pass) return false;
    return true;
}

} // namespace defq
