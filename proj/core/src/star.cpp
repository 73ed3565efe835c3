#include "defq/star.hpp"

#include <sstream>

#include "defq/errors.hpp"

namespace defq {

FiberPolyOp StarProduct::combined() const {
    FiberPolyOp s(d, kInf, Family::base);
    for (std::size_t n = 0; n < c.size(); ++n) {
        CoeffPoly h = CoeffPoly::hbar(d, static_cast<int>(n));
        for (const auto& [k, cc] : c[n].terms()) s.add_term(k.y, k.dx, k.slots, cc * h);
    }
    return s;
}

CoeffPoly StarProduct::apply(const CoeffPoly& f, const CoeffPoly& g) const {
    std::vector<CoeffPoly> args{f, g};
    return apply_base_op(combined(), args, hbar_order);
}

namespace {

FiberPolyOp transpose2(const FiberPolyOp& op) {
    FiberPolyOp r(op.dim(), op.trunc(), op.family());
    for (const auto& [k, c] : op.terms()) {
        if (k.slots.size() != 2) throw InternalError("transpose2 expects bidifferential terms");
        r.add_term(k.y, k.dx, {k.slots[1], k.slots[0]}, c);
    }
    return r;
}

FiberPolyOp poisson_op(const ManifoldSpec& spec) {
    const int d = spec.d;
    FiberPolyOp p(d, kInf, Family::base);
    for (const auto& [ij, cc] : spec.poisson) {
        YIndex ei = yzero(d), ej = yzero(d);
        ei[static_cast<std::size_t>(ij.first - 1)] = 1;
        ej[static_cast<std::size_t>(ij.second - 1)] = 1;
        p.add_term(yzero(d), 0, {ei, ej}, cc);
        p.add_term(yzero(d), 0, {ej, ei}, -cc);
    }
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
                CoeffPoly m(static_cast<int>(idx.size()));
                m.add_term(idx, 0, 1);
                out.push_back(std::move(m));
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

} // namespace

PipelineArtifacts build_pipeline(const ManifoldSpec& spec) {
    PipelineArtifacts art;
    art.st = solve_connection(spec.conn, spec.trunc);
    if (spec.group_gens) {
        AffineAction G = spec.group();
        if (auto bad = invariance_violation(G, spec.conn)) {
            std::ostringstream os;
            os << "connection is not invariant under group element #" << *bad;
            throw ValidationError(os.str());
        }
    }
    // the order-2 structure map must be available even for first-order
    // runs: the twist tail consults it (and the vanishing gauge) on the
    // connection form
    art.arity_cap = std::min(2, std::max(1, spec.hbar_order));
    LinfMorphism uf = assemble_fiber_morphism(2, spec.d, spec.trunc);
    FiberPolyVec b = fedosov_b(art.st);
    MaurerCartanElement b_src{GradedValue(b), spec.d};
    MaurerCartanElement b_tgt{GradedValue(vec_to_op(b)), spec.d};
    LinfMorphism tw = twist(uf, b_src, b_tgt);
    // target differential of the pipeline morphism: D + hochschild
    LinfMorphism composed = compose_with_tau(tw, art.st);
    art.probes = std::make_shared<const ProbeBasis>(
        ProbeBasis::standard(spec.d, spec.probe_degree));
    art.contracted = contract_to_fiber_zero(composed, art.st, art.probes, art.arity_cap);
    return art;
}

StarProduct build_star_product(const ManifoldSpec& spec) {
    if (spec.hbar_order > 2)
        throw CapacityError("hbar orders above 2 exceed the implemented structure maps");
    if (!spec.has_poisson())
        throw ValidationError("star product synthesis requires a poisson table");
    FiberPolyVec alpha = spec.poisson_vec();
    FiberPolyVec sn = schouten(alpha, alpha);
    if (!sn.zero())
        throw ValidationError("poisson table fails [alpha, alpha] = 0; offending component: " +
                              sn.str());

    StarProduct star;
    star.d = spec.d;
    star.hbar_order = spec.hbar_order;
    star.c.push_back(FiberPolyOp::multiplication(spec.d, kInf, Family::base));
    if (spec.hbar_order >= 1) {
        PipelineArtifacts art = build_pipeline(spec);
        std::vector<GradedValue> a1{GradedValue(alpha)};
        GradedValue u1v = eval_map(art.contracted, 1, a1);
        star.c.push_back(mu_project(gv_op(u1v), art.st));
        if (spec.hbar_order >= 2) {
            std::vector<GradedValue> a2{GradedValue(alpha), GradedValue(alpha)};
            GradedValue u2v = eval_map(art.contracted, 2, a2);
            star.c.push_back(mu_project(gv_op(u2v), art.st).scaled(Rat(1, 2)));
        }

        // first-order condition: the antisymmetrization of c1 is the
        // Poisson bracket
        FiberPolyOp anti = star.c[1] - transpose2(star.c[1]);
        if (!(anti == poisson_op(spec)))
            throw InternalError("first-order condition failed: " + anti.str());

        // associativity modulo hbar^{order+1} on monomial probes
        FiberPolyOp s = star.combined();
        std::vector<CoeffPoly> probes = monomials_upto(spec.d, spec.probe_degree);
        for (const auto& f : probes)
            for (const auto& g : probes)
                for (const auto& h : probes) {
                    std::vector<CoeffPoly> fg{f, g}, gh{g, h};
                    CoeffPoly left = apply_base_op(s, fg, spec.hbar_order);
                    CoeffPoly right = apply_base_op(s, gh, spec.hbar_order);
                    std::vector<CoeffPoly> lh{left, h}, fr{f, right};
                    CoeffPoly assoc = apply_base_op(s, lh, spec.hbar_order) -
                                      apply_base_op(s, fr, spec.hbar_order);
                    if (!assoc.zero())
                        throw InternalError("associativity failed on (" + f.str() + ", " +
                                            g.str() + ", " + h.str() + "): " + assoc.str());
                }
    }
    return star;
}

std::vector<CheckResult> check_equivariance(const ManifoldSpec& spec) {
    std::vector<CheckResult> out;
    if (!spec.group_gens)
        throw ValidationError("equivariance checks need a group in the spec");
    AffineAction G = spec.group();
    if (auto bad = invariance_violation(G, spec.conn)) {
        std::ostringstream os;
        os << "connection is not invariant under group element #" << *bad;
        throw ValidationError(os.str());
    }

    PipelineArtifacts art = build_pipeline(spec);

    {
        bool pass = true;
        std::string detail;
        for (const auto& g : G.elements) {
            FiberPolyVec moved = act(g, art.st.A);
            if (!(moved == art.st.A)) {
                pass = false;
                detail = "A moves under a group element";
                break;
            }
        }
        out.push_back({"invariance_of_A", pass, detail});
    }
    {
        bool pass = true;
        std::string detail;
        std::vector<CoeffPoly> fs = monomials_upto(spec.d, std::min(spec.probe_degree, 3));
        for (const auto& g : G.elements) {
            for (const auto& f : fs) {
                FormSection lhs = act(g, tau_lift_fn(f, art.st));
                FormSection rhs = tau_lift_fn(act(g, f), art.st);
                if (!(lhs == rhs)) {
                    pass = false;
                    detail = "tau does not commute with the action on " + f.str();
                    break;
                }
            }
            if (!pass) break;
        }
        out.push_back({"tau_equivariance", pass, detail});
    }
    {
        bool pass = true;
        std::string detail;
        // probe polyvectors: coordinate vector fields and bivector monomials
        std::vector<FiberPolyVec> pv;
        for (Mask dy = 1; dy < (Mask{1} << spec.d); ++dy) {
            if (mask_count(dy) > 2) continue;
            FiberPolyVec v(spec.d, kInf, Family::base);
            v.add_term(yzero(spec.d), 0, dy, CoeffPoly(spec.d, 1));
            pv.push_back(v);
            FiberPolyVec w(spec.d, kInf, Family::base);
            YIndex e1 = yzero(spec.d);
            e1[0] = 1;
            CoeffPoly x1(spec.d);
            x1.add_term(e1, 0, 1);
            w.add_term(yzero(spec.d), 0, dy, x1);
            pv.push_back(w);
        }
        for (const auto& g : G.elements) {
            for (const auto& v : pv) {
                std::vector<GradedValue> a1{GradedValue(v)};
                GradedValue val = eval_map(art.contracted, 1, a1);
                std::vector<GradedValue> a2{GradedValue(act(g, v))};
                GradedValue val2 = eval_map(art.contracted, 1, a2);
                GradedValue moved = act(g, gv_op(val));
                if (!gv_equal(moved, val2)) {
                    pass = false;
                    detail = "arity-1 map is not equivariant on " + v.str();
                    break;
                }
            }
            if (!pass) break;
        }
        if (pass && art.arity_cap >= 2 && spec.has_poisson()) {
            FiberPolyVec alpha = spec.poisson_vec();
            for (const auto& g : G.elements) {
                std::vector<GradedValue> a2{GradedValue(alpha), GradedValue(alpha)};
                GradedValue val = eval_map(art.contracted, 2, a2);
                std::vector<GradedValue> b2{GradedValue(act(g, alpha)), GradedValue(act(g, alpha))};
                GradedValue val2 = eval_map(art.contracted, 2, b2);
                if (!gv_equal(act(g, gv_op(val)), val2)) {
                    pass = false;
                    detail = "arity-2 map is not equivariant on the poisson bivector";
                    break;
                }
            }
        }
        out.push_back({"morphism_equivariance", pass, detail});
    }
    if (spec.has_poisson() && spec.hbar_order >= 1) {
        bool pass = true;
        std::string detail;
        FiberPolyVec alpha = spec.poisson_vec();
        bool alpha_invariant = true;
        for (const auto& g : G.elements)
            if (!(act(g, alpha) == alpha)) alpha_invariant = false;
        if (alpha_invariant) {
            StarProduct star = build_star_product(spec);
            std::vector<CoeffPoly> fs = monomials_upto(spec.d, std::min(spec.probe_degree, 3));
            for (const auto& g : G.elements) {
                for (const auto& f : fs) {
                    for (const auto& h : fs) {
                        CoeffPoly lhs = act(g, star.apply(f, h));
                        CoeffPoly rhs = star.apply(act(g, f), act(g, h));
                        if (!(lhs == rhs)) {
                            pass = false;
                            detail = "star product moves under the action";
                            break;
                        }
                    }
                    if (!pass) break;
                }
                if (!pass) break;
            }
            out.push_back({"star_invariance", pass, detail});
        } else {
            out.push_back({"star_invariance", true, "skipped: poisson table not invariant"});
        }
    }
    return out;
}

} // namespace defq
