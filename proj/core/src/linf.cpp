#include "defq/linf.hpp"

#include <algorithm>
#include <map>

#include "defq/errors.hpp"

namespace defq {

// ---------------------------------------------------------------------------
// GradedValue plumbing

bool gv_zero(const GradedValue& v) {
    return std::visit([](const auto& x) { return x.zero(); }, v);
}

int gv_total_degree(const GradedValue& v) {
    if (gv_zero(v)) throw InternalError("degree of a zero value is undefined");
    auto gr = std::visit([](const auto& x) { return x.gradings(); }, v);
    int r = gr.begin()->q + gr.begin()->k;
    for (const auto& g : gr)
        if (g.q + g.k != r) throw ValidationError("value is not homogeneous in total degree");
    return r;
}

GradedValue gv_add(const GradedValue& a, const GradedValue& b) {
    if (a.index() != b.index()) throw ValidationError("cannot add values of different kinds");
    if (std::holds_alternative<FiberPolyVec>(a))
        return std::get<FiberPolyVec>(a) + std::get<FiberPolyVec>(b);
    return std::get<FiberPolyOp>(a) + std::get<FiberPolyOp>(b);
}

GradedValue gv_scale(const GradedValue& a, const Rat& c) {
    return std::visit([&](const auto& x) -> GradedValue { return x.scaled(c); }, a);
}

GradedValue gv_neg(const GradedValue& a) { return gv_scale(a, -1); }

bool gv_equal(const GradedValue& a, const GradedValue& b) {
    if (a.index() != b.index()) return false;
    if (std::holds_alternative<FiberPolyVec>(a))
        return std::get<FiberPolyVec>(a) == std::get<FiberPolyVec>(b);
    return std::get<FiberPolyOp>(a) == std::get<FiberPolyOp>(b);
}

std::string gv_str(const GradedValue& v) {
    return std::visit([](const auto& x) { return x.str(); }, v);
}

const FiberPolyVec& gv_vec(const GradedValue& v) {
    if (!std::holds_alternative<FiberPolyVec>(v))
        throw ValidationError("expected a polyvector value");
    return std::get<FiberPolyVec>(v);
}

const FiberPolyOp& gv_op(const GradedValue& v) {
    if (!std::holds_alternative<FiberPolyOp>(v))
        throw ValidationError("expected an operator value");
    return std::get<FiberPolyOp>(v);
}

GradedValue gv_bracket(const GradedValue& a, const GradedValue& b) {
    if (std::holds_alternative<FiberPolyVec>(a) && std::holds_alternative<FiberPolyVec>(b))
        return schouten(std::get<FiberPolyVec>(a), std::get<FiberPolyVec>(b));
    if (std::holds_alternative<FiberPolyOp>(a) && std::holds_alternative<FiberPolyOp>(b))
        return gerstenhaber(std::get<FiberPolyOp>(a), std::get<FiberPolyOp>(b));
    if (std::holds_alternative<FiberPolyVec>(a))
        return gerstenhaber(vec_to_op(std::get<FiberPolyVec>(a)), std::get<FiberPolyOp>(b));
    return gerstenhaber(std::get<FiberPolyOp>(a), vec_to_op(std::get<FiberPolyVec>(b)));
}

GradedValue DglaHandle::d(const GradedValue& x) const {
    if (!diff) throw InternalError("zero differential invoked");
    return diff(x);
}

GradedValue LinfMorphism::zero_target() const { return FiberPolyOp(dim, trunc); }
GradedValue LinfMorphism::zero_source() const { return FiberPolyVec(dim, trunc); }

namespace {

int gv_min_ext(const GradedValue& v) {
    return std::visit([](const auto& x) { return x.min_ext_degree(); }, v);
}

// (-1)^e as an int
int pow_sign(long e) { return (e % 2 == 0) ? 1 : -1; }

// Decalage sign e_n(k_1..k_n) = (-1)^{sum (n-i) k_i}.
int en_sign(const std::vector<int>& ks) {
    long e = 0;
    const int n = static_cast<int>(ks.size());
    for (int i = 0; i < n; ++i) e += static_cast<long>(n - 1 - i) * ks[static_cast<std::size_t>(i)];
    return pow_sign(e);
}

// Koszul sign (suspended degrees) of the unshuffle moving the subset I (as
// a bitmask over positions) to the front, preserving internal orders.
int unshuffle_sign(unsigned mask, const std::vector<int>& abar) {
    long e = 0;
    const int n = static_cast<int>(abar.size());
    for (int i = 0; i < n; ++i) {
        if (!(mask & (1u << i))) continue;
        for (int j = 0; j < i; ++j)
            if (!(mask & (1u << j)))
                e += static_cast<long>(abar[static_cast<std::size_t>(i)]) *
                     abar[static_cast<std::size_t>(j)];
    }
    return pow_sign(e);
}

// Operator-crossing sign of an odd map applied at position i.
int cross_sign(int i, const std::vector<int>& abar) {
    long e = 0;
    for (int j = 0; j < i; ++j) e += abar[static_cast<std::size_t>(j)];
    return pow_sign(e);
}

struct Acc {
    GradedValue v;
    explicit Acc(GradedValue zero) : v(std::move(zero)) {}
    void add(const GradedValue& x, const Rat& c) {
        if (gv_zero(x) || is_zero(c)) return;
        v = gv_add(v, gv_scale(x, c));
    }
};

std::vector<int> tuple_degrees(std::span<const GradedValue> args) {
    std::vector<int> ks;
    ks.reserve(args.size());
    for (const auto& a : args) ks.push_back(gv_total_degree(a));
    return ks;
}

} // namespace

GradedValue eval_map(const LinfMorphism& F, int n, std::span<const GradedValue> args) {
    if (n < 1) throw ValidationError("arity must be positive");
    for (const auto& a : args)
        if (gv_zero(a)) return F.zero_target();
    if (F.known_zero && F.known_zero(args)) return F.zero_target();
    if (n > F.arity_cap)
        throw CapacityError("structure map of arity " + std::to_string(n) +
                            " requested, cap is " + std::to_string(F.arity_cap));
    return F.maps[static_cast<std::size_t>(n - 1)](args);
}

namespace {

// The four suspended pieces of the structure equation; defect = -e_n * sum,
// rhs (the bracket side) = +e_n * (pair-bracket pieces).
void defect_terms(const LinfMorphism& F, int n, std::span<const GradedValue> args,
                  bool bracket_terms_only, Acc& acc) {
    const std::vector<int> ks = tuple_degrees(args);
    std::vector<int> abar = ks;
    for (auto& a : abar) a -= 1;

    if (!bracket_terms_only) {
        // T1 = q'1(Fhat_n(args)) = -e_n d2 F_n(args)
        GradedValue fn = eval_map(F, n, args);
        if (!gv_zero(fn) && F.target.has_diff())
            acc.add(F.target.d(fn), Rat(-en_sign(ks)));

        // T3 = -sum_i cross_i Fhat_n(.., q1 x_i, ..), q1 = -d1
        if (F.source.has_diff()) {
            for (int i = 0; i < n; ++i) {
                GradedValue dx = F.source.d(args[static_cast<std::size_t>(i)]);
                if (gv_zero(dx)) continue;
                std::vector<GradedValue> tup(args.begin(), args.end());
                tup[static_cast<std::size_t>(i)] = dx;
                std::vector<int> ks2 = ks;
                ks2[static_cast<std::size_t>(i)] += 1;
                GradedValue val = eval_map(F, n, tup);
                if (gv_zero(val)) continue;
                acc.add(val, Rat(cross_sign(i, abar) * en_sign(ks2)));
            }
        }
    }

    // T2 = 1/2 sum over proper nonempty subsets
    if (n >= 2) {
        const unsigned full = (1u << n) - 1;
        for (unsigned mask = 1; mask < full; ++mask) {
            std::vector<GradedValue> bi, bj;
            std::vector<int> ki, kj;
            for (int i = 0; i < n; ++i) {
                if (mask & (1u << i)) {
                    bi.push_back(args[static_cast<std::size_t>(i)]);
                    ki.push_back(ks[static_cast<std::size_t>(i)]);
                } else {
                    bj.push_back(args[static_cast<std::size_t>(i)]);
                    kj.push_back(ks[static_cast<std::size_t>(i)]);
                }
            }
            GradedValue u = eval_map(F, static_cast<int>(bi.size()), bi);
            if (gv_zero(u)) continue;
            GradedValue w = eval_map(F, static_cast<int>(bj.size()), bj);
            if (gv_zero(w)) continue;
            int sign = unshuffle_sign(mask, abar) * en_sign(ki) * en_sign(kj);
            int du = gv_total_degree(u);
            sign *= pow_sign(du - 1); // q'2(u, w) = (-1)^{deg u - 1}[u, w]
            GradedValue br = F.target.bracket(u, w);
            acc.add(br, Rat(sign, 2));
        }

        // T4 = -sum_{i<j} eps(i,j) Fhat_{n-1}(q2(x_i,x_j), rest)
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                GradedValue br = F.source.bracket(args[static_cast<std::size_t>(i)],
                                                  args[static_cast<std::size_t>(j)]);
                if (gv_zero(br)) continue;
                std::vector<GradedValue> tup;
                std::vector<int> ks2;
                tup.push_back(br);
                ks2.push_back(ks[static_cast<std::size_t>(i)] + ks[static_cast<std::size_t>(j)]);
                for (int t = 0; t < n; ++t) {
                    if (t == i || t == j) continue;
                    tup.push_back(args[static_cast<std::size_t>(t)]);
                    ks2.push_back(ks[static_cast<std::size_t>(t)]);
                }
                GradedValue val = eval_map(F, n - 1, tup);
                if (gv_zero(val)) continue;
                int sign = -unshuffle_sign((1u << i) | (1u << j), abar) *
                           pow_sign(ks[static_cast<std::size_t>(i)] - 1) * en_sign(ks2);
                acc.add(val, Rat(sign));
            }
        }
    }
}

} // namespace

GradedValue linf_defect(const LinfMorphism& F, int n, std::span<const GradedValue> args) {
    if (static_cast<int>(args.size()) != n) throw ValidationError("arity/argument mismatch");
    for (const auto& a : args)
        if (gv_zero(a)) return F.zero_target();
    Acc acc(F.zero_target());
    defect_terms(F, n, args, false, acc);
    return gv_scale(acc.v, Rat(-en_sign(tuple_degrees(args))));
}

GradedValue linf_rhs(const LinfMorphism& F, int n, std::span<const GradedValue> args) {
    if (static_cast<int>(args.size()) != n) throw ValidationError("arity/argument mismatch");
    for (const auto& a : args)
        if (gv_zero(a)) return F.zero_target();
    Acc acc(F.zero_target());
    defect_terms(F, n, args, true, acc);
    return gv_scale(acc.v, Rat(en_sign(tuple_degrees(args))));
}

PolyMap d_hom(PolyMap psi, int arity, int shift, const DglaHandle& src, const DglaHandle& tgt) {
    return [psi, arity, shift, src, tgt](std::span<const GradedValue> args) -> GradedValue {
        if (static_cast<int>(args.size()) != arity)
            throw ValidationError("d_hom: arity mismatch");
        GradedValue base = psi(args);
        GradedValue out = tgt.has_diff() && !gv_zero(base)
                              ? tgt.d(base)
                              : gv_scale(base, 0);
        if (src.has_diff()) {
            long kpre = 0;
            for (int i = 0; i < arity; ++i) {
                int ki = gv_zero(args[static_cast<std::size_t>(i)])
                             ? 0
                             : gv_total_degree(args[static_cast<std::size_t>(i)]);
                GradedValue dx = src.d(args[static_cast<std::size_t>(i)]);
                if (!gv_zero(dx)) {
                    std::vector<GradedValue> tup(args.begin(), args.end());
                    tup[static_cast<std::size_t>(i)] = dx;
                    GradedValue val = psi(tup);
                    out = gv_add(out, gv_scale(val, Rat(-pow_sign(kpre + shift))));
                }
                kpre += ki;
            }
        }
        return out;
    };
}

LinfMorphism twist(const LinfMorphism& F, const MaurerCartanElement& b_src,
                   const MaurerCartanElement& b_tgt) {
    LinfMorphism T = F;
    {
        DglaHandle old = F.source;
        GradedValue B = b_src.value;
        T.source.diff = [old, B](const GradedValue& x) {
            GradedValue r = old.bracket(B, x);
            if (old.has_diff()) r = gv_add(old.d(x), r);
            return r;
        };
    }
    {
        DglaHandle old = F.target;
        GradedValue B = b_tgt.value;
        T.target.diff = [old, B](const GradedValue& x) {
            GradedValue r = old.bracket(B, x);
            if (old.has_diff()) r = gv_add(old.d(x), r);
            return r;
        };
    }
    const GradedValue B = b_src.value;
    const int qminB = gv_zero(B) ? kInf : gv_min_ext(B);
    const int nilp = b_tgt.nilpotency_bound > 0 ? b_tgt.nilpotency_bound : b_src.nilpotency_bound;
    for (int n = 1; n <= F.arity_cap; ++n) {
        T.maps[static_cast<std::size_t>(n - 1)] =
            [F, B, qminB, nilp, n](std::span<const GradedValue> args) -> GradedValue {
                for (const auto& a : args)
                    if (gv_zero(a)) return F.zero_target();
                int qargs = 0;
                for (const auto& a : args) qargs += gv_min_ext(a);
                int mlimit;
                if (gv_zero(B)) {
                    mlimit = 0;
                } else if (qminB > 0) {
                    mlimit = std::max(0, (F.dim - qargs) / qminB);
                } else {
                    mlimit = nilp;
                }
                Acc acc(F.zero_target());
                Rat mfact = 1;
                for (int m = 0; m <= mlimit; ++m) {
                    if (m > 0) mfact *= m;
                    std::vector<GradedValue> tup;
                    tup.reserve(args.size() + static_cast<std::size_t>(m));
                    for (int t = 0; t < m; ++t) tup.push_back(B);
                    tup.insert(tup.end(), args.begin(), args.end());
                    GradedValue val = eval_map(F, n + m, tup);
                    acc.add(val, 1 / mfact);
                }
                return acc.v;
            };
    }
    return T;
}

LinfMorphism shift_morphism(const LinfMorphism& F, int n, PolyMap v_n) {
    if (n < 1 || n > F.arity_cap)
        throw ValidationError("shift arity outside the morphism's cap");
    if (F.arity_cap > n + 1)
        throw CapacityError("shift corrections beyond arity " + std::to_string(n + 1) +
                            " are not implemented");
    LinfMorphism S = F;

    // Arity n: F_n + d2 V_n + (suspended source-differential corrections).
    S.maps[static_cast<std::size_t>(n - 1)] =
        [F, v_n, n](std::span<const GradedValue> args) -> GradedValue {
            for (const auto& a : args)
                if (gv_zero(a)) return F.zero_target();
            const std::vector<int> ks = tuple_degrees(args);
            std::vector<int> abar = ks;
            for (auto& a : abar) a -= 1;
            Acc acc(F.zero_target());
            acc.add(eval_map(F, n, args), 1);
            GradedValue vn = v_n(args);
            if (!gv_zero(vn) && F.target.has_diff()) acc.add(F.target.d(vn), 1);
            if (F.source.has_diff()) {
                const int en = en_sign(ks);
                for (int i = 0; i < n; ++i) {
                    GradedValue dx = F.source.d(args[static_cast<std::size_t>(i)]);
                    if (gv_zero(dx)) continue;
                    std::vector<GradedValue> tup(args.begin(), args.end());
                    tup[static_cast<std::size_t>(i)] = dx;
                    std::vector<int> ks2 = ks;
                    ks2[static_cast<std::size_t>(i)] += 1;
                    GradedValue val = v_n(tup);
                    if (gv_zero(val)) continue;
                    acc.add(val, Rat(en * cross_sign(i, abar) * en_sign(ks2)));
                }
            }
            return acc.v;
        };

    // Arity n+1 corrections.  For n == 1 the correction is the homotopy
    // expansion
    //   F~2(g1, g2) = F2 - (-1)^{r1} [F1 g1, V g2] - [V g1, F1 g2] + V([g1, g2])
    //     + a [V g1, d2 V g2] + b [d2 V g1, V g2]
    //     + u [V g1, V d1 g2] + v [V d1 g1, V g2],
    // with the parity-class table below for (a, b, u, v).  The table is the
    // unique solution (one gauge direction pinned to zero) of the exact
    // linear system demanding that shifted morphisms keep zero structure
    // defects and stay graded-antisymmetric on homogeneous tuples of every
    // parity class; see docs/conventions.md.
    if (n == 1 && F.arity_cap >= 2) {
        S.maps[1] = [F, v_n](std::span<const GradedValue> args) -> GradedValue {
            for (const auto& a : args)
                if (gv_zero(a)) return F.zero_target();
            const GradedValue& y1 = args[0];
            const GradedValue& y2 = args[1];
            const int e1 = ((gv_total_degree(y1) % 2) + 2) % 2;
            const int e2 = ((gv_total_degree(y2) % 2) + 2) % 2;
            static const Rat qa[2][2] = {{Rat(-1, 2), Rat(-1)}, {Rat(0), Rat(-1, 2)}};
            static const Rat qb[2][2] = {{Rat(-1, 2), Rat(0)}, {Rat(1), Rat(1, 2)}};
            static const Rat qu[2][2] = {{Rat(-1), Rat(-1, 2)}, {Rat(-1, 2), Rat(0)}};
            static const Rat qv[2][2] = {{Rat(-1), Rat(-1, 2)}, {Rat(1, 2), Rat(0)}};
            auto v1 = [&v_n](const GradedValue& x) {
                std::vector<GradedValue> t{x};
                return v_n(t);
            };
            Acc acc(F.zero_target());
            acc.add(eval_map(F, 2, args), 1);
            std::vector<GradedValue> a1{y1}, a2{y2};
            GradedValue f1y1 = eval_map(F, 1, a1);
            GradedValue f1y2 = eval_map(F, 1, a2);
            GradedValue vy1 = v1(y1);
            GradedValue vy2 = v1(y2);
            if (!gv_zero(f1y1) && !gv_zero(vy2))
                acc.add(F.target.bracket(f1y1, vy2), Rat(e1 ? 1 : -1));
            if (!gv_zero(vy1) && !gv_zero(f1y2))
                acc.add(F.target.bracket(vy1, f1y2), Rat(-1));
            GradedValue br = F.source.bracket(y1, y2);
            if (!gv_zero(br)) acc.add(v1(br), 1);
            if (F.target.has_diff()) {
                if (!gv_zero(vy1) && !gv_zero(vy2)) {
                    GradedValue dv2 = F.target.d(vy2);
                    if (!gv_zero(dv2)) acc.add(F.target.bracket(vy1, dv2), qa[e1][e2]);
                    GradedValue dv1 = F.target.d(vy1);
                    if (!gv_zero(dv1)) acc.add(F.target.bracket(dv1, vy2), qb[e1][e2]);
                }
            }
            if (F.source.has_diff()) {
                GradedValue dy2 = F.source.d(y2);
                if (!gv_zero(vy1) && !gv_zero(dy2)) {
                    GradedValue vdy2 = v1(dy2);
                    if (!gv_zero(vdy2)) acc.add(F.target.bracket(vy1, vdy2), qu[e1][e2]);
                }
                GradedValue dy1 = F.source.d(y1);
                if (!gv_zero(dy1) && !gv_zero(vy2)) {
                    GradedValue vdy1 = v1(dy1);
                    if (!gv_zero(vdy1)) acc.add(F.target.bracket(vdy1, vy2), qv[e1][e2]);
                }
            }
            return acc.v;
        };
    } else if (F.arity_cap > n + 1 || (n >= 2 && n + 1 <= F.arity_cap)) {
        throw CapacityError("shift corrections beyond the implemented arity pattern");
    }
    return S;
}

// ---------------------------------------------------------------------------
// Probe basis and contraction

ProbeBasis ProbeBasis::standard(int d, int max_xdeg) {
    ProbeBasis pb;
    pb.d = d;
    pb.max_xdeg = max_xdeg;
    std::vector<YIndex> xs;
    {
        // multi-indices of degree <= max_xdeg, (degree, lex) ordered
        xs.push_back(yzero(d));
        for (int deg = 1; deg <= max_xdeg; ++deg) {
            struct Rec {
                int d;
                std::vector<YIndex>& out;
                void go(YIndex& idx, int pos, int left) {
                    if (pos == d - 1) {
                        idx[static_cast<std::size_t>(pos)] = left;
                        out.push_back(idx);
                        return;
                    }
                    for (int v = left; v >= 0; --v) {
                        idx[static_cast<std::size_t>(pos)] = v;
                        go(idx, pos + 1, left - v);
                    }
                }
            } rec{d, xs};
            YIndex idx = yzero(d);
            rec.go(idx, 0, deg);
        }
    }
    for (Mask dy = 0; dy < (Mask{1} << d); ++dy) {
        for (const auto& xe : xs) {
            FiberPolyVec v(d, kInf, Family::base);
            CoeffPoly c(d);
            c.add_term(xe, 0, 1);
            v.add_term(yzero(d), 0, dy, c);
            pb.elements.push_back(std::move(v));
            pb.degrees.push_back(mask_count(dy) - 1);
        }
    }
    return pb;
}

std::vector<std::pair<Rat, std::size_t>> ProbeBasis::decompose(const FiberPolyVec& v) const {
    if (v.family() != Family::base)
        throw ValidationError("probe decomposition expects base-level polyvectors");
    std::vector<std::pair<Rat, std::size_t>> out;
    for (const auto& [k, c] : v.terms()) {
        for (const auto& [ck, cc] : c.terms()) {
            if (ck.hpow != 0)
                throw CapacityError("probe decomposition does not carry deformation powers");
            if (ydeg(ck.xexp) > max_xdeg)
                throw CapacityError("probe basis degree " + std::to_string(max_xdeg) +
                                    " exceeded by input of degree " + std::to_string(ydeg(ck.xexp)));
            // locate the basis element with this (dy, xexp)
            bool found = false;
            for (std::size_t i = 0; i < elements.size(); ++i) {
                const auto& t = elements[i].terms();
                if (t.size() != 1) continue;
                const auto& [bk, bc] = *t.begin();
                if (bk.dy != k.dy) continue;
                if (bc.terms().begin()->first.xexp == ck.xexp) {
                    out.emplace_back(cc, i);
                    found = true;
                    break;
                }
            }
            if (!found) throw InternalError("probe basis lookup failed");
        }
    }
    return out;
}

LinfMorphism compose_with_tau(const LinfMorphism& F, const FedosovState& st) {
    LinfMorphism C = F;
    C.source.diff = nullptr;
    C.source.bracket = [](const GradedValue& a, const GradedValue& b) {
        return gv_bracket(a, b);
    };
    C.known_zero = nullptr;
    for (int n = 1; n <= F.arity_cap; ++n) {
        C.maps[static_cast<std::size_t>(n - 1)] =
            [F, st, n](std::span<const GradedValue> args) -> GradedValue {
                std::vector<GradedValue> lifted;
                lifted.reserve(args.size());
                for (const auto& a : args) {
                    if (gv_zero(a)) return F.zero_target();
                    lifted.push_back(tau_lift(fiberize(gv_vec(a), st.trunc), st));
                }
                return eval_map(F, n, lifted);
            };
    }
    return C;
}

namespace {

// Canonical ordering of a basis tuple; returns false when the wedge word
// vanishes (a repeated element of even polyvector degree).
bool canonicalize_tuple(std::vector<std::size_t>& ids, const ProbeBasis& pb, int& sign) {
    sign = 1;
    for (std::size_t pass = 1; pass < ids.size(); ++pass)
        for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
            if (ids[i] <= ids[i + 1]) continue;
            int ka = pb.degrees[ids[i]];
            int kb = pb.degrees[ids[i + 1]];
            sign *= -pow_sign(ka * kb);
            std::swap(ids[i], ids[i + 1]);
        }
    for (std::size_t i = 0; i + 1 < ids.size(); ++i)
        if (ids[i] == ids[i + 1] && pb.degrees[ids[i]] % 2 == 0) return false;
    return true;
}

} // namespace

LinfMorphism contract_to_fiber_zero(const LinfMorphism& F, const FedosovState& st,
                                    std::shared_ptr<const ProbeBasis> probes,
                                    int up_to_arity) {
    LinfMorphism cur = F;
    const int top = up_to_arity < 0 ? F.arity_cap : std::min(up_to_arity, F.arity_cap);
    for (int n = 1; n <= top; ++n) {
        auto cache = std::make_shared<std::map<std::vector<std::size_t>, GradedValue>>();
        LinfMorphism snapshot = cur;
        PolyMap vn = [snapshot, st, probes, cache, n](std::span<const GradedValue> args)
            -> GradedValue {
            for (const auto& a : args)
                if (gv_zero(a)) return snapshot.zero_target();
            std::vector<std::vector<std::pair<Rat, std::size_t>>> dec;
            dec.reserve(args.size());
            for (const auto& a : args) dec.push_back(probes->decompose(gv_vec(a)));
            Acc acc(snapshot.zero_target());
            std::vector<std::size_t> pick(args.size(), 0);
            for (;;) {
                Rat coef = 1;
                std::vector<std::size_t> ids;
                ids.reserve(args.size());
                for (std::size_t s = 0; s < args.size(); ++s) {
                    coef *= dec[s][pick[s]].first;
                    ids.push_back(dec[s][pick[s]].second);
                }
                int sign = 1;
                if (canonicalize_tuple(ids, *probes, sign) && !is_zero(coef)) {
                    auto it = cache->find(ids);
                    if (it == cache->end()) {
                        std::vector<GradedValue> tup;
                        tup.reserve(ids.size());
                        for (auto i : ids) tup.push_back(probes->elements[i]);
                        GradedValue x = eval_map(snapshot, n, tup);
                        FiberPolyOp rem = gv_op(x);
                        FiberPolyOp v(rem.dim(), rem.trunc());
                        while (!rem.zero() && rem.max_ext_degree() > 0) {
                            FiberPolyOp top = rem.ext_component(rem.max_ext_degree());
                            FiberPolyOp b;
                            try {
                                b = solve_exact(top, st);
                            } catch (const ValidationError& e) {
                                throw InternalError(
                                    std::string("contraction: top exterior component is "
                                                "not closed: ") + e.what());
                            }
                            rem = rem - (fedosov_d(b, st) + hochschild_d(b));
                            v = v - b;
                        }
                        it = cache->emplace(ids, GradedValue(v)).first;
                    }
                    acc.add(it->second, sign < 0 ? -coef : coef);
                }
                std::size_t s = 0;
                while (s < pick.size() && ++pick[s] == dec[s].size()) {
                    pick[s] = 0;
                    ++s;
                }
                if (s == pick.size()) break;
            }
            return acc.v;
        };
        cur = shift_morphism(cur, n, vn);
    }
    return cur;
}

} // namespace defq
