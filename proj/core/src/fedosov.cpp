#include "defq/fedosov.hpp"

#include <sstream>

#include "defq/errors.hpp"

namespace defq {

namespace {

FormSection make_like(const FormSection& a) { return FormSection(a.dim(), a.trunc()); }
FiberPolyVec make_like(const FiberPolyVec& a) { return FiberPolyVec(a.dim(), a.trunc(), a.family()); }
FiberPolyOp make_like(const FiberPolyOp& a) { return FiberPolyOp(a.dim(), a.trunc(), a.family()); }

void add_key(FormSection& r, const FormSection::Key& k, const CoeffPoly& c) { r.add_term(k.y, k.dx, c); }
void add_key(FiberPolyVec& r, const FiberPolyVec::Key& k, const CoeffPoly& c) { r.add_term(k.y, k.dx, k.dy, c); }
void add_key(FiberPolyOp& r, const FiberPolyOp::Key& k, const CoeffPoly& c) { r.add_term(k.y, k.dx, k.slots, c); }

Family family_of(const FormSection&) { return Family::fiber; }
Family family_of(const FiberPolyVec& a) { return a.family(); }
Family family_of(const FiberPolyOp& a) { return a.family(); }

template <class C>
C delta_impl(const C& a) {
    if (family_of(a) != Family::fiber)
        throw ValidationError("resolution differentials act on fiberwise elements");
    C r = make_like(a);
    r.set_valid(vshift(a.valid_to(), -1));
    for (const auto& [k, c] : a.terms()) {
        for (int i = 1; i <= a.dim(); ++i) {
            const int e = k.y[static_cast<std::size_t>(i - 1)];
            if (e == 0 || (k.dx & mask_bit(i))) continue;
            auto k2 = k;
            k2.y[static_cast<std::size_t>(i - 1)] -= 1;
            k2.dx |= mask_bit(i);
            int sign = merge_sign(mask_bit(i), k.dx);
            add_key(r, k2, c.scaled(sign < 0 ? -Rat(e) : Rat(e)));
        }
    }
    return r;
}

template <class C>
C delta_inv_impl(const C& a) {
    if (family_of(a) != Family::fiber)
        throw ValidationError("resolution differentials act on fiberwise elements");
    C r = make_like(a);
    r.set_valid(vshift(a.valid_to(), 1));
    for (const auto& [k, c] : a.terms()) {
        const int p = ydeg(k.y);
        const int q = mask_count(k.dx);
        if (p + q == 0) continue;
        Rat scale(1, p + q);
        for (int i = 1; i <= a.dim(); ++i) {
            if (!(k.dx & mask_bit(i))) continue;
            auto k2 = k;
            k2.y[static_cast<std::size_t>(i - 1)] += 1;
            k2.dx &= ~mask_bit(i);
            int sign = remove_front_sign(i, k.dx);
            add_key(r, k2, c.scaled(sign < 0 ? -scale : scale));
        }
    }
    return r;
}

template <class C>
C sigma_impl(const C& a) {
    C r = make_like(a);
    r.set_valid(a.valid_to() >= 0 ? kInf : 0);
    for (const auto& [k, c] : a.terms())
        if (ydeg(k.y) == 0 && k.dx == 0) add_key(r, k, c);
    return r;
}

template <class C>
C exterior_d_impl(const C& a) {
    C r = make_like(a);
    r.set_valid(a.valid_to());
    for (const auto& [k, c] : a.terms()) {
        for (int i = 1; i <= a.dim(); ++i) {
            if (k.dx & mask_bit(i)) continue;
            CoeffPoly dc = c.dx(i);
            if (dc.zero()) continue;
            auto k2 = k;
            k2.dx |= mask_bit(i);
            int sign = merge_sign(mask_bit(i), k.dx);
            add_key(r, k2, sign < 0 ? -dc : dc);
        }
    }
    return r;
}

} // namespace

FormSection delta(const FormSection& a) { return delta_impl(a); }
FiberPolyVec delta(const FiberPolyVec& a) { return delta_impl(a); }
FiberPolyOp delta(const FiberPolyOp& a) { return delta_impl(a); }

FormSection delta_inv(const FormSection& a) { return delta_inv_impl(a); }
FiberPolyVec delta_inv(const FiberPolyVec& a) { return delta_inv_impl(a); }
FiberPolyOp delta_inv(const FiberPolyOp& a) { return delta_inv_impl(a); }

FormSection sigma(const FormSection& a) { return sigma_impl(a); }
FiberPolyVec sigma(const FiberPolyVec& a) { return sigma_impl(a); }
FiberPolyOp sigma(const FiberPolyOp& a) { return sigma_impl(a); }

FormSection exterior_d(const FormSection& a) { return exterior_d_impl(a); }
FiberPolyVec exterior_d(const FiberPolyVec& a) { return exterior_d_impl(a); }
FiberPolyOp exterior_d(const FiberPolyOp& a) { return exterior_d_impl(a); }

FormSection nabla(const FormSection& a, const ConnectionData& conn) {
    FormSection r = exterior_d(a);
    if (!conn.is_flat()) r = r + vec_action(christoffel_vec(conn, a.trunc()), a);
    return r;
}

FiberPolyVec nabla(const FiberPolyVec& a, const ConnectionData& conn) {
    FiberPolyVec r = exterior_d(a);
    if (!conn.is_flat()) r = r + schouten(christoffel_vec(conn, a.trunc()), a);
    return r;
}

FiberPolyOp nabla(const FiberPolyOp& a, const ConnectionData& conn) {
    FiberPolyOp r = exterior_d(a);
    if (!conn.is_flat()) r = r + gerstenhaber(vec_to_op(christoffel_vec(conn, a.trunc())), a);
    return r;
}

FedosovState solve_connection(const ConnectionData& conn, int trunc) {
    if (trunc < 2) throw ValidationError("truncation order must be at least 2");
    FedosovState st;
    st.conn = conn;
    st.trunc = trunc;
    st.R = curvature(conn, trunc);
    FiberPolyVec A(conn.dim(), trunc);
    for (int it = 0; it <= trunc + 1; ++it) {
        FiberPolyVec rhs = st.R + nabla(A, conn) + schouten(A, A).scaled(Rat(1, 2));
        FiberPolyVec next = delta_inv(rhs);
        if (next == A) {
            st.A = A;
            st.flat_valid_to = trunc - 1;
            if (!delta_inv(st.A).zero())
                throw InternalError("connection correction is not delta_inv-closed");
            if (st.A.min_y_degree() < 2 && !st.A.zero())
                throw InternalError("connection correction has terms below fiber degree 2");
            return st;
        }
        A = next;
    }
    throw InternalError("connection iteration did not stabilize");
}

FiberPolyVec fedosov_b(const FedosovState& st) {
    const int d = st.dim();
    FiberPolyVec b(d, st.trunc);
    for (int i = 1; i <= d; ++i)
        b.add_term(yzero(d), mask_bit(i), mask_bit(i), CoeffPoly(d, -1));
    b = b + christoffel_vec(st.conn, st.trunc) + st.A;
    return b;
}

FormSection fedosov_d(const FormSection& a, const FedosovState& st) {
    FormSection r = nabla(a, st.conn) - delta(a);
    if (!st.A.zero()) r = r + vec_action(st.A, a);
    return r;
}

FiberPolyVec fedosov_d(const FiberPolyVec& a, const FedosovState& st) {
    FiberPolyVec r = nabla(a, st.conn) - delta(a);
    if (!st.A.zero()) r = r + schouten(st.A, a);
    return r;
}

FiberPolyOp fedosov_d(const FiberPolyOp& a, const FedosovState& st) {
    FiberPolyOp r = nabla(a, st.conn) - delta(a);
    if (!st.A.zero()) r = r + gerstenhaber(vec_to_op(st.A), a);
    return r;
}

namespace {

FormSection a_bracket(const FedosovState& st, const FormSection& b) {
    return st.A.zero() ? make_like(b) : vec_action(st.A, b);
}
FiberPolyVec a_bracket(const FedosovState& st, const FiberPolyVec& b) {
    return st.A.zero() ? make_like(b) : schouten(st.A, b);
}
FiberPolyOp a_bracket(const FedosovState& st, const FiberPolyOp& b) {
    return st.A.zero() ? make_like(b) : gerstenhaber(vec_to_op(st.A), b);
}

template <class C>
void check_closed(const C& a, const FedosovState& st, const char* who) {
    C res = fedosov_d(a, st);
    int bound = vmin(res.valid_to(), st.flat_valid_to);
    C cut = res.y_truncated(bound);
    if (!cut.zero()) {
        int fail = kInf;
        for (const auto& [k, c] : cut.terms()) fail = std::min(fail, ydeg(k.y));
        std::ostringstream os;
        os << who << ": input is not D-closed; first nonzero residual at fiber degree "
           << fail << ": " << cut.str();
        throw ValidationError(os.str());
    }
}

// b = -delta_inv a + delta_inv(nabla b + [A, b]), iterated to its fixpoint.
template <class C>
C solve_exact_impl(const C& a, const FedosovState& st) {
    for (const auto& [k, c] : a.terms())
        if (k.dx == 0)
            throw ValidationError("solve_exact: input must have exterior degree at least 1");
    check_closed(a, st, "solve_exact");
    const C mdi = -delta_inv(a);
    C b = make_like(a);
    for (int it = 0; it <= st.trunc + 1; ++it) {
        C next = mdi + delta_inv(nabla(b, st.conn) + a_bracket(st, b));
        if (next == b) return b;
        b = next;
    }
    throw InternalError("solve_exact iteration did not stabilize");
}

// a = a0 + delta_inv(nabla a + [A, a]).
template <class C>
C tau_impl(const C& a0, const FedosovState& st) {
    for (const auto& [k, c] : a0.terms())
        if (k.dx != 0 || ydeg(k.y) != 0)
            throw ValidationError("tau_lift: input must be constant in the fiber and form variables");
    C a = a0;
    for (int it = 0; it <= st.trunc + 1; ++it) {
        C next = a0 + delta_inv(nabla(a, st.conn) + a_bracket(st, a));
        if (next == a) break;
        a = next;
    }
    a.set_valid(st.trunc);
    return a;
}

} // namespace

FormSection solve_exact(const FormSection& a, const FedosovState& st) { return solve_exact_impl(a, st); }
FiberPolyVec solve_exact(const FiberPolyVec& a, const FedosovState& st) { return solve_exact_impl(a, st); }
FiberPolyOp solve_exact(const FiberPolyOp& a, const FedosovState& st) { return solve_exact_impl(a, st); }

FormSection tau_lift(const FormSection& a0, const FedosovState& st) { return tau_impl(a0, st); }
FiberPolyVec tau_lift(const FiberPolyVec& a0, const FedosovState& st) { return tau_impl(a0, st); }
FiberPolyOp tau_lift(const FiberPolyOp& a0, const FedosovState& st) { return tau_impl(a0, st); }

FormSection tau_lift_fn(const CoeffPoly& f, const FedosovState& st) {
    return tau_lift(FormSection::from_poly(f, st.trunc), st);
}

FiberPolyVec fiberize(const FiberPolyVec& base, int trunc) {
    if (base.family() != Family::base)
        throw ValidationError("fiberize expects a base-level polyvector");
    FiberPolyVec r(base.dim(), trunc);
    for (const auto& [k, c] : base.terms()) r.add_term(k.y, 0, k.dy, c);
    return r;
}

CoeffPoly scalar_part(const FormSection& s) {
    CoeffPoly c(s.dim());
    for (const auto& [k, v] : s.terms())
        if (ydeg(k.y) == 0 && k.dx == 0) c += v;
    return c;
}

namespace {

// Multi-indices of total degree <= m, ordered by (degree, lex); this order
// makes the reconstruction solve triangular.
std::vector<YIndex> multi_indices_upto(int d, int m) {
    std::vector<YIndex> out;
    out.push_back(yzero(d));
    for (int deg = 1; deg <= m; ++deg) {
        std::vector<YIndex> next;
        YIndex idx = yzero(d);
        struct Rec {
            int d;
            std::vector<YIndex>& next;
            void go(YIndex& idx, int pos, int left) {
                if (pos == d - 1) {
                    idx[static_cast<std::size_t>(pos)] = left;
                    next.push_back(idx);
                    return;
                }
                for (int v = left; v >= 0; --v) {
                    idx[static_cast<std::size_t>(pos)] = v;
                    go(idx, pos + 1, left - v);
                }
            }
        } rec{d, next};
        rec.go(idx, 0, deg);
        for (auto& e : next) out.push_back(e);
    }
    return out;
}

CoeffPoly monomial(int d, const YIndex& a) {
    CoeffPoly p(d);
    p.add_term(a, 0, 1);
    return p;
}

// prod_t a_t! / (a_t - b_t)!  (0 when b exceeds a anywhere)
Rat falling(const YIndex& a, const YIndex& b) {
    Rat r = 1;
    for (std::size_t t = 0; t < a.size(); ++t) {
        if (b[t] > a[t]) return Rat(0);
        for (int v = a[t]; v > a[t] - b[t]; --v) r *= v;
    }
    return r;
}

} // namespace

FiberPolyOp mu_project(const FiberPolyOp& P, const FedosovState& st) {
    if (P.family() != Family::fiber)
        throw ValidationError("mu_project expects a fiberwise operator");
    const int d = st.dim();
    FiberPolyOp out(d, 0, Family::base);
    if (P.zero()) return out;
    if (P.max_ext_degree() != 0)
        throw ValidationError("mu_project: input must have exterior degree 0");
    check_closed(P, st, "mu_project");
    const int nslots = P.degree() + 1;
    const int m = P.max_slot_order();
    if (m > st.trunc)
        throw CapacityError("mu_project: derivative order " + std::to_string(m) +
                            " exceeds the truncation order " + std::to_string(st.trunc));
    if (nslots == 0) {
        out.add_term(yzero(d), 0, {}, scalar_part(sigma(P).to_section()));
        return out;
    }

    const std::vector<YIndex> alphas = multi_indices_upto(d, m);
    std::vector<FormSection> taus;
    taus.reserve(alphas.size());
    for (const auto& a : alphas) taus.push_back(tau_lift_fn(monomial(d, a), st));

    // Probe values sigma(P(tau x^{a_0}, ..., tau x^{a_k})) indexed by the
    // tuple of positions into `alphas`.
    const std::size_t na = alphas.size();
    std::vector<std::size_t> tuple(static_cast<std::size_t>(nslots), 0);
    std::map<std::vector<std::size_t>, CoeffPoly> coeffs; // reconstructed c_beta

    // Enumerate tuples in an order compatible with componentwise <= :
    // sort by total degree sum then lex on positions (positions are already
    // (degree, lex) sorted).
    std::vector<std::vector<std::size_t>> tuples;
    {
        std::vector<std::size_t> t(static_cast<std::size_t>(nslots), 0);
        for (;;) {
            tuples.push_back(t);
            int pos = nslots - 1;
            while (pos >= 0 && t[static_cast<std::size_t>(pos)] + 1 == na) {
                t[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
            t[static_cast<std::size_t>(pos)] += 1;
        }
        std::sort(tuples.begin(), tuples.end(),
                  [&](const auto& x, const auto& y) {
                      int sx = 0, sy = 0;
                      for (auto i : x) sx += ydeg(alphas[i]);
                      for (auto i : y) sy += ydeg(alphas[i]);
                      if (sx != sy) return sx < sy;
                      return x < y;
                  });
    }

    for (const auto& t : tuples) {
        std::vector<FormSection> args;
        args.reserve(t.size());
        for (auto i : t) args.push_back(taus[i]);
        CoeffPoly value = scalar_part(apply_op(P, args));
        // subtract contributions of already-known coefficients
        for (const auto& [bt, cb] : coeffs) {
            Rat factor = 1;
            CoeffPoly shift(d, 1);
            bool ok = true;
            for (int s = 0; s < nslots && ok; ++s) {
                const YIndex& a = alphas[t[static_cast<std::size_t>(s)]];
                const YIndex& b = alphas[bt[static_cast<std::size_t>(s)]];
                Rat f = falling(a, b);
                if (is_zero(f)) { ok = false; break; }
                factor *= f;
                YIndex diff = a;
                for (std::size_t v = 0; v < diff.size(); ++v) diff[v] -= b[v];
                shift = shift * monomial(d, diff);
            }
            if (!ok) continue;
            if (bt == t) continue;
            value = value - (cb * shift).scaled(factor);
        }
        Rat lead = 1;
        for (auto i : t) {
            const YIndex& a = alphas[i];
            for (int v : a) lead *= rat_factorial(v);
        }
        CoeffPoly c = value.scaled(1 / lead);
        if (!c.zero()) coeffs.emplace(t, c);
    }

    for (const auto& [bt, cb] : coeffs) {
        std::vector<YIndex> slots;
        slots.reserve(bt.size());
        for (auto i : bt) slots.push_back(alphas[i]);
        out.add_term(yzero(d), 0, std::move(slots), cb);
    }
    return out;
}

FiberPolyVec mu_project_vec(const FiberPolyVec& v, const FedosovState& st) {
    if (v.family() != Family::fiber)
        throw ValidationError("mu_project_vec expects a fiberwise polyvector");
    if (v.max_ext_degree() != 0)
        throw ValidationError("mu_project_vec: input must have exterior degree 0");
    check_closed(v, st, "mu_project_vec");
    // On y-constant polyvector data mu is the slot relabeling: probing with
    // coordinate functions only ever sees the exact first fiber derivative
    // of tau, which is the identity matrix.
    FiberPolyVec fib = sigma(v);
    FiberPolyVec out(st.dim(), 0, Family::base);
    for (const auto& [k, c] : fib.terms()) out.add_term(k.y, 0, k.dy, c);
    return out;
}

} // namespace defq
