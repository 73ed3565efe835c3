#include "defq/brackets.hpp"

#include <algorithm>

#include "defq/errors.hpp"

namespace defq {

namespace {

int bracket_valid(const FiberPolyVec& a, const FiberPolyVec& b) {
    return vshift(vmin(vshift(a.valid_to(), b.min_y_degree()),
                       vshift(b.valid_to(), a.min_y_degree())),
                  -1);
}

int bracket_valid(const FiberPolyOp& a, const FiberPolyOp& b) {
    int drop = std::max(a.max_slot_order(), b.max_slot_order());
    return vshift(vmin(vshift(a.valid_to(), b.min_y_degree()),
                       vshift(b.valid_to(), a.min_y_degree())),
                  -drop);
}

// The (coefficient, y-monomial) content of a term; derivatives in the
// family's slot variable i lower the y-exponent (fiber) or differentiate
// the coefficient polynomial (base).
struct ScalarTerm {
    CoeffPoly c;
    YIndex y;
};

ScalarTerm deriv(const ScalarTerm& t, int i, Family fam) {
    if (fam == Family::base) return {t.c.dx(i), t.y};
    const std::size_t idx = static_cast<std::size_t>(i - 1);
    if (t.y[idx] == 0) return {CoeffPoly(t.c.dim()), t.y};
    YIndex y = t.y;
    y[idx] -= 1;
    return {t.c.scaled(t.y[idx]), y};
}

ScalarTerm deriv_multi(ScalarTerm t, const YIndex& mu, Family fam) {
    for (int i = 1; i <= static_cast<int>(mu.size()); ++i)
        for (int rep = 0; rep < mu[static_cast<std::size_t>(i - 1)] && !t.c.zero(); ++rep)
            t = deriv(t, i, fam);
    return t;
}

} // namespace

FiberPolyVec schouten(const FiberPolyVec& a, const FiberPolyVec& b) {
    require_compat(a, b, "schouten");
    const Family fam = a.family();
    FiberPolyVec r(a.dim(), a.trunc(), fam);
    r.set_valid(bracket_valid(a, b));

    // Per ordered term pair (ta, tb) the form rule contributes the single
    // prefactor (-1)^{k_a q_b} merge(dx_a, dx_b); the fiber bracket under
    // it is fh(va, vb) - (-1)^{k_a k_b} fh(vb, va) with
    // fh(u, w) = sum_i (u dR_i)(d/dy^i w).
    auto add_fiber_half = [&](const FiberPolyVec::Key& ku, const CoeffPoly& cu,
                              const FiberPolyVec::Key& kw, const CoeffPoly& cw,
                              Mask dx, int outer_sign) {
        for (int i = 1; i <= a.dim(); ++i) {
            const Mask bit = mask_bit(i);
            if (!(ku.dy & bit)) continue;
            ScalarTerm dw = deriv({cw, kw.y}, i, fam);
            if (dw.c.zero()) continue;
            Mask rest = ku.dy & ~bit;
            if (rest & kw.dy) continue;
            int sign = outer_sign * move_to_end_sign(i, ku.dy) * merge_sign(rest, kw.dy);
            CoeffPoly c = cu * dw.c;
            if (sign < 0) c = -c;
            r.add_term(yadd(ku.y, dw.y), dx, rest | kw.dy, c);
        }
    };

    for (const auto& [ka, ca] : a.terms()) {
        const int k1 = mask_count(ka.dy) - 1;
        for (const auto& [kb, cb] : b.terms()) {
            if (ka.dx & kb.dx) continue;
            const int k2 = mask_count(kb.dy) - 1;
            int form = merge_sign(ka.dx, kb.dx);
            if ((k1 & 1) && (mask_count(kb.dx) & 1)) form = -form;
            // Convention twist (-1)^{k1 k2}: the conjugation by
            // (-1)^{k(k-1)/2} that aligns the bracket with the operator
            // side under the antisymmetrization map (see docs).
            if ((k1 & 1) && (k2 & 1)) form = -form;
            add_fiber_half(ka, ca, kb, cb, ka.dx | kb.dx, form);
            int exch = ((k1 * k2) & 1) ? form : -form;
            add_fiber_half(kb, cb, ka, ca, ka.dx | kb.dx, exch);
        }
    }
    return r;
}

FiberPolyOp gerstenhaber(const FiberPolyOp& a, const FiberPolyOp& b) {
    require_compat(a, b, "gerstenhaber");
    const Family fam = a.family();
    FiberPolyOp r(a.dim(), a.trunc(), fam);
    r.set_valid(bracket_valid(a, b));

    // Fiberwise insertion sum for one ordered term pair with a
    // premultiplied sign; dx words already merged by the caller.
    auto insertions = [&](const FiberPolyOp::Key& k1, const CoeffPoly& c1,
                          const FiberPolyOp::Key& k2, const CoeffPoly& c2,
                          Mask dx, int outer_sign) {
        const int kk2 = static_cast<int>(k2.slots.size()) - 1;
        for (std::size_t i = 0; i < k1.slots.size(); ++i) {
            int sign = outer_sign;
            if ((static_cast<int>(i) * kk2) & 1) sign = -sign;
            const YIndex& beta = k1.slots[i];
            for (const auto& parts : split_multi_index(beta, kk2 + 2)) {
                // parts[0] differentiates the coefficient content of the
                // inner operator; parts[1..] deepen its slots.
                ScalarTerm inner = deriv_multi({c2, k2.y}, parts[0], fam);
                if (inner.c.zero()) continue;
                Rat mult = multinomial(beta, parts);
                std::vector<YIndex> slots;
                slots.reserve(k1.slots.size() + k2.slots.size());
                for (std::size_t t = 0; t < i; ++t) slots.push_back(k1.slots[t]);
                for (std::size_t t = 0; t < k2.slots.size(); ++t)
                    slots.push_back(yadd(k2.slots[t], parts[t + 1]));
                for (std::size_t t = i + 1; t < k1.slots.size(); ++t) slots.push_back(k1.slots[t]);
                CoeffPoly c = (c1 * inner.c).scaled(sign < 0 ? -mult : mult);
                r.add_term(yadd(k1.y, inner.y), dx, std::move(slots), c);
            }
        }
    };

    for (const auto& [ka, ca] : a.terms()) {
        const int k1 = static_cast<int>(ka.slots.size()) - 1;
        for (const auto& [kb, cb] : b.terms()) {
            if (ka.dx & kb.dx) continue;
            const int k2 = static_cast<int>(kb.slots.size()) - 1;
            const int qb = mask_count(kb.dx);

            // Single form prefactor per ordered pair; the fiber bracket
            // under it carries the printed insertion and exchange signs.
            int form = merge_sign(ka.dx, kb.dx);
            if ((k1 & 1) && (qb & 1)) form = -form;
            insertions(ka, ca, kb, cb, ka.dx | kb.dx, form);
            int exch = ((k1 * k2) & 1) ? form : -form;
            insertions(kb, cb, ka, ca, ka.dx | kb.dx, exch);
        }
    }
    return r;
}

FiberPolyOp hochschild_d(const FiberPolyOp& a) {
    return gerstenhaber(FiberPolyOp::multiplication(a.dim(), a.trunc(), a.family()), a);
}

FiberPolyOp hkr(const FiberPolyVec& a) {
    FiberPolyOp r(a.dim(), a.trunc(), a.family());
    r.set_valid(a.valid_to());
    for (const auto& [k, c] : a.terms()) {
        std::vector<int> idx;
        for (int i = 1; i <= a.dim(); ++i)
            if (k.dy & mask_bit(i)) idx.push_back(i);
        const int n = static_cast<int>(idx.size());
        if (n == 0) {
            r.add_term(k.y, k.dx, {}, c);
            continue;
        }
        Rat norm = 1 / rat_factorial(n);
        std::vector<int> perm = idx;
        do {
            int inv = 0;
            for (std::size_t i = 0; i < perm.size(); ++i)
                for (std::size_t j = i + 1; j < perm.size(); ++j)
                    if (perm[i] > perm[j]) ++inv;
            std::vector<YIndex> slots;
            slots.reserve(perm.size());
            for (int t : perm) {
                YIndex e = yzero(a.dim());
                e[static_cast<std::size_t>(t - 1)] = 1;
                slots.push_back(std::move(e));
            }
            r.add_term(k.y, k.dx, std::move(slots), c.scaled(inv % 2 ? -norm : norm));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return r;
}

FiberPolyOp vec_to_op(const FiberPolyVec& a) {
    FiberPolyOp r(a.dim(), a.trunc(), a.family());
    r.set_valid(a.valid_to());
    for (const auto& [k, c] : a.terms()) {
        if (mask_count(k.dy) > 1)
            throw ValidationError("vec_to_op expects degrees <= 0");
        if (k.dy == 0) {
            r.add_term(k.y, k.dx, {}, c);
        } else {
            int i = 1;
            while (!(k.dy & mask_bit(i))) ++i;
            YIndex e = yzero(a.dim());
            e[static_cast<std::size_t>(i - 1)] = 1;
            r.add_term(k.y, k.dx, {e}, c);
        }
    }
    return r;
}

FiberPolyOp compose_ops(const FiberPolyOp& p1, const FiberPolyOp& p2) {
    require_compat(p1, p2, "compose_ops");
    if (p1.max_ext_degree() != 0 || p2.max_ext_degree() != 0)
        throw ValidationError("compose_ops expects exterior degree 0");
    const Family fam = p1.family();
    FiberPolyOp r(p1.dim(), p1.trunc(), fam);
    r.set_valid(vshift(vmin(p1.valid_to(), p2.valid_to()), -p1.max_slot_order()));
    for (const auto& [k1, c1] : p1.terms()) {
        if (k1.slots.size() != 1)
            throw ValidationError("compose_ops expects degree-0 operators");
        for (const auto& [k2, c2] : p2.terms()) {
            if (k2.slots.size() != 1)
                throw ValidationError("compose_ops expects degree-0 operators");
            for (const auto& parts : split_multi_index(k1.slots[0], 2)) {
                ScalarTerm inner = deriv_multi({c2, k2.y}, parts[0], fam);
                if (inner.c.zero()) continue;
                Rat mult = multinomial(k1.slots[0], parts);
                r.add_term(yadd(k1.y, inner.y), 0, {yadd(k2.slots[0], parts[1])},
                           (c1 * inner.c).scaled(mult));
            }
        }
    }
    return r;
}

FormSection vec_action(const FiberPolyVec& v, const FormSection& a) {
    FormSection r(a.dim(), a.trunc());
    r.set_valid(vshift(vmin(vshift(v.valid_to(), a.min_y_degree()),
                            vshift(a.valid_to(), v.min_y_degree())),
                       -1));
    for (const auto& [k, c] : v.terms()) {
        if (mask_count(k.dy) != 1)
            throw ValidationError("vec_action expects a vector-field-valued form");
        int i = 1;
        while (!(k.dy & mask_bit(i))) ++i;
        FormSection left(a.dim(), a.trunc());
        left.add_term(k.y, k.dx, c);
        r = r + left * a.dy(i);
    }
    return r;
}

} // namespace defq
