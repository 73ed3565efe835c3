#include "defq/kontsevich.hpp"

#include <random>
#include <sstream>

#include "defq/errors.hpp"

namespace defq {

namespace {

// Coefficient of theta_i theta_j (ordered pair, i != j) as a dx-free section.
FormSection biv_comp(const FiberPolyVec& v, int i, int j) {
    FormSection c(v.dim(), v.trunc());
    const Mask m = mask_bit(i) | mask_bit(j);
    const int sign = i < j ? 1 : -1;
    for (const auto& [k, cc] : v.terms()) {
        if (k.dy != m) continue;
        if (k.dx != 0) throw InternalError("biv_comp expects a dx-free bivector");
        c.add_term(k.y, 0, sign < 0 ? -cc : cc);
    }
    return c;
}

// One contraction shape evaluated on a pure-fiber bivector pair.
FiberPolyOp shape_value(const WeightTable::Shape& s1, const WeightTable::Shape& s2,
                        const FiberPolyVec& b1, const FiberPolyVec& b2) {
    const int d = b1.dim();
    FiberPolyOp acc(d, b1.trunc());
    for (int i = 1; i <= d; ++i)
        for (int j = 1; j <= d; ++j) {
            if (i == j) continue;
            FormSection c1 = biv_comp(b1, i, j);
            if (c1.zero()) continue;
            for (int k = 1; k <= d; ++k)
                for (int l = 1; l <= d; ++l) {
                    if (k == l) continue;
                    FormSection c2 = biv_comp(b2, k, l);
                    if (c2.zero()) continue;
                    YIndex s0 = yzero(d), s1v = yzero(d);
                    FormSection d1 = c1, d2 = c2;
                    auto route = [&](int idx, int target, FormSection& other) {
                        if (target == 0) s0[static_cast<std::size_t>(idx - 1)] += 1;
                        else if (target == 1) s1v[static_cast<std::size_t>(idx - 1)] += 1;
                        else other = other.dy(idx);
                    };
                    route(i, s1.first, d2);
                    route(j, s1.second, d2);
                    route(k, s2.first, d1);
                    route(l, s2.second, d1);
                    if (d1.zero() || d2.zero()) continue;
                    FormSection prod = d1 * d2;
                    for (const auto& [pk, pc] : prod.terms())
                        acc.add_term(pk.y, 0, {s0, s1v}, pc);
                }
        }
    return acc;
}

std::vector<std::pair<WeightTable::Shape, WeightTable::Shape>> all_shapes() {
    const WeightTable::Shape opts[3] = {{0, 1}, {0, 2}, {1, 2}};
    std::vector<std::pair<WeightTable::Shape, WeightTable::Shape>> out;
    for (const auto& a : opts)
        for (const auto& b : opts) out.emplace_back(a, b);
    return out;
}

FiberPolyOp symmetrized_shape(const std::pair<WeightTable::Shape, WeightTable::Shape>& sh,
                              const FiberPolyVec& b1, const FiberPolyVec& b2) {
    FiberPolyOp v = shape_value(sh.first, sh.second, b1, b2)
                    + shape_value(sh.first, sh.second, b2, b1);
    return v.scaled(Rat(1, 2));
}

// Deterministic pseudo-random pure-fiber bivector with small integer
// coefficients and fiber degree <= 2.
FiberPolyVec random_bivector(std::mt19937_64& rng, int d, int trunc) {
    std::uniform_int_distribution<int> coeff(-4, 4);
    FiberPolyVec v(d, trunc);
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j) {
            // constant + linear + one quadratic monomial per component
            CoeffPoly c(d, coeff(rng));
            v.add_term(yzero(d), 0, mask_bit(i) | mask_bit(j), c);
            for (int t = 1; t <= d; ++t) {
                int a = coeff(rng);
                if (a == 0) continue;
                YIndex y = yzero(d);
                y[static_cast<std::size_t>(t - 1)] = 1;
                v.add_term(y, 0, mask_bit(i) | mask_bit(j), CoeffPoly(d, a));
            }
            YIndex y2 = yzero(d);
            y2[0] = 1;
            y2[static_cast<std::size_t>(d - 1)] += 1;
            int a2 = coeff(rng);
            if (a2 != 0) v.add_term(y2, 0, mask_bit(i) | mask_bit(j), CoeffPoly(d, a2));
        }
    return v;
}

// Exact RREF solve of (rows x nw) w = rhs; free variables pinned to zero.
// Returns empty on inconsistency.
std::vector<Rat> solve_min_support(std::vector<std::vector<Rat>>& m,
                                   std::vector<Rat>& rhs, int nw) {
    const std::size_t rows = m.size();
    std::size_t rank = 0;
    std::vector<int> pivot_col;
    for (int col = 0; col < nw && rank < rows; ++col) {
        std::size_t piv = rank;
        while (piv < rows && is_zero(m[piv][static_cast<std::size_t>(col)])) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[rank]);
        std::swap(rhs[piv], rhs[rank]);
        Rat inv = 1 / m[rank][static_cast<std::size_t>(col)];
        for (int c = col; c < nw; ++c) m[rank][static_cast<std::size_t>(c)] *= inv;
        rhs[rank] *= inv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank) continue;
            Rat f = m[r][static_cast<std::size_t>(col)];
            if (is_zero(f)) continue;
            for (int c = col; c < nw; ++c)
                m[r][static_cast<std::size_t>(c)] -= f * m[rank][static_cast<std::size_t>(c)];
            rhs[r] -= f * rhs[rank];
        }
        pivot_col.push_back(col);
        ++rank;
    }
    for (std::size_t r = rank; r < rows; ++r)
        if (!is_zero(rhs[r])) return {};
    std::vector<Rat> w(static_cast<std::size_t>(nw), Rat(0));
    for (std::size_t r = 0; r < rank; ++r)
        w[static_cast<std::size_t>(pivot_col[r])] = rhs[r];
    return w;
}

WeightTable solve_weights() {
    WeightTable wt;
    wt.shapes = all_shapes();
    const int nw = static_cast<int>(wt.shapes.size());
    const int d = 3, trunc = 6;

    std::mt19937_64 rng(0x5eed2u);
    std::vector<std::vector<Rat>> m;
    std::vector<Rat> rhs;
    for (int probe = 0; probe < 3; ++probe) {
        FiberPolyVec b1 = random_bivector(rng, d, trunc);
        FiberPolyVec b2 = random_bivector(rng, d, trunc);
        // structure equation at arity 2 on a zero-differential fiber pair:
        //   hochschild(u2(b1,b2)) = hkr([b1,b2]) - [hkr b1, hkr b2]
        std::vector<FiberPolyOp> cols;
        cols.reserve(static_cast<std::size_t>(nw));
        for (const auto& sh : wt.shapes)
            cols.push_back(hochschild_d(symmetrized_shape(sh, b1, b2)));
        FiberPolyOp target = hkr(schouten(b1, b2)) - gerstenhaber(hkr(b1), hkr(b2));

        // assemble scalar rows per term key
        std::map<FiberPolyOp::Key, std::size_t> row_of;
        auto row_for = [&](const FiberPolyOp::Key& k) {
            auto it = row_of.find(k);
            if (it == row_of.end()) {
                it = row_of.emplace(k, m.size()).first;
                m.emplace_back(static_cast<std::size_t>(nw), Rat(0));
                rhs.emplace_back(0);
            }
            return it->second;
        };
        auto scalar_of = [](const CoeffPoly& c) -> Rat {
            if (c.zero()) return Rat(0);
            if (c.terms().size() != 1 || ydeg(c.terms().begin()->first.xexp) != 0 ||
                c.terms().begin()->first.hpow != 0)
                throw InternalError("weight probes must have constant coefficients");
            return c.terms().begin()->second;
        };
        for (int s = 0; s < nw; ++s)
            for (const auto& [k, c] : cols[static_cast<std::size_t>(s)].terms())
                m[row_for(k)][static_cast<std::size_t>(s)] = scalar_of(c);
        for (const auto& [k, c] : target.terms()) rhs[row_for(k)] = scalar_of(c);
    }

    std::vector<Rat> w = solve_min_support(m, rhs, nw);
    if (w.empty())
        throw InternalError("arity-2 weight system is inconsistent");
    wt.weights = std::move(w);
    return wt;
}

} // namespace

const WeightTable& WeightTable::solved() {
    static const WeightTable wt = solve_weights();
    return wt;
}

std::string WeightTable::serialize() const {
    std::ostringstream os;
    os << "weight_table order_cap " << order_cap << "\n";
    const char* names = "01C";
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const auto& [a, b] = shapes[i];
        os << "shape " << names[a.first] << names[a.second] << "x" << names[b.first]
           << names[b.second] << " = " << rat_str(weights[i]) << "\n";
    }
    return os.str();
}

WeightTable WeightTable::deserialize(const std::string& text) {
    WeightTable wt;
    std::istringstream is(text);
    std::string line;
    auto target_of = [](char c) -> int {
        if (c == '0') return 0;
        if (c == '1') return 1;
        if (c == 'C') return 2;
        throw ValidationError("weight table: bad shape letter");
    };
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "weight_table") {
            std::string oc;
            ls >> oc >> wt.order_cap;
        } else if (tag == "shape") {
            std::string spec, eq, val;
            ls >> spec >> eq >> val;
            if (spec.size() != 5 || spec[2] != 'x' || eq != "=")
                throw ValidationError("weight table: malformed shape line");
            Shape a{target_of(spec[0]), target_of(spec[1])};
            Shape b{target_of(spec[3]), target_of(spec[4])};
            wt.shapes.emplace_back(a, b);
            wt.weights.push_back(rat_parse(val));
        } else if (!tag.empty()) {
            throw ValidationError("weight table: unknown line '" + tag + "'");
        }
    }
    return wt;
}

FiberPolyOp u1(const FiberPolyVec& g) { return hkr(g); }

namespace {

// split an element into (dx word, pure fiber part) groups
std::map<Mask, FiberPolyVec> dx_groups(const FiberPolyVec& v) {
    std::map<Mask, FiberPolyVec> out;
    for (const auto& [k, c] : v.terms()) {
        auto it = out.find(k.dx);
        if (it == out.end())
            it = out.emplace(k.dx, FiberPolyVec(v.dim(), v.trunc())).first;
        it->second.add_term(k.y, 0, k.dy, c);
    }
    return out;
}

FiberPolyOp u2_fiber(const FiberPolyVec& b1, const FiberPolyVec& b2) {
    const WeightTable& wt = WeightTable::solved();
    FiberPolyOp acc(b1.dim(), b1.trunc());
    for (std::size_t s = 0; s < wt.shapes.size(); ++s) {
        if (is_zero(wt.weights[s])) continue;
        acc = acc + symmetrized_shape(wt.shapes[s], b1, b2).scaled(wt.weights[s]);
    }
    return acc;
}

} // namespace

FiberPolyOp u2(const FiberPolyVec& g1, const FiberPolyVec& g2) {
    FiberPolyOp zero(g1.dim(), g1.trunc());
    if (g1.zero() || g2.zero()) return zero;
    const int k1 = g1.degree();
    const int k2 = g2.degree();
    if (k1 < 0 || k1 > 1 || k2 < 0 || k2 > 1)
        throw CapacityError("order-2 structure map supports polyvector degrees 0 and 1 only");
    if (k1 == 0 || k2 == 0) return zero; // vanishing gauge on vector fields
    FiberPolyOp out(g1.dim(), g1.trunc());
    for (const auto& [s1m, f1] : dx_groups(g1)) {
        for (const auto& [s2m, f2] : dx_groups(g2)) {
            if (s1m & s2m) continue;
            int sign = merge_sign(s1m, s2m);
            // The form-extension sign (-1)^{q1} is pinned by the exterior
            // Leibniz structure of the arity-2 relation (the map has odd
            // target shift); the graded symmetry holds either way.
            if (mask_count(s1m) & 1) sign = -sign;
            FiberPolyOp fib = u2_fiber(f1, f2);
            for (const auto& [k, c] : fib.terms())
                out.add_term(k.y, s1m | s2m, k.slots, sign < 0 ? -c : c);
        }
    }
    return out;
}

LinfMorphism assemble_fiber_morphism(int arity_cap, int d, int trunc) {
    if (arity_cap < 1 || arity_cap > 2)
        throw CapacityError("fiberwise morphism arities above 2 are unavailable");
    LinfMorphism F;
    F.dim = d;
    F.trunc = trunc;
    F.arity_cap = arity_cap;
    F.hbar_cap = 2;
    F.source.diff = [](const GradedValue& x) -> GradedValue { return exterior_d(gv_vec(x)); };
    F.source.bracket = [](const GradedValue& a, const GradedValue& b) -> GradedValue {
        return schouten(gv_vec(a), gv_vec(b));
    };
    F.target.diff = [](const GradedValue& x) -> GradedValue {
        return exterior_d(gv_op(x)) + hochschild_d(gv_op(x));
    };
    F.target.bracket = [](const GradedValue& a, const GradedValue& b) -> GradedValue {
        return gerstenhaber(gv_op(a), gv_op(b));
    };
    F.known_zero = [](std::span<const GradedValue> args) -> bool {
        if (args.size() < 2) return false;
        bool all_vec = true;
        for (const auto& a : args) {
            if (!std::holds_alternative<FiberPolyVec>(a)) return false;
            const auto& v = std::get<FiberPolyVec>(a);
            if (v.zero()) return true;
            if (!v.homogeneous_degree()) return false;
            const int k = v.degree();
            if (k != 0) { all_vec = false; continue; }
            if (v.max_y_degree() <= 1) return true;              // at-most-linear field
            if (args.size() == 2) return true;                    // arity-2 gauge
        }
        return all_vec; // vanishing on pure vector-field tuples
    };
    F.maps.resize(static_cast<std::size_t>(arity_cap));
    F.maps[0] = [](std::span<const GradedValue> args) -> GradedValue {
        return u1(gv_vec(args[0]));
    };
    if (arity_cap >= 2)
        F.maps[1] = [](std::span<const GradedValue> args) -> GradedValue {
            return u2(gv_vec(args[0]), gv_vec(args[1]));
        };
    return F;
}

} // namespace defq
