#include "defq/equivariance.hpp"

#include <algorithm>

#include "defq/errors.hpp"

namespace defq {

AffineMap AffineMap::identity(int d) {
    AffineMap g;
    g.m.assign(static_cast<std::size_t>(d), std::vector<Rat>(static_cast<std::size_t>(d), Rat(0)));
    for (int i = 0; i < d; ++i) g.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    g.t.assign(static_cast<std::size_t>(d), Rat(0));
    return g;
}

AffineMap AffineMap::inverse() const {
    const int d = dim();
    // Gauss-Jordan on [m | I]
    std::vector<std::vector<Rat>> a = m;
    std::vector<std::vector<Rat>> inv = identity(d).m;
    for (int col = 0; col < d; ++col) {
        int piv = col;
        while (piv < d && is_zero(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
            ++piv;
        if (piv == d) throw ValidationError("group element matrix is singular");
        std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(col)]);
        std::swap(inv[static_cast<std::size_t>(piv)], inv[static_cast<std::size_t>(col)]);
        Rat f = 1 / a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        for (int c = 0; c < d; ++c) {
            a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)] *= f;
            inv[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)] *= f;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            Rat g = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
            if (is_zero(g)) continue;
            for (int c = 0; c < d; ++c) {
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    g * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
                inv[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    g * inv[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
            }
        }
    }
    AffineMap r;
    r.m = std::move(inv);
    // x = M y + t  =>  y = M^-1 x - M^-1 t
    r.t.assign(static_cast<std::size_t>(d), Rat(0));
    for (int i = 0; i < d; ++i) {
        Rat s = 0;
        for (int j = 0; j < d; ++j)
            s += r.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                 t[static_cast<std::size_t>(j)];
        r.t[static_cast<std::size_t>(i)] = -s;
    }
    return r;
}

AffineMap AffineMap::compose(const AffineMap& o) const {
    const int d = dim();
    AffineMap r = identity(d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Rat s = 0;
            for (int k = 0; k < d; ++k)
                s += m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                     o.m[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
            r.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
        }
        Rat s = t[static_cast<std::size_t>(i)];
        for (int k = 0; k < d; ++k)
            s += m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
                 o.t[static_cast<std::size_t>(k)];
        r.t[static_cast<std::size_t>(i)] = s;
    }
    return r;
}

bool AffineMap::operator==(const AffineMap& o) const { return m == o.m && t == o.t; }

AffineAction AffineAction::from_generators(int d, const std::vector<AffineMap>& gens,
                                           std::size_t cap) {
    AffineAction a;
    a.d = d;
    a.elements.push_back(AffineMap::identity(d));
    std::vector<AffineMap> frontier = a.elements;
    auto known = [&](const AffineMap& g) {
        return std::find(a.elements.begin(), a.elements.end(), g) != a.elements.end();
    };
    std::vector<AffineMap> seeds = gens;
    for (const auto& g : gens) seeds.push_back(g.inverse());
    while (!frontier.empty()) {
        std::vector<AffineMap> next;
        for (const auto& f : frontier)
            for (const auto& s : seeds) {
                AffineMap g = s.compose(f);
                if (!known(g)) {
                    a.elements.push_back(g);
                    next.push_back(g);
                    if (a.elements.size() > cap)
                        throw CapacityError("group closure exceeds " + std::to_string(cap) +
                                            " elements; the action must be finite");
                }
            }
        frontier = std::move(next);
    }
    return a;
}

CoeffPoly act(const AffineMap& g, const CoeffPoly& p) {
    const int d = p.dim();
    AffineMap inv = g.inverse();
    std::vector<CoeffPoly> images;
    images.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        CoeffPoly im(d);
        for (int j = 0; j < d; ++j) {
            Rat c = inv.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!is_zero(c)) im += CoeffPoly::variable(d, j + 1).scaled(c);
        }
        if (!is_zero(inv.t[static_cast<std::size_t>(i)]))
            im += CoeffPoly(d, inv.t[static_cast<std::size_t>(i)]);
        images.push_back(std::move(im));
    }
    return p.substitute(images);
}

namespace {

// Expansion of a transformed odd word: each generator index a maps to the
// linear combination sum_b coefs[a][b] * generator_b; the result is a map
// from sorted words to rational coefficients.
std::map<Mask, Rat> transform_word(Mask word, const std::vector<std::vector<Rat>>& coefs) {
    std::map<Mask, Rat> acc;
    acc.emplace(0u, Rat(1));
    const int d = static_cast<int>(coefs.size());
    for (int a = 1; a <= 32; ++a) {
        if (!(word & mask_bit(a))) continue;
        std::map<Mask, Rat> next;
        for (const auto& [w, c] : acc) {
            for (int b = 1; b <= d; ++b) {
                Rat f = coefs[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)];
                if (is_zero(f) || (w & mask_bit(b))) continue;
                // append generator b on the right of the word w
                int sign = merge_sign(w, mask_bit(b));
                Rat add = c * f;
                if (sign < 0) add = -add;
                auto [it, fresh] = next.emplace(w | mask_bit(b), add);
                if (!fresh) {
                    it->second += add;
                    if (is_zero(it->second)) next.erase(it);
                }
            }
        }
        acc = std::move(next);
        if (acc.empty()) break;
    }
    return acc;
}

// Multinomial expansion of a transformed symmetric multi-index.
std::map<YIndex, CoeffPoly> transform_yindex(const YIndex& y,
                                             const std::vector<std::vector<Rat>>& coefs,
                                             int d) {
    std::map<YIndex, CoeffPoly> acc;
    acc.emplace(yzero(d), CoeffPoly(d, 1));
    for (int a = 1; a <= d; ++a) {
        for (int rep = 0; rep < y[static_cast<std::size_t>(a - 1)]; ++rep) {
            std::map<YIndex, CoeffPoly> next;
            for (const auto& [w, c] : acc) {
                for (int b = 1; b <= d; ++b) {
                    Rat f = coefs[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)];
                    if (is_zero(f)) continue;
                    YIndex w2 = w;
                    w2[static_cast<std::size_t>(b - 1)] += 1;
                    CoeffPoly add = c.scaled(f);
                    auto [it, fresh] = next.emplace(std::move(w2), add);
                    if (!fresh) it->second += add;
                }
            }
            acc = std::move(next);
        }
    }
    return acc;
}

std::vector<std::vector<Rat>> transpose(const std::vector<std::vector<Rat>>& m) {
    const std::size_t d = m.size();
    std::vector<std::vector<Rat>> r(d, std::vector<Rat>(d, Rat(0)));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) r[i][j] = m[j][i];
    return r;
}

} // namespace

FormSection act(const AffineMap& g, const FormSection& a) {
    const int d = a.dim();
    AffineMap inv = g.inverse();
    FormSection r(d, a.trunc());
    r.set_valid(a.valid_to());
    for (const auto& [k, c] : a.terms()) {
        CoeffPoly cc = act(g, c);
        auto ys = transform_yindex(k.y, inv.m, d);
        auto dxs = transform_word(k.dx, inv.m);
        for (const auto& [yk, yc] : ys)
            for (const auto& [xm, xc] : dxs)
                r.add_term(yk, xm, (cc * yc).scaled(xc));
    }
    return r;
}

FiberPolyVec act(const AffineMap& g, const FiberPolyVec& a) {
    const int d = a.dim();
    AffineMap inv = g.inverse();
    auto mt = transpose(g.m);
    FiberPolyVec r(d, a.trunc(), a.family());
    r.set_valid(a.valid_to());
    for (const auto& [k, c] : a.terms()) {
        CoeffPoly cc = act(g, c);
        auto ys = transform_yindex(k.y, inv.m, d);
        auto dxs = transform_word(k.dx, inv.m);
        auto dys = transform_word(k.dy, mt);
        for (const auto& [yk, yc] : ys)
            for (const auto& [xm, xc] : dxs)
                for (const auto& [dm, dc] : dys)
                    r.add_term(yk, xm, dm, (cc * yc).scaled(xc * dc));
    }
    return r;
}

FiberPolyOp act(const AffineMap& g, const FiberPolyOp& a) {
    const int d = a.dim();
    AffineMap inv = g.inverse();
    auto mt = transpose(g.m);
    FiberPolyOp r(d, a.trunc(), a.family());
    r.set_valid(a.valid_to());
    for (const auto& [k, c] : a.terms()) {
        CoeffPoly cc = act(g, c);
        auto ys = transform_yindex(k.y, inv.m, d);
        auto dxs = transform_word(k.dx, inv.m);
        // each slot multi-index expands independently
        std::vector<std::vector<std::pair<std::vector<YIndex>, CoeffPoly>>> done;
        std::vector<std::pair<std::vector<YIndex>, CoeffPoly>> acc;
        acc.emplace_back(std::vector<YIndex>{}, CoeffPoly(d, 1));
        for (const auto& slot : k.slots) {
            auto exp = transform_yindex(slot, mt, d);
            std::vector<std::pair<std::vector<YIndex>, CoeffPoly>> next;
            for (const auto& [slots, sc] : acc)
                for (const auto& [sk, skc] : exp) {
                    auto s2 = slots;
                    s2.push_back(sk);
                    next.emplace_back(std::move(s2), sc * skc);
                }
            acc = std::move(next);
        }
        for (const auto& [yk, yc] : ys)
            for (const auto& [xm, xc] : dxs)
                for (const auto& [slots, sc] : acc)
                    r.add_term(yk, xm, slots, (cc * yc * sc).scaled(xc));
    }
    return r;
}

ConnectionData act(const AffineMap& g, const ConnectionData& conn) {
    const int d = conn.dim();
    AffineMap inv = g.inverse();
    ConnectionData out(d);
    for (int k = 1; k <= d; ++k)
        for (int i = 1; i <= d; ++i)
            for (int j = i; j <= d; ++j) {
                CoeffPoly s(d);
                for (int c = 1; c <= d; ++c)
                    for (int a = 1; a <= d; ++a)
                        for (int b = 1; b <= d; ++b) {
                            Rat f = g.m[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(c - 1)] *
                                    inv.m[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(i - 1)] *
                                    inv.m[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(j - 1)];
                            if (is_zero(f)) continue;
                            CoeffPoly gamma = conn.get(c, a, b);
                            if (gamma.zero()) continue;
                            s += act(g, gamma).scaled(f);
                        }
                if (!s.zero()) out.set(k, i, j, s);
            }
    return out;
}

ConnectionData average_connection(const AffineAction& G, const ConnectionData& conn) {
    const int d = conn.dim();
    Rat norm(1, static_cast<long>(G.elements.size()));
    ConnectionData out(d);
    for (int k = 1; k <= d; ++k)
        for (int i = 1; i <= d; ++i)
            for (int j = i; j <= d; ++j) {
                CoeffPoly s(d);
                for (const auto& g : G.elements) s += act(g, conn).get(k, i, j);
                s = s.scaled(norm);
                if (!s.zero()) out.set(k, i, j, s);
            }
    return out;
}

std::optional<std::size_t> invariance_violation(const AffineAction& G,
                                                const ConnectionData& conn) {
    for (std::size_t idx = 0; idx < G.elements.size(); ++idx) {
        ConnectionData moved = act(G.elements[idx], conn);
        for (int k = 1; k <= conn.dim(); ++k)
            for (int i = 1; i <= conn.dim(); ++i)
                for (int j = i; j <= conn.dim(); ++j)
                    if (!(moved.get(k, i, j) == conn.get(k, i, j))) return idx;
    }
    return std::nullopt;
}

} // namespace defq
