#include "defq/connection.hpp"

#include "defq/errors.hpp"

namespace defq {

void ConnectionData::set(int k, int i, int j, const CoeffPoly& p) {
    if (k < 1 || k > d_ || i < 1 || i > d_ || j < 1 || j > d_)
        throw ValidationError("christoffel index out of range");
    std::array<int, 3> key{k, std::min(i, j), std::max(i, j)};
    auto it = table_.find(key);
    if (it != table_.end() && !(it->second == p))
        throw ValidationError("christoffel table is not symmetric in the lower indices");
    if (p.zero()) return;
    table_.emplace(key, p);
}

CoeffPoly ConnectionData::get(int k, int i, int j) const {
    auto it = table_.find({k, std::min(i, j), std::max(i, j)});
    return it == table_.end() ? CoeffPoly(d_) : it->second;
}

FiberPolyVec christoffel_vec(const ConnectionData& conn, int trunc) {
    const int d = conn.dim();
    FiberPolyVec g(d, trunc);
    for (const auto& [key, p] : conn.table()) {
        const int k = key[0], i = key[1], j = key[2];
        YIndex yj = yzero(d);
        yj[static_cast<std::size_t>(j - 1)] += 1;
        g.add_term(yj, mask_bit(i), mask_bit(k), -p);
        if (i != j) {
            YIndex yi = yzero(d);
            yi[static_cast<std::size_t>(i - 1)] += 1;
            g.add_term(yi, mask_bit(j), mask_bit(k), -p);
        }
    }
    return g;
}

CoeffPoly riemann_component(const ConnectionData& conn, int i, int j, int k, int l) {
    CoeffPoly r = conn.get(k, j, l).dx(i) - conn.get(k, i, l).dx(j);
    for (int m = 1; m <= conn.dim(); ++m) {
        r += conn.get(k, i, m) * conn.get(m, j, l);
        r += -(conn.get(k, j, m) * conn.get(m, i, l));
    }
    return r;
}

FiberPolyVec curvature(const ConnectionData& conn, int trunc) {
    const int d = conn.dim();
    FiberPolyVec R(d, trunc);
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j)
            for (int k = 1; k <= d; ++k)
                for (int l = 1; l <= d; ++l) {
                    CoeffPoly comp = riemann_component(conn, i, j, k, l);
                    if (comp.zero()) continue;
                    YIndex yl = yzero(d);
                    yl[static_cast<std::size_t>(l - 1)] += 1;
                    // -1/2 dx^i dx^j (R_ij) summed over all i, j collapses
                    // to -dx^i dx^j (R_ij) over i < j by antisymmetry.
                    R.add_term(yl, mask_bit(i) | mask_bit(j), mask_bit(k), -comp);
                }
    return R;
}

} // namespace defq
