#pragma once

#include <array>
#include <map>

#include "defq/poly_vec.hpp"

namespace defq {

/// Torsion-free affine connection: a table of Christoffel symbols, stored
/// symmetric in the lower index pair.
class ConnectionData {
public:
    ConnectionData() = default;
    explicit ConnectionData(int d) : d_(d) {}

    static ConnectionData flat(int d) { return ConnectionData(d); }

    int dim() const { return d_; }

    /// Registers Gamma^k_{ij} (and its (j,i) mirror).  Conflicting values
    /// for a symmetric pair are a validation error.
    void set(int k, int i, int j, const CoeffPoly& p);

    CoeffPoly get(int k, int i, int j) const;
    bool is_flat() const { return table_.empty(); }

    const std::map<std::array<int, 3>, CoeffPoly>& table() const { return table_; }

private:
    int d_ = 0;
    std::map<std::array<int, 3>, CoeffPoly> table_; // key {k, i, j} with i <= j
};

/// The connection one-form -dx^i Gamma^k_{ij} y^j d/dy^k as a
/// vector-field-valued form.
FiberPolyVec christoffel_vec(const ConnectionData& conn, int trunc);

/// Curvature element -1/2 dx^i dx^j (R_ij)^k_l y^l d/dy^k built from the
/// coordinate formula dGamma - dGamma + GammaGamma - GammaGamma.
FiberPolyVec curvature(const ConnectionData& conn, int trunc);

/// Single Riemann component (R_ij)^k_l.
CoeffPoly riemann_component(const ConnectionData& conn, int i, int j, int k, int l);

} // namespace defq
