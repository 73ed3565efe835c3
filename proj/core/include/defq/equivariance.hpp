#pragma once

#include <optional>
#include <vector>

#include "defq/connection.hpp"
#include "defq/poly_op.hpp"

namespace defq {

/// Invertible affine transformation x -> M x + t with exact rational
/// entries.
struct AffineMap {
    std::vector<std::vector<Rat>> m;
    std::vector<Rat> t;

    static AffineMap identity(int d);
    AffineMap inverse() const;
    AffineMap compose(const AffineMap& o) const; // this after o
    bool operator==(const AffineMap& o) const;
    int dim() const { return static_cast<int>(t.size()); }
};

/// A finite affine group: the full element list, closed under composition
/// and inverse, identity present (validated on construction).
struct AffineAction {
    int d = 0;
    std::vector<AffineMap> elements;

    /// Closes the generator list; CapacityError if the group exceeds the
    /// cap (the action must be finite).
    static AffineAction from_generators(int d, const std::vector<AffineMap>& gens,
                                        std::size_t cap = 512);
};

/// The canonical action on each kind of data: coordinates substitute
/// through the inverse map, the fiber and form variables transform by the
/// inverse linear part, derivative slots by the transpose of the linear
/// part; the Christoffel table transforms by the affine connection law
/// (whose inhomogeneous term vanishes for affine maps).
CoeffPoly act(const AffineMap& g, const CoeffPoly& p);
FormSection act(const AffineMap& g, const FormSection& a);
FiberPolyVec act(const AffineMap& g, const FiberPolyVec& a);
FiberPolyOp act(const AffineMap& g, const FiberPolyOp& a);
ConnectionData act(const AffineMap& g, const ConnectionData& conn);

/// Group average |G|^-1 sum_g g . Gamma; the result is invariant and
/// torsion-free.
ConnectionData average_connection(const AffineAction& G, const ConnectionData& conn);

/// Finds a group element that moves the connection, if any.
std::optional<std::size_t> invariance_violation(const AffineAction& G, const ConnectionData& conn);

} // namespace defq
