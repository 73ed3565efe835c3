#pragma once

#include "defq/linf.hpp"

namespace defq {

/// Exact rational weights for the arity-2 structure map, indexed by a
/// finite list of bidifferential contraction shapes.  Each shape assigns
/// the two upper indices of each bivector argument to targets: argument
/// slot 0, argument slot 1, or a derivative on the other bivector's
/// coefficient (same-target pairs vanish identically and are excluded).
/// The weights are determined by the exact linear system expressing that
/// the arity-2 structure equation holds on a generic probe family, with
/// the minimal-support solution under the documented shape order.
struct WeightTable {
    struct Shape {
        int first = 0;  // target of the first index: 0, 1, or 2 (= other coeff)
        int second = 1; // target of the second index
        auto operator<=>(const Shape&) const = default;
    };

    std::vector<std::pair<Shape, Shape>> shapes; // per (arg1, arg2)
    std::vector<Rat> weights;
    int order_cap = 2;

    static const WeightTable& solved();

    std::string serialize() const;
    static WeightTable deserialize(const std::string& text);
};

/// First structure map: the antisymmetrization map, extended over exterior
/// form coefficients by passthrough.
FiberPolyOp u1(const FiberPolyVec& g);

/// Second structure map at deformation order two.  Supported degree
/// combinations: both arguments of polyvector degree 0 or 1.  Vanishes
/// whenever an argument is a vector field (the minimal-support gauge,
/// consistent with the structure equation) and in particular on
/// (vector, vector) pairs and on at-most-linear vector fields.
FiberPolyOp u2(const FiberPolyVec& g1, const FiberPolyVec& g2);

/// The fiberwise morphism with maps u1 (and u2 when arity_cap == 2) between
/// (forms valued in polyvectors, exterior d, Schouten) and (forms valued in
/// operators, exterior d + Hochschild, Gerstenhaber).  The structural
/// vanishing predicate encodes: all-vector-field tuples vanish; tuples with
/// an at-most-linear vector field vanish; arity-2 tuples with any vector
/// field vanish.
LinfMorphism assemble_fiber_morphism(int arity_cap, int d, int trunc);

} // namespace defq
