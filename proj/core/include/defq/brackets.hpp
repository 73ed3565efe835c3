#pragma once

#include "defq/poly_op.hpp"
#include "defq/poly_vec.hpp"

namespace defq {

/// Schouten-Nijenhuis bracket: the Lie bracket of vector fields extended to
/// polyvector fields as a graded biderivation of the wedge product.  Degree
/// additive ([k1] x [k2] -> [k1+k2]); graded antisymmetry and graded Jacobi
/// hold for the degrees k and, on form-valued elements, for the total
/// parities q + k.
///
/// Convention (locked by the bracket-axiom tests and documented in
/// docs/conventions.md): writing a polyvector as a superfunction with odd
/// slot generators, [u, w] = sum_i (u dR_i) (d/dy^i w)
///                         - (-1)^{k1 k2} sum_i (w dR_i) (d/dy^i u),
/// where dR_i is the right derivative in the i-th slot generator.  On a
/// (vector, section) pair this is the directional derivative.
FiberPolyVec schouten(const FiberPolyVec& a, const FiberPolyVec& b);

/// Gerstenhaber bracket via slot insertion with the alternating signs
/// (-1)^{i k2} per insertion position and the (-1)^{k1 k2} exchange term;
/// on form-valued elements the fiberwise bracket is extended by
/// [w1 P1, w2 P2] = (-1)^{k1 q2} (w1 ^ w2) [P1, P2].
FiberPolyOp gerstenhaber(const FiberPolyOp& a, const FiberPolyOp& b);

/// Hochschild differential: the interior derivation by the multiplication,
/// [m, .]; degree k -> k+1, squares to zero.
FiberPolyOp hochschild_d(const FiberPolyOp& a);

/// Antisymmetrization map from polyvector fields to polydifferential
/// operators, normalized by 1/(k+1)!; identity on sections and vector
/// fields; lands in Hochschild cocycles.
FiberPolyOp hkr(const FiberPolyVec& a);

/// Degree-0 vector-field-valued elements reinterpreted as first-order
/// operators (on which hkr is the identity).
FiberPolyOp vec_to_op(const FiberPolyVec& a);

/// Action of a vector-field-valued form on a section, v = c y^a dx^S d/dy^t
/// acting as a derivation: (c y^a dx^S) ^ d a / dy^t.
FormSection vec_action(const FiberPolyVec& v, const FormSection& a);

/// Composition P1 o P2 of two degree-0 (single-slot, exterior-degree-0)
/// operators.
FiberPolyOp compose_ops(const FiberPolyOp& p1, const FiberPolyOp& p2);

} // namespace defq
