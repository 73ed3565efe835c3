#pragma once

#include "defq/brackets.hpp"
#include "defq/connection.hpp"

namespace defq {

// The resolution differentials act on all three graded containers the same
// way: on the (y, dx) content of each term, slots untouched.

FormSection delta(const FormSection& a);
FiberPolyVec delta(const FiberPolyVec& a);
FiberPolyOp delta(const FiberPolyOp& a);

/// Homotopy inverse: per homogeneous (p, q) component, y^k i(d/dx^k)
/// scaled by 1/(p+q); zero on (0, 0).
FormSection delta_inv(const FormSection& a);
FiberPolyVec delta_inv(const FiberPolyVec& a);
FiberPolyOp delta_inv(const FiberPolyOp& a);

/// Projection to the (p, q) = (0, 0) part.
FormSection sigma(const FormSection& a);
FiberPolyVec sigma(const FiberPolyVec& a);
FiberPolyOp sigma(const FiberPolyOp& a);

/// Plain exterior derivative dx^i d/dx^i on coefficients.
FormSection exterior_d(const FormSection& a);
FiberPolyVec exterior_d(const FiberPolyVec& a);
FiberPolyOp exterior_d(const FiberPolyOp& a);

/// Covariant derivation d + Gamma-action; anticommutes with delta for every
/// symmetric Christoffel table.
FormSection nabla(const FormSection& a, const ConnectionData& conn);
FiberPolyVec nabla(const FiberPolyVec& a, const ConnectionData& conn);
FiberPolyOp nabla(const FiberPolyOp& a, const ConnectionData& conn);

/// The solved resolution data: curvature R, the degree >= 2 connection
/// correction A with delta_inv A = 0, and the flatness certificate bound.
struct FedosovState {
    ConnectionData conn;
    int trunc = 0;
    FiberPolyVec R;
    FiberPolyVec A;
    /// y-degree through which the flatness residual is certified zero.
    int flat_valid_to = 0;

    int dim() const { return conn.dim(); }
};

/// Degree-by-degree iteration A = delta_inv R + delta_inv(nabla A + 1/2 [A, A]).
FedosovState solve_connection(const ConnectionData& conn, int trunc);

/// The flat-section differential nabla - delta + [A, .].
FormSection fedosov_d(const FormSection& a, const FedosovState& st);
FiberPolyVec fedosov_d(const FiberPolyVec& a, const FedosovState& st);
FiberPolyOp fedosov_d(const FiberPolyOp& a, const FedosovState& st);

/// The total connection one-form B with D = d + [B, .]: the delta
/// generator, the Christoffel term, and A combined.
FiberPolyVec fedosov_b(const FedosovState& st);

/// Solves D b = a for D-closed a of exterior degree q >= 1 by the recursion
/// b = -delta_inv a + delta_inv(nabla b + [A, b]); the result satisfies
/// sigma b = 0 and delta_inv b = 0.  Exterior degree 0 input or a
/// non-D-closed input (through the validity bound) is an error.
FormSection solve_exact(const FormSection& a, const FedosovState& st);
FiberPolyVec solve_exact(const FiberPolyVec& a, const FedosovState& st);
FiberPolyOp solve_exact(const FiberPolyOp& a, const FedosovState& st);

/// Lift of (p, q) = (0, 0) data to a D-closed element with sigma(tau a0) = a0,
/// by the recursion a = a0 + delta_inv(nabla a + [A, a]).
FormSection tau_lift(const FormSection& a0, const FedosovState& st);
FiberPolyVec tau_lift(const FiberPolyVec& a0, const FedosovState& st);
FiberPolyOp tau_lift(const FiberPolyOp& a0, const FedosovState& st);

/// tau applied to a base polynomial function.
FormSection tau_lift_fn(const CoeffPoly& f, const FedosovState& st);

/// Base polyvector fields embedded as y-constant fiberwise ones (the
/// inverse of the projection mu on polyvectors).
FiberPolyVec fiberize(const FiberPolyVec& base, int trunc);

/// mu o sigma: probes sigma(P(tau x^a, ...)) on the monomial basis and
/// reconstructs the unique agreeing base-level operator by an exact
/// triangular solve.  P must be D-closed of exterior degree 0 and its
/// derivative order must fit inside the truncation margin.
FiberPolyOp mu_project(const FiberPolyOp& P, const FedosovState& st);

/// mu o sigma for polyvector fields (coordinate-function probes).
FiberPolyVec mu_project_vec(const FiberPolyVec& v, const FedosovState& st);

/// Scalar (y-free, dx-free) part as a base polynomial.
CoeffPoly scalar_part(const FormSection& s);

} // namespace defq
