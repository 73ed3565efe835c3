#pragma once

#include "defq/kontsevich.hpp"
#include "defq/manifold_spec.hpp"

namespace defq {

/// Formal associative deformation of the pointwise product: coefficient
/// tables c[n] for hbar^n, with c[0] the pointwise multiplication.  The
/// antisymmetrization of c[1] is the Poisson bracket and associativity
/// holds modulo hbar^{hbar_order+1} (both verified at construction).
struct StarProduct {
    int d = 0;
    int hbar_order = 0;
    std::vector<FiberPolyOp> c; // base-level bidifferential tables

    /// All orders combined into one operator with deformation-parameter
    /// powers in the coefficients.
    FiberPolyOp combined() const;

    /// f * g modulo hbar^{hbar_order+1}.
    CoeffPoly apply(const CoeffPoly& f, const CoeffPoly& g) const;
};

/// Everything the downstream checks need from one end-to-end run.
struct PipelineArtifacts {
    FedosovState st;
    LinfMorphism contracted; // source: base polyvector fields
    std::shared_ptr<const ProbeBasis> probes;
    int arity_cap = 1;
};

/// Resolution + twist + contraction for the spec's connection.
PipelineArtifacts build_pipeline(const ManifoldSpec& spec);

/// Full synthesis from the spec's Poisson structure:
/// c_n = (1/n!) mu(sigma(U_n(alpha, .., alpha))).
StarProduct build_star_product(const ManifoldSpec& spec);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// The invariance chain for a finite affine symmetry group: invariant
/// connection (precondition, error naming the violating element), g.A = A,
/// g o tau = tau o g, equivariance of the contracted structure maps, and
/// invariance of the star product when a Poisson structure is present.
std::vector<CheckResult> check_equivariance(const ManifoldSpec& spec);

} // namespace defq
