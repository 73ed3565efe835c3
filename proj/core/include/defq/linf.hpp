#pragma once

#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "defq/fedosov.hpp"

namespace defq {

/// A homogeneous element of one of the two graded Lie algebras in play
/// (polyvector side or operator side).  The integer degree used by all
/// structure-map machinery is the total degree q + k.
using GradedValue = std::variant<FiberPolyVec, FiberPolyOp>;

bool gv_zero(const GradedValue& v);
int gv_total_degree(const GradedValue& v); // requires nonzero, homogeneous
GradedValue gv_add(const GradedValue& a, const GradedValue& b);
GradedValue gv_scale(const GradedValue& a, const Rat& c);
GradedValue gv_neg(const GradedValue& a);
bool gv_equal(const GradedValue& a, const GradedValue& b);
std::string gv_str(const GradedValue& v);

const FiberPolyVec& gv_vec(const GradedValue& v);
const FiberPolyOp& gv_op(const GradedValue& v);

/// Graded bracket dispatch: Schouten on polyvector pairs, Gerstenhaber on
/// operator pairs; a degree <= 0 polyvector against an operator is promoted
/// first.
GradedValue gv_bracket(const GradedValue& a, const GradedValue& b);

/// A DGLA presented by evaluable structure: a degree +1 differential (empty
/// function = zero differential) and a degree 0 graded bracket.
struct DglaHandle {
    std::function<GradedValue(const GradedValue&)> diff;
    std::function<GradedValue(const GradedValue&, const GradedValue&)> bracket;

    GradedValue d(const GradedValue& x) const;
    bool has_diff() const { return static_cast<bool>(diff); }
};

using PolyMap = std::function<GradedValue(std::span<const GradedValue>)>;

/// A morphism of strong homotopy structures represented by its table of
/// graded-symmetric structure maps up to a hard arity cap.  known_zero is
/// the structural-vanishing predicate consulted before every evaluation;
/// requests above the cap that are not structurally zero fail loudly.
struct LinfMorphism {
    DglaHandle source;
    DglaHandle target;
    int arity_cap = 1;
    int hbar_cap = 2;
    std::vector<PolyMap> maps; // maps[i] evaluates arity i+1
    std::function<bool(std::span<const GradedValue>)> known_zero;
    int dim = 0;
    int trunc = 0;

    GradedValue zero_target() const;
    GradedValue zero_source() const;
};

/// Cap- and vanishing-aware structure-map evaluation.
GradedValue eval_map(const LinfMorphism& F, int n, std::span<const GradedValue> args);

/// Left-minus-right of the structure equation at arity n evaluated on a
/// homogeneous tuple; zero iff the relation holds there.
GradedValue linf_defect(const LinfMorphism& F, int n, std::span<const GradedValue> args);

/// The bracket side of the structure equation alone (for the
/// differential-closedness sign lock).
GradedValue linf_rhs(const LinfMorphism& F, int n, std::span<const GradedValue> args);

/// The differential on graded polylinear maps,
///   (d_hom Psi)(g1..gn) = d2 Psi(g1..gn)
///       - sum_i (-1)^{k_1+..+k_{i-1}+shift} Psi(g1, .., d1 g_i, .., gn),
/// for Psi of the given arity landing in target[shift].
PolyMap d_hom(PolyMap psi, int arity, int shift, const DglaHandle& src, const DglaHandle& tgt);

/// Odd element B used for twisting; for the resolution connection form the
/// wedge powers beyond the manifold dimension vanish.
struct MaurerCartanElement {
    GradedValue value;
    int nilpotency_bound = 0;
};

/// Twisting: new structure maps sum_m (1/m!) F_{n+m}(B, .., B, v1, .., vn),
/// with both differentials shifted by the bracket with B.  Terms that are
/// structurally zero (vanishing predicate or form saturation) are skipped
/// before any capacity check; a genuinely required arity above the cap
/// raises CapacityError naming the missing arity.
LinfMorphism twist(const LinfMorphism& F, const MaurerCartanElement& b_src,
                   const MaurerCartanElement& b_tgt);

/// Modification by a polylinear map V_n of shifted degree: arities below n
/// unchanged, arity n corrected by the exact term, arity n+1 corrected by
/// the quadratic expansion.  Needing corrections beyond arity n+1 (cap >
/// n+1) is a capacity error.
LinfMorphism shift_morphism(const LinfMorphism& F, int n, PolyMap v_n);

/// Monomial basis x^a * (slot wedge) of base-level polyvector fields up to
/// an x-degree bound, with exact decomposition of arbitrary elements.
struct ProbeBasis {
    int d = 0;
    int max_xdeg = 0;
    std::vector<FiberPolyVec> elements;
    std::vector<int> degrees; // polyvector degree per element

    static ProbeBasis standard(int d, int max_xdeg);
    /// Exact expansion; CapacityError when the element exceeds the basis.
    std::vector<std::pair<Rat, std::size_t>> decompose(const FiberPolyVec& v) const;
};

/// Composition with the resolution embedding: the source becomes the
/// base-level polyvector DGLA (zero differential), every argument is
/// lifted by tau o fiberize before evaluation.
LinfMorphism compose_with_tau(const LinfMorphism& F, const FedosovState& st);

/// Arity-increasing induction that kills positive exterior degrees of the
/// structure-map values on the probe family, top degree downward, each step
/// via solve_exact; the returned morphism has exterior-degree-0 values at
/// the processed arities (all of them when up_to_arity < 0).
LinfMorphism contract_to_fiber_zero(const LinfMorphism& F, const FedosovState& st,
                                    std::shared_ptr<const ProbeBasis> probes,
                                    int up_to_arity = -1);

} // namespace defq
