#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "defq/form_section.hpp"

namespace defq {

/// Exterior-form-valued fiberwise polydifferential operator: each term
/// carries an ordered tuple of derivative multi-indices, one per argument
/// slot (slots are a tensor product, not symmetrized).  A term with k+1
/// slots has operator degree k; slot-free terms are sections (k = -1).
/// The total derivative order per element is finite by construction.
///
/// family == base holds polydifferential operators on the base (slots
/// differentiate base coordinates, coefficients are x-polynomials).
class FiberPolyOp {
public:
    struct Key {
        YIndex y;
        Mask dx = 0;
        std::vector<YIndex> slots;
        auto operator<=>(const Key&) const = default;
    };

    FiberPolyOp() = default;
    FiberPolyOp(int d, int trunc, Family family = Family::fiber)
        : d_(d), trunc_(family == Family::base ? kInf : trunc), family_(family) {}

    static FiberPolyOp from_section(const FormSection& s);
    FormSection to_section() const;

    /// The fiberwise multiplication: one term, two empty slots, unit
    /// coefficient.
    static FiberPolyOp multiplication(int d, int trunc, Family family = Family::fiber);

    int dim() const { return d_; }
    int trunc() const { return trunc_; }
    Family family() const { return family_; }
    int valid_to() const { return valid_; }
    void set_valid(int v) { valid_ = vmin(valid_, v); }

    bool zero() const { return terms_.empty(); }
    const std::map<Key, CoeffPoly>& terms() const { return terms_; }

    void add_term(const YIndex& y, Mask dx, std::vector<YIndex> slots, const CoeffPoly& c);

    FiberPolyOp operator+(const FiberPolyOp& o) const;
    FiberPolyOp operator-(const FiberPolyOp& o) const;
    FiberPolyOp operator-() const;
    FiberPolyOp scaled(const Rat& c) const;
    bool operator==(const FiberPolyOp& o) const;

    int degree(int fallback = -1) const;
    bool homogeneous_degree() const;

    FiberPolyOp ext_component(int q) const;
    FiberPolyOp y_truncated(int bound) const;
    int max_ext_degree() const;
    int min_ext_degree() const;
    int min_y_degree() const;
    /// Largest total derivative order over all slots of all terms.
    int max_slot_order() const;

    std::set<Grading> gradings() const;
    std::string str() const;

private:
    int d_ = 0;
    int trunc_ = 0;
    Family family_ = Family::fiber;
    int valid_ = kInf;
    std::map<Key, CoeffPoly> terms_;
};

void require_compat(const FiberPolyOp& a, const FiberPolyOp& b, const char* op);

/// Application of a fiberwise operator of degree k to k+1 form-section
/// arguments: each slot's fiber derivative hits its argument, and the
/// results multiply in the wedge algebra with the operator's own
/// coefficient and dx factor on the left.
FormSection apply_op(const FiberPolyOp& op, std::span<const FormSection> args);

/// Base-level application to polynomial functions.
CoeffPoly apply_base_op(const FiberPolyOp& op, std::span<const CoeffPoly> args, int hbar_cap = -1);

} // namespace defq
