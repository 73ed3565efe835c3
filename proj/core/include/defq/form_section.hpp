#pragma once

#include <map>
#include <set>
#include <string>

#include "defq/coeff_poly.hpp"
#include "defq/graded.hpp"

namespace defq {

/// Element of the exterior-form algebra with values in the completed
/// symmetric algebra of the cotangent bundle: a sparse sum of terms
/// (coefficient polynomial, symmetric y multi-index, antisymmetric dx index
/// set), truncated in y-degree.
///
/// Canonical term order is coefficient * y-monomial * dx-word (ascending);
/// dx generators are odd, y generators even.  Immutable by convention once
/// built: all operations return new values.
class FormSection {
public:
    struct Key {
        YIndex y;
        Mask dx = 0;
        auto operator<=>(const Key&) const = default;
    };

    FormSection() = default;
    FormSection(int d, int trunc) : d_(d), trunc_(trunc) {}

    static FormSection constant(int d, int trunc, const Rat& c);
    /// Scalar (dx-free, y-free) section from a base polynomial.
    static FormSection from_poly(const CoeffPoly& p, int trunc);

    int dim() const { return d_; }
    int trunc() const { return trunc_; }
    int valid_to() const { return valid_; }
    void set_valid(int v) { valid_ = vmin(valid_, v); }

    bool zero() const { return terms_.empty(); }
    const std::map<Key, CoeffPoly>& terms() const { return terms_; }

    /// Adds coeff * y^y * dx^dx; silently drops y-degrees above the
    /// truncation order (that is the truncation contract) but then caps the
    /// validity bound.
    void add_term(const YIndex& y, Mask dx, const CoeffPoly& c);

    FormSection operator+(const FormSection& o) const;
    FormSection operator-(const FormSection& o) const;
    FormSection operator-() const;
    FormSection scaled(const Rat& c) const;

    /// Graded-commutative wedge product; Koszul sign from the dx factors.
    FormSection operator*(const FormSection& o) const;

    bool operator==(const FormSection& o) const;

    /// Partial derivative in the fiber variable y_i (even operator).
    FormSection dy(int i) const;
    /// Partial derivative of the coefficients in the base coordinate x_i.
    FormSection dx_coeff(int i) const;
    /// Multiplication by y_i.
    FormSection mul_y(int i) const;
    /// Left exterior multiplication by dx_i.
    FormSection wedge_dx(int i) const;
    /// Interior derivative (from the left) removing dx_i.
    FormSection interior_dx(int i) const;

    /// The (p, q) = (ydeg, extdeg) homogeneous component.
    FormSection component(int p, int q) const;
    /// All terms of exterior degree q.
    FormSection ext_component(int q) const;
    /// Truncate to y-degree <= bound (used when comparing through a
    /// validity bound).
    FormSection y_truncated(int bound) const;

    int max_ext_degree() const;
    int min_y_degree() const;

    std::set<Grading> gradings() const;

    std::string str() const;

private:
    int d_ = 0;
    int trunc_ = 0;
    int valid_ = kInf;
    std::map<Key, CoeffPoly> terms_;
};

/// Structural compatibility (dimension, truncation) or ValidationError.
void require_compat(const FormSection& a, const FormSection& b, const char* op);

} // namespace defq
