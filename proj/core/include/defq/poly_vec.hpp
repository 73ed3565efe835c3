#pragma once

#include <map>
#include <set>
#include <string>

#include "defq/form_section.hpp"

namespace defq {

/// Exterior-form-valued fiberwise polyvector field: terms carry a strictly
/// increasing set of fiber-derivative slots (stored as a bitmask; the wedge
/// antisymmetry is normalized into the coefficient sign).  A term with k+1
/// slots has polyvector degree k; terms with no slots are sections (k = -1).
///
/// With family == base the same container holds polyvector fields on the
/// base: no fiber variables, no form part, slots differentiate the base
/// coordinates, no truncation.
class FiberPolyVec {
public:
    struct Key {
        YIndex y;
        Mask dx = 0;
        Mask dy = 0;
        auto operator<=>(const Key&) const = default;
    };

    FiberPolyVec() = default;
    FiberPolyVec(int d, int trunc, Family family = Family::fiber)
        : d_(d), trunc_(family == Family::base ? kInf : trunc), family_(family) {}

    static FiberPolyVec from_section(const FormSection& s);
    FormSection to_section() const; // requires every term slot-free

    int dim() const { return d_; }
    int trunc() const { return trunc_; }
    Family family() const { return family_; }
    int valid_to() const { return valid_; }
    void set_valid(int v) { valid_ = vmin(valid_, v); }

    bool zero() const { return terms_.empty(); }
    const std::map<Key, CoeffPoly>& terms() const { return terms_; }

    void add_term(const YIndex& y, Mask dx, Mask dy, const CoeffPoly& c);

    FiberPolyVec operator+(const FiberPolyVec& o) const;
    FiberPolyVec operator-(const FiberPolyVec& o) const;
    FiberPolyVec operator-() const;
    FiberPolyVec scaled(const Rat& c) const;
    bool operator==(const FiberPolyVec& o) const;

    /// Wedge product of polyvector fields (slot masks merge with Koszul
    /// signs from both the dx and the slot words).
    FiberPolyVec operator*(const FiberPolyVec& o) const;

    /// Homogeneous polyvector degree of all terms; ValidationError when
    /// mixed.  Empty containers report the requested fallback.
    int degree(int fallback = -1) const;
    bool homogeneous_degree() const;

    FiberPolyVec ext_component(int q) const;
    FiberPolyVec component_k(int k) const;
    FiberPolyVec y_truncated(int bound) const;
    int max_ext_degree() const;
    int min_ext_degree() const;
    int max_y_degree() const;
    int min_y_degree() const;

    std::set<Grading> gradings() const;
    std::string str() const;

private:
    int d_ = 0;
    int trunc_ = 0;
    Family family_ = Family::fiber;
    int valid_ = kInf;
    std::map<Key, CoeffPoly> terms_;
};

void require_compat(const FiberPolyVec& a, const FiberPolyVec& b, const char* op);

} // namespace defq
