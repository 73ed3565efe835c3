#include "defq/poly_vec.hpp"

#include <sstream>

#include "defq/errors.hpp"

namespace defq {

FiberPolyVec FiberPolyVec::from_section(const FormSection& s) {
    FiberPolyVec v(s.dim(), s.trunc());
    v.valid_ = s.valid_to();
    for (const auto& [k, c] : s.terms()) v.add_term(k.y, k.dx, 0, c);
    return v;
}

FormSection FiberPolyVec::to_section() const {
    FormSection s(d_, trunc_);
    s.set_valid(valid_);
    for (const auto& [k, c] : terms_) {
        if (k.dy != 0) throw ValidationError("element is not a section");
        s.add_term(k.y, k.dx, c);
    }
    return s;
}

void FiberPolyVec::add_term(const YIndex& y, Mask dx, Mask dy, const CoeffPoly& c) {
    if (static_cast<int>(y.size()) != d_)
        throw ValidationError("fiber multi-index length does not match dimension");
    if (family_ == Family::base && (ydeg(y) > 0 || dx != 0))
        throw ValidationError("base-level polyvector cannot carry fiber variables or forms");
    if (c.zero()) return;
    if (ydeg(y) > trunc_) {
        valid_ = vmin(valid_, trunc_);
        return;
    }
    Key k{y, dx, dy};
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(std::move(k), c);
    } else {
        it->second += c;
        if (it->second.zero()) terms_.erase(it);
    }
}

void require_compat(const FiberPolyVec& a, const FiberPolyVec& b, const char* op) {
    if (a.dim() != b.dim() || a.trunc() != b.trunc() || a.family() != b.family())
        throw ValidationError(std::string(op) + ": dimension, truncation, or family mismatch");
}

FiberPolyVec FiberPolyVec::operator+(const FiberPolyVec& o) const {
    require_compat(*this, o, "add");
    FiberPolyVec r = *this;
    r.valid_ = vmin(valid_, o.valid_);
    for (const auto& [k, c] : o.terms_) r.add_term(k.y, k.dx, k.dy, c);
    return r;
}

FiberPolyVec FiberPolyVec::operator-() const {
    FiberPolyVec r(d_, trunc_, family_);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
}

FiberPolyVec FiberPolyVec::operator-(const FiberPolyVec& o) const { return *this + (-o); }

FiberPolyVec FiberPolyVec::scaled(const Rat& c) const {
    FiberPolyVec r(d_, trunc_, family_);
    r.valid_ = valid_;
    if (is_zero(c)) return r;
    for (const auto& [k, v] : terms_) r.terms_.emplace(k, v.scaled(c));
    return r;
}

bool FiberPolyVec::operator==(const FiberPolyVec& o) const {
    return d_ == o.d_ && trunc_ == o.trunc_ && family_ == o.family_ && terms_ == o.terms_;
}

FiberPolyVec FiberPolyVec::operator*(const FiberPolyVec& o) const {
    require_compat(*this, o, "wedge");
    FiberPolyVec r(d_, trunc_, family_);
    r.valid_ = vmin(vshift(valid_, o.min_y_degree()), vshift(o.valid_, min_y_degree()));
    for (const auto& [ka, ca] : terms_) {
        for (const auto& [kb, cb] : o.terms_) {
            if ((ka.dx & kb.dx) || (ka.dy & kb.dy)) continue;
            // Written order: dx_a dy_a dx_b dy_b -> dx_a dx_b dy_a dy_b.
            // dx_b crosses dy_a, then the two words merge.
            int sign = merge_sign(ka.dx, kb.dx) * merge_sign(ka.dy, kb.dy);
            if ((mask_count(kb.dx) * mask_count(ka.dy)) % 2) sign = -sign;
            CoeffPoly c = ca * cb;
            if (sign < 0) c = -c;
            r.add_term(yadd(ka.y, kb.y), ka.dx | kb.dx, ka.dy | kb.dy, c);
        }
    }
    return r;
}

int FiberPolyVec::degree(int fallback) const {
    if (terms_.empty()) return fallback;
    int k = mask_count(terms_.begin()->first.dy) - 1;
    for (const auto& [key, c] : terms_)
        if (mask_count(key.dy) - 1 != k)
            throw ValidationError("polyvector has mixed degrees");
    return k;
}

bool FiberPolyVec::homogeneous_degree() const {
    if (terms_.empty()) return true;
    int k = mask_count(terms_.begin()->first.dy);
    for (const auto& [key, c] : terms_)
        if (mask_count(key.dy) != k) return false;
    return true;
}

FiberPolyVec FiberPolyVec::ext_component(int q) const {
    FiberPolyVec r(d_, trunc_, family_);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_)
        if (mask_count(k.dx) == q) r.terms_.emplace(k, c);
    return r;
}

FiberPolyVec FiberPolyVec::component_k(int k) const {
    FiberPolyVec r(d_, trunc_, family_);
    r.valid_ = valid_;
    for (const auto& [key, c] : terms_)
        if (mask_count(key.dy) - 1 == k) r.terms_.emplace(key, c);
    return r;
}

FiberPolyVec FiberPolyVec::y_truncated(int bound) const {
    FiberPolyVec r(d_, trunc_, family_);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_)
        if (ydeg(k.y) <= bound) r.terms_.emplace(k, c);
    return r;
}

int FiberPolyVec::max_ext_degree() const {
    int q = 0;
    for (const auto& [k, c] : terms_) q = std::max(q, mask_count(k.dx));
    return q;
}

int FiberPolyVec::min_ext_degree() const {
    if (terms_.empty()) return 0;
    int q = kInf;
    for (const auto& [k, c] : terms_) q = std::min(q, mask_count(k.dx));
    return q;
}

int FiberPolyVec::max_y_degree() const {
    int p = 0;
    for (const auto& [k, c] : terms_) p = std::max(p, ydeg(k.y));
    return p;
}

int FiberPolyVec::min_y_degree() const {
    if (terms_.empty()) return 0;
    int p = kInf;
    for (const auto& [k, c] : terms_) p = std::min(p, ydeg(k.y));
    return p;
}

std::set<Grading> FiberPolyVec::gradings() const {
    std::set<Grading> g;
    for (const auto& [k, c] : terms_)
        g.insert(Grading{mask_count(k.dx), mask_count(k.dy) - 1, ydeg(k.y)});
    return g;
}

std::string FiberPolyVec::str() const {
    if (terms_.empty()) return "0";
    const char* slot = family_ == Family::base ? "ddx" : "ddy";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        std::string ys = yindex_str(k.y, "y");
        std::string xs = mask_str(k.dx, "dx");
        std::string ds = mask_str(k.dy, slot);
        if (!ys.empty()) os << "*" << ys;
        if (!xs.empty()) os << "*" << xs;
        if (!ds.empty()) os << "*" << ds;
    }
    return os.str();
}

} // namespace defq
