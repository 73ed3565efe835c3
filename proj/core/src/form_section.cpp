#include "defq/form_section.hpp"

#include <sstream>

#include "defq/errors.hpp"

namespace defq {

FormSection FormSection::constant(int d, int trunc, const Rat& c) {
    FormSection s(d, trunc);
    s.add_term(yzero(d), 0, CoeffPoly(d, c));
    return s;
}

FormSection FormSection::from_poly(const CoeffPoly& p, int trunc) {
    FormSection s(p.dim(), trunc);
    s.add_term(yzero(p.dim()), 0, p);
    return s;
}

void FormSection::add_term(const YIndex& y, Mask dx, const CoeffPoly& c) {
    if (static_cast<int>(y.size()) != d_)
        throw ValidationError("fiber multi-index length does not match dimension");
    if (c.zero()) return;
    if (ydeg(y) > trunc_) {
        valid_ = vmin(valid_, trunc_);
        return;
    }
    Key k{y, dx};
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(std::move(k), c);
    } else {
        it->second += c;
        if (it->second.zero()) terms_.erase(it);
    }
}

void require_compat(const FormSection& a, const FormSection& b, const char* op) {
    if (a.dim() != b.dim() || a.trunc() != b.trunc())
        throw ValidationError(std::string(op) + ": dimension or truncation mismatch");
}

FormSection FormSection::operator+(const FormSection& o) const {
    require_compat(*this, o, "add");
    FormSection r = *this;
    r.valid_ = vmin(valid_, o.valid_);
    for (const auto& [k, c] : o.terms_) r.add_term(k.y, k.dx, c);
    return r;
}

FormSection FormSection::operator-() const {
    FormSection r(d_, trunc_);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
}

FormSection FormSection::operator-(const FormSection& o) const { return *this + (-o); }

FormSection FormSection::scaled(const Rat& c) const {
    FormSection r(d_, trunc_);
    r.valid_ = valid_;
    if (is_zero(c)) return r;
    for (const auto& [k, v] : terms_) r.terms_.emplace(k, v.scaled(c));
    return r;
}

FormSection FormSection::operator*(const FormSection& o) const {
    require_compat(*this, o, "wedge");
    FormSection r(d_, trunc_);
    r.valid_ = vmin(vshift(valid_, o.min_y_degree()), vshift(o.valid_, min_y_degree()));
    for (const auto& [ka, ca] : terms_) {
        for (const auto& [kb, cb] : o.terms_) {
            if (ka.dx & kb.dx) continue;
            int sign = merge_sign(ka.dx, kb.dx);
            CoeffPoly c = ca * cb;
            if (sign < 0) c = -c;
            r.add_term(yadd(ka.y, kb.y), ka.dx | kb.dx, c);
        }
    }
    return r;
}

bool FormSection::operator==(const FormSection& o) const {
    return d_ == o.d_ && trunc_ == o.trunc_ && terms_ == o.terms_;
}

FormSection FormSection::dy(int i) const {
    FormSection r(d_, trunc_);
    r.valid_ = vshift(valid_, -1);
    const std::size_t idx = static_cast<std::size_t>(i - 1);
    for (const auto& [k, c] : terms_) {
        if (k.y[idx] == 0) continue;
        YIndex y = k.y;
        y[idx] -= 1;
        r.add_term(y, k.dx, c.scaled(k.y[idx]));
    }
    return r;
}

FormSection FormSection::dx_coeff(int i) const {
    FormSection r(d_, trunc_);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_) r.add_term(k.y, k.dx, c.dx(i));
    return r;
}

FormSection FormSection::mul_y(int i) const {
    FormSection r(d_, trunc_);
    r.valid_ = vshift(valid_, 1);
    const std::size_t idx = static_cast<std::size_t>(i - 1);
    for (const auto& [k, c] : terms_) {
        YIndex y = k.y;
        y[idx] += 1;
        r.add_term(y, k.dx, c);
    }
    if (r.valid_ > trunc_ && r.valid_ < kInf) r.valid_ = trunc_;
    return r;
}

FormSection FormSection::wedge_dx(int i) const {
    FormSection r(d_, trunc_);
    r.valid_ = valid_;
    const Mask bit = mask_bit(i);
    for (const auto& [k, c] : terms_) {
        if (k.dx & bit) continue;
        int sign = merge_sign(bit, k.dx);
        r.add_term(k.y, k.dx | bit, sign < 0 ? -c : c);
    }
    return r;
}

FormSection FormSection::interior_dx(int i) const {
    FormSection r(d_, trunc_);
    r.valid_ = valid_;
    const Mask bit = mask_bit(i);
    for (const auto& [k, c] : terms_) {
        if (!(k.dx & bit)) continue;
        int sign = remove_front_sign(i, k.dx);
        r.add_term(k.y, k.dx & ~bit, sign < 0 ? -c : c);
    }
    return r;
}

FormSection FormSection::component(int p, int q) const {
    FormSection r(d_, trunc_);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_)
        if (ydeg(k.y) == p && mask_count(k.dx) == q) r.terms_.emplace(k, c);
    return r;
}

FormSection FormSection::ext_component(int q) const {
    FormSection r(d_, trunc_);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_)
        if (mask_count(k.dx) == q) r.terms_.emplace(k, c);
    return r;
}

FormSection FormSection::y_truncated(int bound) const {
    FormSection r(d_, trunc_);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_)
        if (ydeg(k.y) <= bound) r.terms_.emplace(k, c);
    return r;
}

int FormSection::max_ext_degree() const {
    int q = 0;
    for (const auto& [k, c] : terms_) q = std::max(q, mask_count(k.dx));
    return q;
}

int FormSection::min_y_degree() const {
    int p = kInf;
    for (const auto& [k, c] : terms_) p = std::min(p, ydeg(k.y));
    return terms_.empty() ? 0 : p;
}

std::set<Grading> FormSection::gradings() const {
    std::set<Grading> g;
    for (const auto& [k, c] : terms_) g.insert(Grading{mask_count(k.dx), -1, ydeg(k.y)});
    return g;
}

std::string FormSection::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        std::string ys = yindex_str(k.y, "y");
        std::string xs = mask_str(k.dx, "dx");
        if (!ys.empty()) os << "*" << ys;
        if (!xs.empty()) os << "*" << xs;
    }
    return os.str();
}

} // namespace defq
