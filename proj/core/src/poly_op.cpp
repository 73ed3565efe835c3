#include "defq/poly_op.hpp"

#include <sstream>

#include "defq/errors.hpp"

namespace defq {

FiberPolyOp FiberPolyOp::from_section(const FormSection& s) {
    FiberPolyOp p(s.dim(), s.trunc());
    p.valid_ = s.valid_to();
    for (const auto& [k, c] : s.terms()) p.add_term(k.y, k.dx, {}, c);
    return p;
}

FormSection FiberPolyOp::to_section() const {
    FormSection s(d_, trunc_);
    s.set_valid(valid_);
    for (const auto& [k, c] : terms_) {
        if (!k.slots.empty()) throw ValidationError("element is not a section");
        s.add_term(k.y, k.dx, c);
    }
    return s;
}

FiberPolyOp FiberPolyOp::multiplication(int d, int trunc, Family family) {
    FiberPolyOp m(d, trunc, family);
    m.add_term(yzero(d), 0, {yzero(d), yzero(d)}, CoeffPoly(d, 1));
    return m;
}

void FiberPolyOp::add_term(const YIndex& y, Mask dx, std::vector<YIndex> slots, const CoeffPoly& c) {
    if (static_cast<int>(y.size()) != d_)
        throw ValidationError("fiber multi-index length does not match dimension");
    for (const auto& s : slots)
        if (static_cast<int>(s.size()) != d_)
            throw ValidationError("slot multi-index length does not match dimension");
    if (family_ == Family::base && (ydeg(y) > 0 || dx != 0))
        throw ValidationError("base-level operator cannot carry fiber variables or forms");
    if (c.zero()) return;
    if (ydeg(y) > trunc_) {
        valid_ = vmin(valid_, trunc_);
        return;
    }
    Key k{y, dx, std::move(slots)};
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(std::move(k), c);
    } else {
        it->second += c;
        if (it->second.zero()) terms_.erase(it);
    }
}

void require_compat(const FiberPolyOp& a, const FiberPolyOp& b, const char* op) {
    if (a.dim() != b.dim() || a.trunc() != b.trunc() || a.family() != b.family())
        throw ValidationError(std::string(op) + ": dimension, truncation, or family mismatch");
}

FiberPolyOp FiberPolyOp::operator+(const FiberPolyOp& o) const {
    require_compat(*this, o, "add");
    FiberPolyOp r = *this;
    r.valid_ = vmin(valid_, o.valid_);
    for (const auto& [k, c] : o.terms_) r.add_term(k.y, k.dx, k.slots, c);
    return r;
}

FiberPolyOp FiberPolyOp::operator-() const {
    FiberPolyOp r(d_, trunc_, family_);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
}

FiberPolyOp FiberPolyOp::operator-(const FiberPolyOp& o) const { return *this + (-o); }

FiberPolyOp FiberPolyOp::scaled(const Rat& c) const {
    FiberPolyOp r(d_, trunc_, family_);
    r.valid_ = valid_;
    if (is_zero(c)) return r;
    for (const auto& [k, v] : terms_) r.terms_.emplace(k, v.scaled(c));
    return r;
}

bool FiberPolyOp::operator==(const FiberPolyOp& o) const {
    return d_ == o.d_ && trunc_ == o.trunc_ && family_ == o.family_ && terms_ == o.terms_;
}

int FiberPolyOp::degree(int fallback) const {
    if (terms_.empty()) return fallback;
    int k = static_cast<int>(terms_.begin()->first.slots.size()) - 1;
    for (const auto& [key, c] : terms_)
        if (static_cast<int>(key.slots.size()) - 1 != k)
            throw ValidationError("operator has mixed degrees");
    return k;
}

bool FiberPolyOp::homogeneous_degree() const {
    if (terms_.empty()) return true;
    std::size_t k = terms_.begin()->first.slots.size();
    for (const auto& [key, c] : terms_)
        if (key.slots.size() != k) return false;
    return true;
}

FiberPolyOp FiberPolyOp::ext_component(int q) const {
    FiberPolyOp r(d_, trunc_, family_);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_)
        if (mask_count(k.dx) == q) r.terms_.emplace(k, c);
    return r;
}

FiberPolyOp FiberPolyOp::y_truncated(int bound) const {
    FiberPolyOp r(d_, trunc_, family_);
    r.valid_ = valid_;
    for (const auto& [k, c] : terms_)
        if (ydeg(k.y) <= bound) r.terms_.emplace(k, c);
    return r;
}

int FiberPolyOp::max_ext_degree() const {
    int q = 0;
    for (const auto& [k, c] : terms_) q = std::max(q, mask_count(k.dx));
    return q;
}

int FiberPolyOp::min_ext_degree() const {
    if (terms_.empty()) return 0;
    int q = kInf;
    for (const auto& [k, c] : terms_) q = std::min(q, mask_count(k.dx));
    return q;
}

int FiberPolyOp::min_y_degree() const {
    if (terms_.empty()) return 0;
    int p = kInf;
    for (const auto& [k, c] : terms_) p = std::min(p, ydeg(k.y));
    return p;
}

int FiberPolyOp::max_slot_order() const {
    int m = 0;
    for (const auto& [k, c] : terms_)
        for (const auto& s : k.slots) m = std::max(m, ydeg(s));
    return m;
}

std::set<Grading> FiberPolyOp::gradings() const {
    std::set<Grading> g;
    for (const auto& [k, c] : terms_)
        g.insert(Grading{mask_count(k.dx), static_cast<int>(k.slots.size()) - 1, ydeg(k.y)});
    return g;
}

std::string FiberPolyOp::str() const {
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
        os << "*[";
        for (std::size_t i = 0; i < k.slots.size(); ++i) {
            if (i) os << "|";
            std::string ss = yindex_str(k.slots[i], family_ == Family::base ? "dx" : "dy");
            os << (ss.empty() ? "1" : ss);
        }
        os << "]";
    }
    return os.str();
}

FormSection apply_op(const FiberPolyOp& op, std::span<const FormSection> args) {
    if (op.family() != Family::fiber)
        throw ValidationError("apply_op expects a fiberwise operator");
    FormSection acc(op.dim(), op.trunc());
    int valid = op.valid_to();
    for (const auto& a : args) {
        if (a.dim() != op.dim() || a.trunc() != op.trunc())
            throw ValidationError("apply_op: dimension or truncation mismatch");
        valid = vmin(valid, a.valid_to());
    }
    for (const auto& [k, c] : op.terms()) {
        if (k.slots.size() != args.size())
            throw ValidationError("apply_op: operator degree does not match argument count");
        FormSection prod(op.dim(), op.trunc());
        prod.add_term(k.y, k.dx, c);
        for (std::size_t i = 0; i < args.size(); ++i) {
            FormSection der = args[i];
            for (int t = 1; t <= op.dim(); ++t)
                for (int rep = 0; rep < k.slots[i][static_cast<std::size_t>(t - 1)]; ++rep)
                    der = der.dy(t);
            prod = prod * der;
            if (prod.zero()) break;
        }
        acc = acc + prod;
    }
    acc.set_valid(vshift(valid, -op.max_slot_order()));
    return acc;
}

CoeffPoly apply_base_op(const FiberPolyOp& op, std::span<const CoeffPoly> args, int hbar_cap) {
    if (op.family() != Family::base)
        throw ValidationError("apply_base_op expects a base-level operator");
    CoeffPoly acc(op.dim());
    for (const auto& [k, c] : op.terms()) {
        if (k.slots.size() != args.size())
            throw ValidationError("apply_base_op: operator degree does not match argument count");
        CoeffPoly prod = c;
        for (std::size_t i = 0; i < args.size(); ++i) {
            CoeffPoly der = args[i];
            for (int t = 1; t <= op.dim(); ++t)
                for (int rep = 0; rep < k.slots[i][static_cast<std::size_t>(t - 1)]; ++rep)
                    der = der.dx(t);
            prod = prod * der;
        }
        acc += prod;
    }
    if (hbar_cap >= 0) acc = acc.truncate_hbar(hbar_cap);
    return acc;
}

} // namespace defq
