#include "defq/coeff_poly.hpp"

#include <cctype>
#include <sstream>

#include "defq/errors.hpp"

namespace defq {

Rat rat_parse(const std::string& s) {
    if (s.empty()) throw ValidationError("empty rational literal");
    for (char c : s) {
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '/'))
            throw ValidationError("malformed rational literal '" + s + "'");
    }
    try {
        Rat r(s);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw ValidationError("malformed rational literal '" + s + "'");
    }
}

CoeffPoly CoeffPoly::variable(int d, int i, int power) {
    if (i < 1 || i > d) throw ValidationError("variable index out of range");
    CoeffPoly p(d);
    YIndex e = yzero(d);
    e[static_cast<std::size_t>(i - 1)] = power;
    p.add_term(e, 0, 1);
    return p;
}

CoeffPoly CoeffPoly::hbar(int d, int power) {
    CoeffPoly p(d);
    p.add_term(yzero(d), power, 1);
    return p;
}

void CoeffPoly::add_term(const YIndex& xexp, int hpow, const Rat& c) {
    if (static_cast<int>(xexp.size()) != d_)
        throw ValidationError("exponent vector length does not match dimension");
    if (is_zero(c)) return;
    Key k{xexp, hpow};
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(std::move(k), c);
    } else {
        it->second += c;
        if (is_zero(it->second)) terms_.erase(it);
    }
}

CoeffPoly CoeffPoly::operator+(const CoeffPoly& o) const {
    if (d_ != o.d_) throw ValidationError("dimension mismatch in polynomial sum");
    CoeffPoly r = *this;
    for (const auto& [k, c] : o.terms_) r.add_term(k.xexp, k.hpow, c);
    return r;
}

CoeffPoly& CoeffPoly::operator+=(const CoeffPoly& o) {
    if (d_ != o.d_) throw ValidationError("dimension mismatch in polynomial sum");
    for (const auto& [k, c] : o.terms_) add_term(k.xexp, k.hpow, c);
    return *this;
}

CoeffPoly CoeffPoly::operator-(const CoeffPoly& o) const { return *this + (-o); }

CoeffPoly CoeffPoly::operator-() const {
    CoeffPoly r(d_);
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
}

CoeffPoly CoeffPoly::scaled(const Rat& c) const {
    CoeffPoly r(d_);
    if (is_zero(c)) return r;
    for (const auto& [k, v] : terms_) r.terms_.emplace(k, v * c);
    return r;
}

CoeffPoly CoeffPoly::operator*(const CoeffPoly& o) const {
    if (d_ != o.d_) throw ValidationError("dimension mismatch in polynomial product");
    CoeffPoly r(d_);
    for (const auto& [ka, ca] : terms_)
        for (const auto& [kb, cb] : o.terms_)
            r.add_term(yadd(ka.xexp, kb.xexp), ka.hpow + kb.hpow, ca * cb);
    return r;
}

CoeffPoly CoeffPoly::dx(int i) const {
    CoeffPoly r(d_);
    const std::size_t idx = static_cast<std::size_t>(i - 1);
    for (const auto& [k, c] : terms_) {
        if (k.xexp[idx] == 0) continue;
        YIndex e = k.xexp;
        e[idx] -= 1;
        r.add_term(e, k.hpow, c * k.xexp[idx]);
    }
    return r;
}

CoeffPoly CoeffPoly::substitute(const std::vector<CoeffPoly>& images) const {
    if (static_cast<int>(images.size()) != d_)
        throw ValidationError("substitution needs one image per variable");
    CoeffPoly r(d_);
    for (const auto& [k, c] : terms_) {
        CoeffPoly term(d_, c);
        for (int j = 0; j < d_; ++j) {
            for (int p = 0; p < k.xexp[static_cast<std::size_t>(j)]; ++p)
                term = term * images[static_cast<std::size_t>(j)];
        }
        if (k.hpow != 0) term = term * CoeffPoly::hbar(d_, k.hpow);
        r += term;
    }
    return r;
}

CoeffPoly CoeffPoly::truncate_hbar(int cap) const {
    CoeffPoly r(d_);
    for (const auto& [k, c] : terms_)
        if (k.hpow <= cap) r.terms_.emplace(k, c);
    return r;
}

int CoeffPoly::x_degree() const {
    int deg = 0;
    for (const auto& [k, c] : terms_) deg = std::max(deg, ydeg(k.xexp));
    return deg;
}

int CoeffPoly::hbar_degree() const {
    int deg = 0;
    for (const auto& [k, c] : terms_) deg = std::max(deg, k.hpow);
    return deg;
}

std::string CoeffPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        Rat a = c;
        if (first) {
            if (sgn(a) < 0) { os << "-"; a = -a; }
        } else {
            os << (sgn(a) < 0 ? " - " : " + ");
            if (sgn(a) < 0) a = -a;
        }
        first = false;
        std::string mono = yindex_str(k.xexp, "x");
        if (k.hpow > 0) {
            std::string h = k.hpow == 1 ? "hbar" : ("hbar^" + std::to_string(k.hpow));
            mono = mono.empty() ? h : h + "*" + mono;
        }
        if (mono.empty()) {
            os << rat_str(a);
        } else if (a == 1) {
            os << mono;
        } else {
            os << rat_str(a) << "*" << mono;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Recursive-descent parser for the spec polynomial grammar.

namespace {

struct Parser {
    const std::string& s;
    std::size_t pos = 0;
    int d;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw ValidationError("polynomial parse error at position " + std::to_string(pos) +
                              " in '" + s + "': " + msg);
    }

    int integer() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (start == pos) fail("expected integer");
        return std::stoi(s.substr(start, pos - start));
    }

    CoeffPoly base() {
        skip_ws();
        if (eat('(')) {
            CoeffPoly e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (peek() == 'x') {
            ++pos;
            int i = integer();
            if (i < 1 || i > d) fail("variable x" + std::to_string(i) + " out of range");
            return CoeffPoly::variable(d, i);
        }
        if (std::isdigit(static_cast<unsigned char>(peek()))) {
            int num = integer();
            if (eat('/')) {
                int den = integer();
                if (den == 0) fail("division by zero");
                Rat r(num, den);
                r.canonicalize();
                return CoeffPoly(d, r);
            }
            return CoeffPoly(d, num);
        }
        fail("expected literal, variable, or '('");
    }

    CoeffPoly power() {
        CoeffPoly b = base();
        if (eat('^')) {
            int e = integer();
            CoeffPoly r(d, 1);
            for (int i = 0; i < e; ++i) r = r * b;
            return r;
        }
        return b;
    }

    CoeffPoly term() {
        skip_ws();
        bool neg = false;
        while (peek() == '-' || peek() == '+') {
            if (eat('-')) neg = !neg;
            else eat('+');
        }
        CoeffPoly r = power();
        while (eat('*')) r = r * power();
        return neg ? -r : r;
    }

    CoeffPoly expr() {
        CoeffPoly r = term();
        for (;;) {
            char c = peek();
            if (c == '+') { eat('+'); r = r + term(); }
            else if (c == '-') { eat('-'); r = r - term(); }
            else break;
        }
        return r;
    }
};

} // namespace

CoeffPoly CoeffPoly::parse(const std::string& text, int d) {
    Parser p{text, 0, d};
    CoeffPoly r = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    return r;
}

} // namespace defq
