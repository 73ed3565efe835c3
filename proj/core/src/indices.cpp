#include "defq/indices.hpp"

#include <sstream>

namespace defq {

Rat multinomial(const YIndex& beta, const std::vector<YIndex>& parts) {
    Rat r = 1;
    for (std::size_t t = 0; t < beta.size(); ++t) {
        r *= rat_factorial(beta[t]);
        for (const auto& p : parts) r /= rat_factorial(p[t]);
    }
    return r;
}

namespace {

// Compositions of a single exponent e into n ordered nonnegative parts.
void compositions(int e, int n, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (n == 1) {
        cur.push_back(e);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int a = 0; a <= e; ++a) {
        cur.push_back(a);
        compositions(e - a, n - 1, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<std::vector<YIndex>> split_multi_index(const YIndex& beta, int n) {
    const int d = static_cast<int>(beta.size());
    std::vector<std::vector<YIndex>> result;
    result.push_back(std::vector<YIndex>(static_cast<std::size_t>(n), yzero(d)));
    for (int t = 0; t < d; ++t) {
        if (beta[t] == 0) continue;
        std::vector<std::vector<int>> comps;
        std::vector<int> cur;
        compositions(beta[t], n, cur, comps);
        std::vector<std::vector<YIndex>> next;
        next.reserve(result.size() * comps.size());
        for (const auto& partial : result) {
            for (const auto& comp : comps) {
                auto item = partial;
                for (int j = 0; j < n; ++j) item[static_cast<std::size_t>(j)][t] = comp[static_cast<std::size_t>(j)];
                next.push_back(std::move(item));
            }
        }
        result = std::move(next);
    }
    return result;
}

std::string yindex_str(const YIndex& y, const std::string& var) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 0) continue;
        if (!first) os << "*";
        first = false;
        os << var << (i + 1);
        if (y[i] > 1) os << "^" << y[i];
    }
    return os.str();
}

std::string mask_str(Mask m, const std::string& sym) {
    std::ostringstream os;
    bool first = true;
    for (int i = 1; i <= 32; ++i) {
        if (!(m & mask_bit(i))) continue;
        if (!first) os << "*";
        first = false;
        os << sym << i;
    }
    return os.str();
}

} // namespace defq
