#include "defq/manifold_spec.hpp"

#include <fstream>
#include <sstream>

#include "defq/errors.hpp"

namespace defq {

FiberPolyVec ManifoldSpec::poisson_vec() const {
    FiberPolyVec a(d, kInf, Family::base);
    for (const auto& [ij, p] : poisson)
        a.add_term(yzero(d), 0, mask_bit(ij.first) | mask_bit(ij.second), p);
    return a;
}

AffineAction ManifoldSpec::group() const {
    if (!group_gens) return AffineAction::from_generators(d, {});
    return AffineAction::from_generators(d, *group_gens);
}

std::string ManifoldSpec::str() const {
    std::ostringstream os;
    os << "version " << version << "\n";
    os << "dimension " << d << "\n";
    os << "trunc_order " << trunc << "\n";
    os << "hbar_order " << hbar_order << "\n";
    os << "probe_degree " << probe_degree << "\n";
    for (const auto& [key, p] : conn.table())
        os << "christoffel " << key[0] << " " << key[1] << " " << key[2] << " = " << p.str()
           << "\n";
    for (const auto& [ij, p] : poisson)
        os << "poisson " << ij.first << " " << ij.second << " = " << p.str() << "\n";
    if (group_gens) {
        for (const auto& g : *group_gens) {
            os << "group";
            for (const auto& row : g.m)
                for (const auto& v : row) os << " " << rat_str(v);
            os << " ;";
            for (const auto& v : g.t) os << " " << rat_str(v);
            os << "\n";
        }
    }
    return os.str();
}

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ValidationError("spec line " + std::to_string(line) + ": " + msg);
}

int int_field(std::istringstream& is, int line, const char* what) {
    int v;
    if (!(is >> v)) fail(line, std::string("expected integer ") + what);
    return v;
}

std::string rest_after_eq(std::istringstream& is, int line) {
    std::string eq;
    if (!(is >> eq) || eq != "=") fail(line, "expected '='");
    std::string rest;
    std::getline(is, rest);
    if (rest.find_first_not_of(" \t") == std::string::npos) fail(line, "empty polynomial");
    return rest;
}

} // namespace

ManifoldSpec load_spec(std::istream& in) {
    ManifoldSpec spec;
    bool have_version = false, have_dim = false;
    std::string raw;
    int line = 0;
    struct PendingChristoffel {
        int k, i, j, line;
        std::string poly;
    };
    std::vector<PendingChristoffel> christoffels;
    struct PendingPoisson {
        int i, j, line;
        std::string poly;
    };
    std::vector<PendingPoisson> poissons;
    std::vector<std::pair<int, std::string>> groups;

    while (std::getline(in, raw)) {
        ++line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream is(raw);
        std::string tag;
        if (!(is >> tag)) continue;
        if (tag == "version") {
            spec.version = int_field(is, line, "version");
            if (spec.version != 1) fail(line, "unsupported spec version");
            have_version = true;
        } else if (tag == "dimension") {
            spec.d = int_field(is, line, "dimension");
            if (spec.d < 1 || spec.d > 16) fail(line, "dimension must be in 1..16");
            have_dim = true;
        } else if (tag == "trunc_order") {
            spec.trunc = int_field(is, line, "trunc_order");
            if (spec.trunc < 2) fail(line, "trunc_order must be at least 2");
        } else if (tag == "hbar_order") {
            spec.hbar_order = int_field(is, line, "hbar_order");
            if (spec.hbar_order < 0) fail(line, "hbar_order must be nonnegative");
        } else if (tag == "probe_degree") {
            spec.probe_degree = int_field(is, line, "probe_degree");
            if (spec.probe_degree < 1) fail(line, "probe_degree must be positive");
        } else if (tag == "christoffel") {
            PendingChristoffel pc;
            pc.k = int_field(is, line, "upper index");
            pc.i = int_field(is, line, "lower index");
            pc.j = int_field(is, line, "lower index");
            pc.line = line;
            pc.poly = rest_after_eq(is, line);
            christoffels.push_back(std::move(pc));
        } else if (tag == "poisson") {
            PendingPoisson pp;
            pp.i = int_field(is, line, "index");
            pp.j = int_field(is, line, "index");
            pp.line = line;
            pp.poly = rest_after_eq(is, line);
            poissons.push_back(std::move(pp));
        } else if (tag == "group") {
            std::string rest;
            std::getline(is, rest);
            groups.emplace_back(line, rest);
        } else {
            fail(line, "unknown field '" + tag + "'");
        }
    }
    if (!have_version) throw ValidationError("spec: missing 'version' field");
    if (!have_dim) throw ValidationError("spec: missing 'dimension' field");

    spec.conn = ConnectionData(spec.d);
    for (const auto& pc : christoffels) {
        CoeffPoly p = CoeffPoly::parse(pc.poly, spec.d);
        try {
            spec.conn.set(pc.k, pc.i, pc.j, p);
        } catch (const ValidationError& e) {
            fail(pc.line, e.what());
        }
    }
    for (const auto& pp : poissons) {
        if (pp.i == pp.j) fail(pp.line, "poisson entries must have distinct indices");
        if (pp.i < 1 || pp.i > spec.d || pp.j < 1 || pp.j > spec.d)
            fail(pp.line, "poisson index out of range");
        CoeffPoly p = CoeffPoly::parse(pp.poly, spec.d);
        const int a = std::min(pp.i, pp.j), b = std::max(pp.i, pp.j);
        CoeffPoly canon = (pp.i < pp.j) ? p : -p;
        auto it = spec.poisson.find({a, b});
        if (it != spec.poisson.end()) {
            if (!(it->second == canon)) fail(pp.line, "poisson table is not antisymmetric");
        } else if (!canon.zero()) {
            spec.poisson.emplace(std::make_pair(a, b), canon);
        }
    }
    if (!groups.empty()) {
        std::vector<AffineMap> gens;
        for (const auto& [gl, body] : groups) {
            auto semi = body.find(';');
            if (semi == std::string::npos) fail(gl, "group entry needs ';' before translation");
            std::istringstream ms(body.substr(0, semi)), ts(body.substr(semi + 1));
            AffineMap g = AffineMap::identity(spec.d);
            std::string tok;
            for (int r = 0; r < spec.d; ++r)
                for (int c = 0; c < spec.d; ++c) {
                    if (!(ms >> tok)) fail(gl, "group matrix needs d*d entries");
                    g.m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = rat_parse(tok);
                }
            if (ms >> tok) fail(gl, "trailing entries in group matrix");
            for (int r = 0; r < spec.d; ++r) {
                if (!(ts >> tok)) fail(gl, "group translation needs d entries");
                g.t[static_cast<std::size_t>(r)] = rat_parse(tok);
            }
            if (ts >> tok) fail(gl, "trailing entries in group translation");
            gens.push_back(std::move(g));
        }
        spec.group_gens = std::move(gens);
    }
    return spec;
}

ManifoldSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open spec file '" + path + "'");
    return load_spec(in);
}

} // namespace defq
