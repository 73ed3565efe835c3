// Acceptance suite: one criterion per block, one pass/fail line each, all
// arithmetic exact.  Usage: acceptance <path-to-cli> <specs-dir>

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "defq/errors.hpp"
#include "defq/kontsevich.hpp"
#include "defq/random_gen.hpp"
#include "defq/report.hpp"
#include "defq/star.hpp"
#include "defq/suites.hpp"
#include "support/oracles.hpp"

using namespace defq;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
std::string g_cli;
std::string g_specs;

void criterion(int number, const std::string& name, double limit_sec,
               const std::function<std::string()>& body) {
    auto t0 = Clock::now();
    std::string detail;
    try {
        detail = body();
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double sec = std::chrono::duration<double>(Clock::now() - t0).count();
    bool pass = detail.empty();
    if (pass && limit_sec > 0 && sec > limit_sec) {
        pass = false;
        detail = "runtime limit exceeded";
    }
    if (!pass) ++g_failures;
    std::printf("[%s] %2d. %-24s (%.2fs)%s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                sec, detail.empty() ? "" : " : ", detail.c_str());
    std::fflush(stdout);
}

std::string run_cli(const std::string& args, int* rc_out = nullptr) {
    std::string cmd = g_cli + " " + args + " 2>/dev/null";
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    int rc = pclose(p);
    if (rc_out) *rc_out = WEXITSTATUS(rc);
    return out;
}

ManifoldSpec flat_spec() {
    ManifoldSpec s;
    s.d = 2;
    s.trunc = 6;
    s.hbar_order = 2;
    s.probe_degree = 4;
    s.conn = ConnectionData::flat(2);
    s.poisson.emplace(std::make_pair(1, 2), CoeffPoly(2, 1));
    return s;
}

ConnectionData curved2() {
    ConnectionData c(2);
    c.set(2, 1, 1, CoeffPoly::variable(2, 2));
    return c;
}

std::vector<CoeffPoly> monomials_upto(int d, int deg) {
    std::vector<CoeffPoly> out;
    struct Rec {
        int d;
        std::vector<CoeffPoly>& out;
        void go(YIndex& idx, int pos, int left) {
            if (pos == d - 1) {
                idx[static_cast<std::size_t>(pos)] = left;
                CoeffPoly m(d);
                m.add_term(idx, 0, 1);
                out.push_back(std::move(m));
                return;
            }
            for (int v = left; v >= 0; --v) {
                idx[static_cast<std::size_t>(pos)] = v;
                go(idx, pos + 1, left - v);
            }
        }
    } rec{d, out};
    for (int total = 0; total <= deg; ++total) {
        YIndex idx = yzero(d);
        rec.go(idx, 0, total);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string c1_hodge() {
    int checked = 0;
    for (int d : {2, 3}) {
        const int N = 8; // headroom: elements have fiber degree <= 6
        RandomGen g(1000 + d, d, N);
        g.max_ydeg = 6;
        for (int rep = 0; rep < 40; ++rep) {
            FormSection a = g.rand_section(4);
            if (!(sigma(a) + delta(delta_inv(a)) + delta_inv(delta(a)) == a))
                return "sections failed";
            FiberPolyVec v = g.rand_polyvec(4);
            if (!(sigma(v) + delta(delta_inv(v)) + delta_inv(delta(v)) == v))
                return "polyvectors failed";
            FiberPolyOp p = g.rand_polyop(2, 4);
            if (!(sigma(p) + delta(delta_inv(p)) + delta_inv(delta(p)) == p))
                return "operators failed";
            checked += 3;
        }
    }
    if (checked < 200) return "fewer than 200 elements checked";
    return "";
}

std::string c2_brackets() {
    const int N = 6;
    int jac_s = 0, jac_g = 0, anti = 0;
    for (int d : {2, 3}) {
        RandomGen g(2000 + d, d, N);
        g.max_ydeg = 3;
        for (int rep = 0; rep < 90; ++rep) {
            int qa = rep % 2, ka = rep % 3 - 1, qb = (rep / 2) % 2, kb = (rep + 1) % 3 - 1;
            FiberPolyVec a = g.rand_polyvec_homog(qa, ka, 2);
            FiberPolyVec b = g.rand_polyvec_homog(qb, kb, 2);
            FiberPolyVec c = g.rand_polyvec_homog(0, (rep + 2) % 3 - 1, 2);
            if (a.zero() || b.zero() || c.zero()) continue;
            int ra = qa + ka, rb = qb + kb;
            FiberPolyVec rhs = schouten(b, a);
            if ((ra * rb) % 2 == 0) rhs = -rhs;
            if (!(schouten(a, b) == rhs)) return "schouten antisymmetry failed";
            ++anti;
            FiberPolyVec extra = schouten(b, schouten(a, c));
            if (((ra * rb) % 2 + 2) % 2 == 1) extra = -extra;
            if (!(schouten(a, schouten(b, c)) == schouten(schouten(a, b), c) + extra))
                return "schouten jacobi failed";
            ++jac_s;
        }
        for (int rep = 0; rep < 90; ++rep) {
            FiberPolyOp a = g.rand_polyop_homog(rep % 2, rep % 3 - 1, 1, 2);
            FiberPolyOp b = g.rand_polyop_homog((rep / 2) % 2, (rep + 1) % 3 - 1, 1, 2);
            FiberPolyOp c = g.rand_polyop_homog(0, (rep + 2) % 3 - 1, 1, 2);
            if (a.zero() || b.zero() || c.zero()) continue;
            int ra = rep % 2 + rep % 3 - 1, rb = (rep / 2) % 2 + (rep + 1) % 3 - 1;
            FiberPolyOp rhs = gerstenhaber(b, a);
            if ((ra * rb) % 2 == 0) rhs = -rhs;
            if (!(gerstenhaber(a, b) == rhs)) return "gerstenhaber antisymmetry failed";
            FiberPolyOp extra = gerstenhaber(b, gerstenhaber(a, c));
            if (((ra * rb) % 2 + 2) % 2 == 1) extra = -extra;
            if (!(gerstenhaber(a, gerstenhaber(b, c)) ==
                  gerstenhaber(gerstenhaber(a, b), c) + extra))
                return "gerstenhaber jacobi failed";
            ++jac_g;
        }
        FiberPolyOp m = FiberPolyOp::multiplication(d, N);
        if (!gerstenhaber(m, m).zero()) return "[m,m] != 0";
        for (int rep = 0; rep < 20; ++rep)
            if (!hochschild_d(hochschild_d(g.rand_polyop(2, 2))).zero())
                return "hochschild square nonzero";
    }
    if (jac_s < 100 || jac_g < 100 || anti < 100)
        return "insufficient probe count (" + std::to_string(jac_s) + ", " +
               std::to_string(jac_g) + ")";
    return "";
}

std::string c3_flatness() {
    const int d = 2, N = 6;
    for (bool curved : {false, true}) {
        ConnectionData conn = curved ? curved2() : ConnectionData::flat(d);
        FedosovState st = solve_connection(conn, N);
        FiberPolyVec res = delta(st.A) - st.R - nabla(st.A, st.conn) -
                           schouten(st.A, st.A).scaled(Rat(1, 2));
        for (int p = 0; p <= 5; ++p) {
            FiberPolyVec part(d, N);
            for (const auto& [k, c] : res.terms())
                if (ydeg(k.y) == p) part.add_term(k.y, k.dx, k.dy, c);
            if (!part.zero()) return "residual nonzero at degree " + std::to_string(p);
        }
        RandomGen g(curved ? 31 : 30, d, N);
        for (int rep = 0; rep < 12; ++rep) {
            FormSection a = g.rand_section(3);
            FormSection dd2 = fedosov_d(fedosov_d(a, st), st);
            if (!dd2.y_truncated(vmin(dd2.valid_to(), st.flat_valid_to)).zero())
                return "D^2 nonzero on sections";
            FiberPolyVec v = g.rand_polyvec(3);
            FiberPolyVec dv = fedosov_d(fedosov_d(v, st), st);
            if (!dv.y_truncated(vmin(dv.valid_to(), st.flat_valid_to)).zero())
                return "D^2 nonzero on polyvectors";
            FiberPolyOp p = g.rand_polyop(1, 2);
            FiberPolyOp dp = fedosov_d(fedosov_d(p, st), st);
            if (!dp.y_truncated(vmin(dp.valid_to(), st.flat_valid_to)).zero())
                return "D^2 nonzero on operators";
        }
    }
    return "";
}

std::string c4_resolution() {
    const int d = 2, N = 6;
    FedosovState flat = solve_connection(ConnectionData::flat(d), N);
    FedosovState curved = solve_connection(curved2(), N);
    for (const auto& f : monomials_upto(d, 4)) {
        for (const FedosovState* st : {&flat, &curved}) {
            FormSection t = tau_lift_fn(f, *st);
            if (!(scalar_part(sigma(t)) == f)) return "sigma tau != id";
            FormSection dt = fedosov_d(t, *st);
            if (!dt.y_truncated(vmin(dt.valid_to(), st->flat_valid_to)).zero())
                return "D tau != 0";
        }
        if (!(tau_lift_fn(f, flat) == oracles::taylor_lift(f, N)))
            return "flat tau differs from the Taylor oracle";
    }
    int solved = 0;
    RandomGen g(41, d, N);
    g.max_ydeg = 4;
    while (solved < 50) {
        FormSection c = g.rand_section(3);
        FormSection a = fedosov_d(c, curved);
        if (a.zero()) continue;
        FormSection b = solve_exact(a, curved);
        FormSection db = fedosov_d(b, curved);
        int bound = vmin(vmin(db.valid_to(), a.valid_to()), curved.flat_valid_to);
        if (!(db - a).y_truncated(bound).zero()) return "Db != a";
        if (!sigma(b).zero()) return "sigma b != 0";
        if (!delta_inv(b).zero()) return "delta_inv b != 0";
        ++solved;
    }
    return "";
}

std::string c5_morphism_property() {
    const int d = 2, N = 6;
    FedosovState st = solve_connection(curved2(), N);
    FiberPolyOp m = FiberPolyOp::multiplication(d, N);
    FiberPolyOp m0 = FiberPolyOp::multiplication(d, kInf, Family::base);
    if (!(mu_project(m, st) == m0)) return "mu(m) != m0";

    std::vector<FiberPolyOp> bases;
    YIndex e1{1, 0}, e2{0, 1};
    {
        FiberPolyOp p(d, kInf, Family::base);
        p.add_term(yzero(d), 0, {e1}, CoeffPoly(d, 1));
        bases.push_back(p);
        FiberPolyOp q(d, kInf, Family::base);
        CoeffPoly x2(d);
        x2.add_term(e2, 0, 1);
        q.add_term(yzero(d), 0, {e2}, x2);
        bases.push_back(q);
        FiberPolyOp r(d, kInf, Family::base);
        r.add_term(yzero(d), 0, {yadd(e1, e2)}, CoeffPoly(d, 1));
        bases.push_back(r);
    }
    auto fiberized = [&](const FiberPolyOp& base) {
        FiberPolyOp f(d, N);
        for (const auto& [k, c] : base.terms()) f.add_term(k.y, 0, k.slots, c);
        return tau_lift(f, st);
    };
    for (const auto& pa : bases)
        for (const auto& pb : bases) {
            FiberPolyOp fa = fiberized(pa), fb = fiberized(pb);
            FiberPolyOp lhs = mu_project(compose_ops(fa, fb), st);
            FiberPolyOp rhs = compose_ops(mu_project(fa, st), mu_project(fb, st));
            if (!(lhs == rhs)) return "mu sigma not multiplicative";
        }
    return "";
}

std::string c6_linf() {
    const int d = 2, N = 6;
    LinfMorphism F = assemble_fiber_morphism(2, d, N);
    RandomGen g(61, d, N);
    for (int rep = 0; rep < 20; ++rep) {
        FiberPolyVec v = g.rand_polyvec_homog(rep % 3, (rep % 4) - 1, 3);
        if (v.zero()) continue;
        std::vector<GradedValue> a1{GradedValue(v)};
        if (!gv_zero(linf_defect(F, 1, a1))) return "arity-1 defect nonzero";
    }
    for (int rep = 0; rep < 12; ++rep) {
        FiberPolyVec b1 = g.rand_polyvec_homog(0, 1, 2);
        FiberPolyVec b2 = g.rand_polyvec_homog(0, 1, 2);
        if (b1.zero() || b2.zero()) continue;
        std::vector<GradedValue> a2{GradedValue(b1), GradedValue(b2)};
        if (!gv_zero(linf_defect(F, 2, a2))) return "arity-2 defect nonzero";
    }
    for (int n = 2; n <= 3; ++n) {
        PolyMap rhs = [&F, n](std::span<const GradedValue> a) { return linf_rhs(F, n, a); };
        PolyMap closed = d_hom(rhs, n, 2 - n, F.source, F.target);
        int tried = 0;
        for (int rep = 0; rep < 24 && tried < 8; ++rep) {
            std::vector<GradedValue> args;
            for (int i = 0; i < n; ++i) {
                FiberPolyVec v = g.rand_polyvec_homog(rep % 2, ((rep + i) % 2 == 0) ? 1 : 0, 2);
                if (v.zero()) break;
                args.emplace_back(v);
            }
            if (static_cast<int>(args.size()) < n) continue;
            ++tried;
            if (!gv_zero(closed(args)))
                return "q-iso right side not d_hom-closed at arity " + std::to_string(n);
        }
        if (tried == 0) return "no closedness probes generated";
    }
    PolyMap v1 = [](std::span<const GradedValue> a) -> GradedValue {
        return delta_inv(hkr(gv_vec(a[0]))).scaled(Rat(5, 3));
    };
    LinfMorphism S = shift_morphism(F, 1, v1);
    for (int rep = 0; rep < 8; ++rep) {
        FiberPolyVec b1 = g.rand_polyvec_homog(0, 1, 2);
        FiberPolyVec b2 = g.rand_polyvec_homog(0, (rep % 2), 2);
        if (b1.zero() || b2.zero()) continue;
        std::vector<GradedValue> a1{GradedValue(b1)};
        if (!gv_zero(linf_defect(S, 1, a1))) return "shifted arity-1 defect nonzero";
        std::vector<GradedValue> a2{GradedValue(b1), GradedValue(b2)};
        if (!gv_zero(linf_defect(S, 2, a2))) return "shifted arity-2 defect nonzero";
    }
    return "";
}

std::string c7_twist() {
    const int d = 2, N = 6;
    LinfMorphism F = assemble_fiber_morphism(2, d, N);
    RandomGen g(71, d, N);
    MaurerCartanElement z_src{GradedValue(FiberPolyVec(d, N)), d};
    MaurerCartanElement z_tgt{GradedValue(FiberPolyOp(d, N)), d};
    LinfMorphism tw0 = twist(F, z_src, z_tgt);
    for (int rep = 0; rep < 6; ++rep) {
        FiberPolyVec b = g.rand_polyvec_homog(0, 1, 2);
        if (b.zero()) continue;
        std::vector<GradedValue> a1{GradedValue(b)};
        if (!gv_equal(eval_map(tw0, 1, a1), eval_map(F, 1, a1)))
            return "twist by zero is not the identity";
    }
    FedosovState st = solve_connection(curved2(), N);
    FiberPolyVec b = fedosov_b(st);
    FiberPolyVec w = b;
    for (int i = 0; i < d; ++i) w = w * b;
    if (!w.zero()) return "B wedge power does not vanish";
    int p3 = 0, p4 = 0;
    while (p3 < 100 || p4 < 100) {
        FiberPolyVec v1 = g.rand_polyvec_homog(0, 0, 2);
        FiberPolyVec v2 = g.rand_polyvec_homog(0, 0, 2);
        FiberPolyVec biv = g.rand_polyvec_homog(0, 1, 2);
        if (!v1.zero() && !v2.zero()) {
            if (!u2(v1, v2).zero()) return "vanishing on vector pairs failed";
            ++p3;
        }
        if (!v1.zero() && !biv.zero() && v1.max_y_degree() <= 1) {
            if (!u2(v1, biv).zero()) return "vanishing on linear fields failed";
            ++p4;
        }
        FiberPolyVec lin(d, N);
        YIndex e1{1, 0};
        lin.add_term(e1, 0, mask_bit(1 + (p4 % d)), CoeffPoly(d, 1 + p4 % 3));
        if (!biv.zero()) {
            if (!u2(lin, biv).zero()) return "vanishing on linear fields failed";
            ++p4;
        }
    }
    return "";
}

std::string c8_moyal() {
    ManifoldSpec s = flat_spec();
    StarProduct star = build_star_product(s); // associativity asserted inside
    std::vector<std::vector<Rat>> am{{Rat(0), Rat(1)}, {Rat(-1), Rat(0)}};
    if (!(star.c[1] == oracles::moyal_coefficient(am, 1))) return "C1 differs from Moyal";
    if (!(star.c[2] == oracles::moyal_coefficient(am, 2))) return "C2 differs from Moyal";
    std::vector<CoeffPoly> probes = monomials_upto(2, 4);
    FiberPolyOp comb = star.combined();
    for (const auto& f : probes)
        for (const auto& gp : probes)
            for (const auto& h : probes) {
                std::vector<CoeffPoly> fg{f, gp}, gh{gp, h};
                CoeffPoly left = apply_base_op(comb, fg, 2);
                CoeffPoly right = apply_base_op(comb, gh, 2);
                std::vector<CoeffPoly> lh{left, h}, fr{f, right};
                if (!(apply_base_op(comb, lh, 2) == apply_base_op(comb, fr, 2)))
                    return "associativity failed on a probe triple";
            }
    return "";
}

std::string c9_weights() {
    const WeightTable& wt = WeightTable::solved();
    if (wt.weights.empty()) return "no weights";
    std::string local = wt.serialize();
    if (!(WeightTable::deserialize(local).serialize() == local)) return "round trip differs";
    auto extract = [](const std::string& report) {
        auto b = report.find("weights_begin");
        auto e = report.find("weights_end");
        return (b == std::string::npos || e == std::string::npos)
                   ? std::string()
                   : report.substr(b, e - b);
    };
    int rc1 = 0, rc2 = 0;
    std::string r1 = run_cli("star --spec " + g_specs + "/flat_r2.dq", &rc1);
    std::string r2 = run_cli("star --spec " + g_specs + "/flat_r2.dq", &rc2);
    if (rc1 != 0 || rc2 != 0) return "cli run failed";
    std::string w1 = extract(r1), w2 = extract(r2);
    if (w1.empty() || w1 != w2) return "weight audit not byte-stable across runs";
    if (w1.find(local.substr(0, local.find('\n'))) == std::string::npos)
        return "cli weight table differs from the in-process table";
    return "";
}

std::string c10_equivariance() {
    for (const char* spec : {"neg_r2.dq", "rot4_r2.dq"}) {
        std::ifstream in(g_specs + "/" + std::string(spec));
        if (!in) return "missing spec file";
        ManifoldSpec s = load_spec(in);
        auto results = check_equivariance(s);
        for (const auto& r : results)
            if (!r.pass) return std::string(spec) + ": " + r.name + " failed: " + r.detail;
    }
    std::ifstream in(g_specs + "/noninv_conn.dq");
    if (!in) return "missing negative spec";
    ManifoldSpec bad = load_spec(in);
    try {
        check_equivariance(bad);
        return "non-invariant connection was accepted";
    } catch (const ValidationError& e) {
        if (std::string(e.what()).find("not invariant") == std::string::npos)
            return "unexpected error message";
    }
    return "";
}

std::string c11_determinism() {
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"check", "check --spec " + g_specs + "/flat_r2.dq --suite fedosov"},
        {"connection", "connection --spec " + g_specs + "/curved_r2.dq"},
        {"star", "star --spec " + g_specs + "/flat_r2.dq"},
        {"equivariance", "equivariance --spec " + g_specs + "/rot4_r2.dq"},
    };
    for (const auto& [name, args] : runs) {
        int rc1 = 0, rc2 = 0;
        std::string a = run_cli(args, &rc1);
        std::string b = run_cli(args, &rc2);
        if (rc1 != 0 || rc2 != 0) return name + " exited nonzero";
        if (a.empty() || a != b) return name + " reports differ between runs";
    }
    return "";
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <cli-binary> <specs-dir>\n";
        return 2;
    }
    g_cli = argv[1];
    g_specs = argv[2];

    criterion(1, "hodge_identity", 10, c1_hodge);
    criterion(2, "bracket_axioms", 30, c2_brackets);
    criterion(3, "fedosov_flatness", 60, c3_flatness);
    criterion(4, "resolution_properties", 0, c4_resolution);
    criterion(5, "morphism_property", 0, c5_morphism_property);
    criterion(6, "linf_machinery", 0, c6_linf);
    criterion(7, "twisting", 0, c7_twist);
    criterion(8, "moyal_recovery", 120, c8_moyal);
    criterion(9, "weight_derivation", 0, c9_weights);
    criterion(10, "equivariance", 60, c10_equivariance);
    criterion(11, "cli_determinism", 0, c11_determinism);

    if (g_failures == 0) {
        std::printf("acceptance: all 11 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
