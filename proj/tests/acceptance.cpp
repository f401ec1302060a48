// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "yb/bracket.hpp"
#include "yb/catalog.hpp"
#include "yb/classifier.hpp"
#include "yb/harness.hpp"
#include "yb/residuals.hpp"
#include "yb/theta.hpp"

using namespace yb;
using std::string;

namespace {

const double kPi = 3.14159265358979323846;
const cx I_{0.0, 1.0};

int failures = 0;

struct Check {
    bool ok = true;
    string note;
    void need(bool c, const string& what) {
        if (!c) {
            ok = false;
            if (note.size() < 400) note += (note.empty() ? "" : "; ") + what;
        }
    }
};

void report(const char* id, const char* title, const Check& c) {
    std::printf("[%s] %s %s%s%s\n", c.ok ? "PASS" : "FAIL", id, title, c.note.empty() ? "" : " :: ",
                c.note.c_str());
    std::fflush(stdout);
    if (!c.ok) ++failures;
}

string fmt(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
}

RunReport run(const json& cfg) { return run_suite(parse_config(cfg)); }

// every identity in the report passes; records the worst one
void need_suite(Check& c, const string& label, const json& cfg) {
    RunReport r;
    try {
        r = run(cfg);
    } catch (const std::exception& e) {
        c.need(false, label + " threw: " + e.what());
        return;
    }
    if (!r.error.empty()) c.need(false, label + ": " + r.error);
    for (const auto& x : r.results)
        c.need(x.pass, label + "/" + x.identity + " rel " + fmt(x.relative_residual) + " > " + fmt(x.tolerance));
    c.need(!r.results.empty(), label + ": no results");
}

cx rnd(std::mt19937_64& g, double lo = -1.0, double hi = 1.0, double ilo = -1.0, double ihi = 1.0) {
    std::uniform_real_distribution<double> a(lo, hi), b(ilo, ihi);
    double re = a(g);
    return {re, b(g)};
}

// six points with pairwise spacing at least `sep`
Six draw_six(std::mt19937_64& g, double im = 1.0, double sep = 0.05) {
    for (;;) {
        cx p[6];
        for (auto& z : p) z = rnd(g, -1, 1, -im, im);
        bool ok = true;
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j) ok = ok && std::abs(p[i] - p[j]) > sep;
        if (ok) return {p[0], p[1], p[2], p[3], p[4], p[5]};
    }
}

Assignment six_assignment(const Six& s) {
    return {{"u", s.u}, {"v", s.v}, {"w", s.w}, {"x", s.x}, {"y", s.y}, {"z", s.z}};
}

// ---- independent scalar references ----------------------------------------------------------

// theta with characteristic (1/2,1/2), plain symmetric partial sum
cx th(cx z, cx tau, int N = 40) {
    cx s = 0.0;
    for (int n = -N; n < N; ++n) {
        double k = n + 0.5;
        s += ((n % 2) ? -1.0 : 1.0) * std::exp(kPi * I_ * k * k * tau + 2.0 * kPi * I_ * k * z);
    }
    return s;
}
cx dth(cx z, cx tau, int N = 40) {
    cx s = 0.0;
    for (int n = -N; n < N; ++n) {
        double k = n + 0.5;
        s += ((n % 2) ? -1.0 : 1.0) * 2.0 * kPi * I_ * k * std::exp(kPi * I_ * k * k * tau + 2.0 * kPi * I_ * k * z);
    }
    return s;
}

using Scalar4 = std::function<cx(cx, cx, cx, cx)>;

Scalar4 ref_sol1() {
    return [](cx u, cx v, cx x, cx y) { return 1.0 / (u - v) - 1.0 / (x - y); };
}
Scalar4 ref_sol2() {
    return [](cx u, cx v, cx x, cx y) {
        cx a = std::exp(u - v), b = std::exp(x - y);
        return (a - b) / ((a - 1.0) * (b - 1.0));
    };
}
Scalar4 ref_sol3(cx tau) {
    return [tau](cx u, cx v, cx x, cx y) { return th(u - v + x - y, tau) / (th(u - v, tau) * th(x - y, tau)); };
}

// m = 1 four-parameter AYBE, written out by hand
SampleResidual scalar_aybe(const Scalar4& r, const Six& s) {
    cx t1 = r(s.u, s.v, s.x, s.y) * r(s.u, s.w, s.y, s.z);
    cx t2 = r(s.u, s.w, s.x, s.z) * r(s.w, s.v, s.x, s.y);
    cx t3 = r(s.v, s.w, s.y, s.z) * r(s.u, s.v, s.x, s.z);
    return {std::abs(t1 - t2 - t3), std::max({std::abs(t1), std::abs(t2), std::abs(t3)})};
}

// ---- criteria -------------------------------------------------------------------------------

void c1() {
    Check c;
    need_suite(c, "rational", {{"suite", "aybe4"}, {"solution", "rational"}, {"samples", 200}, {"seed", 42}});
    need_suite(c, "trigonometric", {{"suite", "aybe4"}, {"solution", "trigonometric"}, {"samples", 200}, {"seed", 43}});
    need_suite(c, "elliptic",
               {{"suite", "aybe4"}, {"solution", {{"family", "elliptic"}, {"tau", {0, 1}}}}, {"samples", 200}, {"seed", 44}});
    // hand-written scalar equation on the same families
    std::mt19937_64 g(101);
    const cx tau = I_;
    const std::vector<std::pair<string, Scalar4>> refs{{"sol1", ref_sol1()}, {"sol2", ref_sol2()}, {"sol3", ref_sol3(tau)}};
    const std::vector<CoefficientFunction> lib{rational_solution(), trigonometric_solution(),
                                               elliptic_solution(ThetaParams{tau})};
    for (std::size_t k = 0; k < refs.size(); ++k) {
        double worst = 0.0, agree = 0.0;
        for (int i = 0; i < 200; ++i) {
            Six s = draw_six(g, 0.25, 0.05);
            worst = std::max(worst, scalar_aybe(refs[k].second, s).rel());
            cx a = refs[k].second(s.u, s.v, s.x, s.y);
            cx b = lib[k].raw({s.u, s.v, s.x, s.y})[0];
            agree = std::max(agree, std::abs(a - b) / (1.0 + std::abs(a)));
        }
        c.need(worst <= 1e-9, refs[k].first + " scalar reference rel " + fmt(worst));
        c.need(agree <= 1e-12, refs[k].first + " value mismatch " + fmt(agree));
    }
    report("C1", "four-parameter AYBE and unitarity for sol1, sol2, sol3", c);
}

void c2() {
    Check c;
    need_suite(c, "equivalence",
               {{"suite", "equivalence"},
                {"solution", "rational"},
                {"params", {{"q", {{"kind", "affine"}, {"a", 1}, {"b", 1}, {"c", 3}}}, {"phi", "random"}, {"psi", "random"}}},
                {"identities", {"aybe4"}},
                {"samples", 200},
                {"tolerance", 1e-8}});
    // reference: gauge and reparametrise by hand
    std::mt19937_64 g(202);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        cx p[4], s[4];
        for (int i = 0; i < 4; ++i) p[i] = rnd(g), s[i] = rnd(g);
        auto phi = [=](cx z) { return (p[0] * z + p[1]) / (p[2] * z + p[3]); };
        auto psi = [=](cx z) { return (s[0] * z + s[1]) / (s[2] * z + s[3]); };
        auto q = [](cx u, cx x) { return u + x + 3.0; };
        Scalar4 r = [&](cx u, cx v, cx x, cx y) {
            return ref_sol1()(phi(u), phi(v), psi(x), psi(y)) * q(u, y) * q(v, x) / (q(u, x) * q(v, y));
        };
        for (int i = 0; i < 40; ++i) {
            Six six = draw_six(g);
            worst = std::max(worst, scalar_aybe(r, six).rel());
        }
    }
    c.need(worst <= 1e-8, "hand-built transform rel " + fmt(worst));
    report("C2", "equivalence transformations preserve the AYBE", c);
}

void c3() {
    Check c;
    const cx tau = I_, eta{0.17, 0.05};
    need_suite(c, "elliptic forms",
               {{"suite", "equivalence"},
                {"solution", {{"family", "elliptic"}, {"tau", {0, 1}}}},
                {"params", {{"eta", {0.17, 0.05}}, {"q", {{"kind", "one"}}}, {"tolerances", {{"eta-vs-gauge", 1e-12}}}}},
                {"identities", {"logderiv-vs-eta", "eta-vs-gauge"}},
                {"samples", 100},
                {"tolerance", 1e-8}});
    std::mt19937_64 g(303);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Six s = draw_six(g, 0.25, 0.1);
        cx u = s.u, v = s.v, x = s.x, y = s.y;
        auto L = [&](cx z) { return dth(z, tau) / th(z, tau); };
        cx ef = th(u - v + x - y, tau) * th(u + y + eta, tau) * th(v + x + eta, tau) /
                (th(u - v, tau) * th(x - y, tau) * th(u + x + eta, tau) * th(v + y + eta, tau));
        cx lf = (L(u - v) - L(u + x + eta) + L(x - y) + L(v + y + eta)) / dth(0.0, tau);
        cx lib = elliptic_logderiv_solution(ThetaParams{tau}, eta).raw({u, v, x, y})[0];
        worst = std::max({worst, std::abs(ef - lf) / (1.0 + std::abs(ef)), std::abs(lib - ef) / (1.0 + std::abs(ef))});
    }
    c.need(worst <= 1e-8, "reference forms rel " + fmt(worst));
    report("C3", "elliptic log-derivative, eta-shifted and gauged forms agree", c);
}

void c4() {
    Check c;
    const json tols = {{"tolerances", {{"derivative", 1e-8}}}};
    need_suite(c, "tau=i", {{"suite", "theta"}, {"tau", {0, 1}}, {"samples", 100}, {"tolerance", 1e-12}, {"params", tols}});
    need_suite(c, "tau=0.3+0.8i",
               {{"suite", "theta"}, {"tau", {0.3, 0.8}}, {"samples", 100}, {"tolerance", 1e-12}, {"params", tols}});
    std::mt19937_64 g(404);
    for (cx tau : {I_, cx{0.3, 0.8}}) {
        double worst = 0.0, dworst = 0.0;
        for (int i = 0; i < 100; ++i) {
            cx z = rnd(g, -2, 2, -0.6, 0.6);
            cx a = th(z, tau), b = theta11(z, ThetaParams{tau});
            worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
            cx da = dth(z, tau), db = theta11_prime(z, ThetaParams{tau});
            dworst = std::max(dworst, std::abs(da - db) / (1.0 + std::abs(da)));
        }
        c.need(worst <= 1e-12, "series reference mismatch " + fmt(worst));
        c.need(dworst <= 1e-12, "derivative reference mismatch " + fmt(dworst));
    }
    report("C4", "theta oddness, quasi-periodicity and derivative", c);
}

// a + b + c - c with a, b odd; the same choice the theorem1 suite makes
CoefficientFunction theorem1_beta() {
    cx ka = 1.0, kb = 0.5, kc{0.3, -0.2};
    return beta_general_m1([ka](cx u, cx v) { return ka * ((u - v) + 1.0 / (u - v)); },
                           [kb](cx x, cx y) { return kb * (x - y) * (x - y) * (x - y); },
                           [kc](cx v, cx x) { return kc * (v * x + std::exp(v - x)); }, {diff_pole("u=v", 0, 1)});
}

void c5() {
    Check c;
    need_suite(c, "theorem1", {{"suite", "theorem1"}, {"solution", "rational"}, {"samples", 100}, {"tolerance", 1e-9}});
    const CoefficientFunction r = rational_solution(), beta = theorem1_beta();
    const Generator ga{0, 2, {Tag("u"), Tag("x")}}, gb{0, 2, {Tag("v"), Tag("y")}}, gc{0, 2, {Tag("w"), Tag("z")}};
    std::mt19937_64 g(505);
    int both = 0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        cx k[4];
        for (auto& z : k) z = rnd(g);
        auto q = [k](cx u, cx v, cx x, cx y) {
            return k[0] * u * v * x + k[1] * y * y + k[2] * std::exp(0.5 * u - 0.3 * y) + k[3] * v * x * y;
        };
        // skew part only, so the perturbed beta stays antisymmetric
        auto dq = scalar4("dq", [q](cx u, cx v, cx x, cx y) { return q(u, v, x, y) - q(v, u, y, x); });
        CoefficientFunction bp = sum(beta, scale(dq, 1e-2));
        BracketRule comm = commutative_rule("perturbed", bp, r);
        Six s = draw_six(g, 1.0, 0.1);
        Theorem1Sample ts = theorem1_residuals(r, bp, s, 0.05);
        double cond = std::max({ts.cross.rel(), ts.beta_six.rel(), ts.skew_beta.rel()});
        double jac = commutative_jacobi_oracle(comm, ga, gb, gc, six_assignment(s), 0.05).rel();
        if (cond > 1e-4 && jac > 1e-4) ++both;
    }
    c.need(both >= 48, "perturbation detected by both in " + std::to_string(both) + "/50");
    report("C5", "commutative bracket conditions match the Jacobi oracle", c);
}

Arr tensor_pick(int k, int m) {
    if (k == 0) return identity_tensor(m);
    if (k == 1) return exchange_tensor(m);
    Arr t(m, 4);
    t(k - 2, k - 2, k - 2, k - 2) = 1.0;
    return t;
}
CoefficientFunction scalar_pick(int s) {
    switch (s) {
        case 0: return rational_solution();
        case 1: return trigonometric_solution();
        case 2: return degenerate_uv();
        default: return degenerate_xy();
    }
}

struct ChainJacobi {
    double chain = 0.0, jacobi = 0.0;
};

ChainJacobi chain_vs_jacobi(const BracketRule& rule, std::mt19937_64& g, int points) {
    Algebra A(rule.m, 2);
    std::vector<JacobiTerms> jac;
    for (int i = 0; i < rule.m; ++i)
        for (int j = 0; j < rule.m; ++j)
            for (int k = 0; k < rule.m; ++k)
                jac.push_back(double_jacobi(rule, A.letter(i, "u", "x"), A.letter(j, "v", "y"), A.letter(k, "w", "z")));
    ChainJacobi out;
    for (int p = 0; p < points; ++p) {
        Six s = draw_six(g, 1.0, 0.1);
        for (const auto& n : theorem2_relation_residuals(rule, s, 0.05)) out.chain = std::max(out.chain, n.value.rel());
        Assignment a = six_assignment(s);
        for (const auto& J : jac) out.jacobi = std::max(out.jacobi, double_jacobi_residual(rule, J, a, 0.05).rel());
    }
    return out;
}

void c6() {
    Check c;
    const int m = 2;
    std::mt19937_64 g(606);
    int agree = 0, valid = 0, detected = 0, perturbed = 0;
    for (int t = 0; t < 50; ++t) {
        std::vector<CoefficientFunction> co(4);
        if (t % 2 == 0) {
            // diagonal blocks: each block is a scalar solution, so the rule is valid
            co[0] = scale(times(scalar_pick(g() % 2), tensor_pick(2, m)), rnd(g));
            co[1] = scale(times(scalar_pick(g() % 2), tensor_pick(3, m)), rnd(g));
            co[2] = co[3] = zero_coefficient(m, 4);
        } else {
            for (int k = 0; k < 4; ++k) {
                int tk = static_cast<int>(g() % 5);
                co[k] = (tk == 4 || (k >= 2 && g() % 2)) ? zero_coefficient(m, 4)
                                                         : times(scalar_pick(static_cast<int>(g() % 4)), tensor_pick(tk, m));
            }
        }
        BracketRule rule = four_param_rule("trial", co[0], co[1], co[2], co[3]);
        ChainJacobi cj = chain_vs_jacobi(rule, g, 3);
        bool a = cj.chain <= 1e-9, b = cj.jacobi <= 1e-9;
        if (a == b) ++agree;
        else c.need(false, "trial " + std::to_string(t) + " chain " + fmt(cj.chain) + " jacobi " + fmt(cj.jacobi));
        if (!a || t % 2) continue;
        ++valid;
        Arr noise(m, 4);
        for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = rnd(g);
        co[0] = sum(co[0], scale(times(rational_solution(), noise), 1e-2));
        ChainJacobi pj = chain_vs_jacobi(four_param_rule("perturbed", co[0], co[1], co[2], co[3]), g, 3);
        ++perturbed;
        if (pj.chain > 1e-3 && pj.jacobi > 1e-3) ++detected;
        else c.need(false, "perturbed trial " + std::to_string(t) + " chain " + fmt(pj.chain) + " jacobi " + fmt(pj.jacobi));
    }
    c.need(agree == 50, "agreement " + std::to_string(agree) + "/50");
    c.need(valid >= 20, "only " + std::to_string(valid) + " valid trials");
    c.need(detected == perturbed, "perturbation detected " + std::to_string(detected) + "/" + std::to_string(perturbed));
    report("C6", "relation chain agrees with the generator-level double Jacobi", c);
}

// constant AYBE on V^(x)3 as explicit matrices: r12 r23 - r13 r12 - r23 r13
double matrix_aybe(const Arr& r) {
    const int m = r.m(), n = m * m * m;
    using M = Eigen::MatrixXcd;
    M r12 = M::Zero(n, n), r23 = M::Zero(n, n), r13 = M::Zero(n, n);
    auto id = [m](int a, int b, int c) { return (a * m + b) * m + c; };
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int cc = 0; cc < m; ++cc)
                for (int d = 0; d < m; ++d)
                    for (int e = 0; e < m; ++e) {
                        cx v = r(a, b, cc, d);
                        r12(id(a, b, e), id(cc, d, e)) += v;
                        r23(id(e, a, b), id(e, cc, d)) += v;
                        r13(id(a, e, b), id(cc, e, d)) += v;
                    }
    M res = r12 * r23 - r13 * r12 - r23 * r13;
    return res.cwiseAbs().maxCoeff();
}

double skew(const Arr& r) {
    const int m = r.m();
    double s = 0.0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int cc = 0; cc < m; ++cc)
                for (int d = 0; d < m; ++d) s = std::max(s, std::abs(r(a, b, cc, d) + r(b, a, d, cc)));
    return s;
}

void c7() {
    Check c;
    auto oneparam = [&](const string& label, const json& rule, double tol) {
        need_suite(c, label, {{"suite", "oneparam"}, {"rule", rule}, {"samples", 30}, {"tolerance", tol}});
    };
    oneparam("gh eps 0", {{"family", "gh"}, {"g", {0, 1}}, {"h", {1, 0, 1}}, {"eps", 0}}, 1e-9);
    oneparam("gh eps 1", {{"family", "gh"}, {"g", {0, 1}}, {"h", {1, 0, 1}}, {"eps", 1}}, 1e-9);
    for (int route : {11, 21}) {
        RunReport r = run({{"suite", "oneparam"},
                           {"rule", {{"family", "yang"}, {"route", route}, {"m", 2}}},
                           {"samples", 30}});
        for (const auto& x : r.results)
            c.need(x.max_abs_residual <= 1e-13, "yang " + std::to_string(route) + "/" + x.identity + " abs " + fmt(x.max_abs_residual));
        oneparam("shifted yang " + std::to_string(route),
                 {{"family", "shifted_yang"}, {"route", route}, {"m", 2}, {"newton_seed", 7}}, 1e-9);
    }
    NewtonResult nr = newton_constant_solution(2, 7);
    double res = std::max(matrix_aybe(nr.r), skew(nr.r));
    c.need(res <= 1e-12, "constant solution residual " + fmt(res));
    c.need(nr.r.max_abs() > 1e-3, "constant solution is trivial");
    report("C7", "one-parameter families: gh, Yang and shifted Yang", c);
}

void c8() {
    Check c;
    need_suite(c, "yang", {{"suite", "trace"}, {"rule", {{"family", "yang"}, {"route", 11}, {"m", 2}}}, {"samples", 200}, {"tolerance", 1e-12}});
    need_suite(c, "yang 21", {{"suite", "trace"}, {"rule", {{"family", "yang"}, {"route", 21}, {"m", 2}}}, {"samples", 200}, {"tolerance", 1e-12}});
    need_suite(c, "gh", {{"suite", "trace"}, {"rule", {{"family", "gh"}, {"eps", 1}}}, {"samples", 200}, {"tolerance", 1e-12}});
    report("C8", "trace bracket vanishes on commutators", c);
}

void c9() {
    Check c;
    need_suite(c, "expand", {{"suite", "expand"},
                             {"rule", {{"family", "yang"}, {"route", 11}, {"m", 1}}},
                             {"params", {{"n", 2}, {"tolerances", {{"remainder", 1e-14}}}}},
                             {"tolerance", 1e-12}});
    const int n = 2;
    Expansion ex = expand_polynomial_generators(yang_rule(11, 1), n);
    c.need(ex.remainder <= 1e-14, "remainder " + fmt(ex.remainder));
    // (u^c v^d - u^d v^c)/(u - v) = sum_k u^(d+k) v^(c-1-k), c > d
    std::map<std::pair<int, int>, std::map<std::pair<int, int>, double>> table;
    for (int cc = 0; cc <= n; ++cc)
        for (int d = 0; d < cc; ++d)
            for (int k = 0; k < cc - d; ++k) {
                table[{d + k, cc - 1 - k}][{cc, d}] += 1.0;
                table[{d + k, cc - 1 - k}][{d, cc}] -= 1.0;
            }
    Algebra A(n + 1, 0);
    double worst = 0.0;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b) {
            Tensor2<cx> got = evaluate(bracket_generators(ex.rule, A.gen(a), A.gen(b)), [](const Atom&) { return cx{}; });
            Tensor2<cx> want;
            for (auto [key, v] : table[{a, b}]) want.add({Word{A.gen(key.first)}, Word{A.gen(key.second)}}, v);
            worst = std::max(worst, max_abs(got - want));
        }
    c.need(worst <= 1e-14, "table mismatch " + fmt(worst));
    report("C9", "Yang rule expands to a constant double bracket", c);
}

CoefficientFunction constant3(const Arr& t) {
    CoefficientFunction f;
    f.name = "noise";
    f.arity = 2;
    f.m = t.m();
    f.rank = 3;
    f.fn = [t](const cx*) { return t; };
    return f;
}

void c10() {
    Check c;
    const std::vector<std::pair<string, json>> rules{
        {"general", {{"family", "linear_general"}, {"a1", {1}}, {"b1", {0, 1}}}},
        {"diagonal C4", {{"family", "linear_structure"}, {"algebra", "diagonal"}, {"n", 4}}},
        {"Mat2", {{"family", "linear_structure"}, {"algebra", "matrix"}, {"n", 2}}},
        {"Rota-Baxter", {{"family", "linear_rota_baxter"}, {"algebra", "matrix"}, {"n", 2}, {"newton_seed", 7}}},
    };
    for (const auto& [label, rule] : rules)
        need_suite(c, label, {{"suite", "linear"}, {"rule", rule}, {"samples", 100}, {"tolerance", 1e-10}});

    std::vector<BracketRule> br{
        linear_general_m1({"1", [](cx) { return cx{1.0}; }}, {"t", [](cx t) { return t; }}),
        linear_structure_rule(diagonal_structure_constants(4)),
        linear_structure_rule(matrix_structure_constants(2)),
        linear_rota_baxter_rule(matrix_structure_constants(2), operator_matrix(newton_constant_solution(2, 7).r)),
    };
    std::mt19937_64 g(1010);
    int disagree = 0, flagged = 0, total = 0, bad = 0;
    for (const auto& rule : br) {
        Arr noise(rule.m, 3);
        for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = rnd(g);
        BracketRule pert = linear_rule("perturbed", sum(rule.coef[0], scale(constant3(noise), 1e-2)), rule.coef[1]);
        for (const BracketRule* r : std::vector<const BracketRule*>{&rule, &pert}) {
            for (int i = 0; i < 100; ++i) {
                cx u = rnd(g), v = rnd(g), w = rnd(g);
                if (std::min({std::abs(u - v), std::abs(v - w), std::abs(u - w)}) < 0.05) {
                    --i;
                    continue;
                }
                EquivalencePair e = associativity_equivalence_check(*r, u, v, w, 0.05);
                bool a = e.relations.rel() <= 1e-10, b = e.associativity.rel() <= 1e-10;
                ++total;
                if (a != b) ++disagree;
                if (r == &pert) {
                    ++bad;
                    if (!a && !b) ++flagged;
                }
            }
        }
    }
    c.need(disagree == 0, std::to_string(disagree) + "/" + std::to_string(total) + " samples disagree");
    c.need(flagged == bad, "perturbed rules flagged on " + std::to_string(flagged) + "/" + std::to_string(bad));
    report("C10", "linear brackets and the associativity equivalence", c);
}

// 2x2 Laurent matrices as degree -> matrix
using Lm = std::map<int, Eigen::Matrix2cd>;
Lm lmul(const Lm& a, const Lm& b) {
    Lm r;
    for (const auto& [da, ma] : a)
        for (const auto& [db, mb] : b) {
            auto it = r.try_emplace(da + db, Eigen::Matrix2cd::Zero()).first;
            it->second += ma * mb;
        }
    return r;
}
Lm lsts(const Lm& a) {
    Lm r;
    for (const auto& [d, m] : a) r[d] = d >= 0 ? m : Eigen::Matrix2cd(-m);
    return r;
}
Lm ladd(Lm a, const Lm& b, cx s = 1.0) {
    for (const auto& [d, m] : b) {
        auto it = a.try_emplace(d, Eigen::Matrix2cd::Zero()).first;
        it->second += s * m;
    }
    return a;
}

void c11() {
    Check c;
    need_suite(c, "rota_baxter", {{"suite", "rota_baxter"},
                                  {"params", {{"window", {{"n", 2}, {"lo", -3}, {"hi", 3}}}, {"m", 2}, {"newton_seed", 7},
                                              {"tolerances", {{"sts-weight-minus-one", 1e-12}}}}},
                                  {"identities", {"sts-weight-minus-one", "constant-circ-associativity"}},
                                  {"samples", 100},
                                  {"tolerance", 1e-10}});
    std::mt19937_64 g(1111);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Lm x, y;
        for (int d = -1; d <= 1; ++d) {
            Eigen::Matrix2cd a, b;
            for (int k = 0; k < 4; ++k) a(k / 2, k % 2) = rnd(g), b(k / 2, k % 2) = rnd(g);
            x[d] = a;
            y[d] = b;
        }
        Lm lhs = lmul(lsts(x), lsts(y));
        Lm rhs = ladd(ladd(lsts(lmul(lsts(x), y)), lsts(lmul(x, lsts(y)))), lmul(x, y), -1.0);
        Lm diff = ladd(lhs, rhs, -1.0);
        double d = 0.0, s = 0.0;
        for (const auto& [k, m] : diff) d = std::max(d, m.cwiseAbs().maxCoeff());
        for (const auto& [k, m] : lhs) s = std::max(s, m.cwiseAbs().maxCoeff());
        worst = std::max(worst, d / (1.0 + s));
    }
    c.need(worst <= 1e-12, "reference split relation " + fmt(worst));
    report("C11", "Rota-Baxter relations on truncated Laurent and matrix algebras", c);
}

Quartic quartic(std::initializer_list<cx> k) {
    Quartic q;
    int i = 0;
    for (cx z : k) q.k[i++] = z;
    return q;
}

void c12() {
    Check c;
    auto close = [](cx a, cx b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)); };
    Invariants one = invariants(quartic({1}));
    c.need(close(one.I1, 0.0) && close(one.I2, 0.0), "P=1 invariants");
    Invariants sq = invariants(quartic({0, 0, 1}));
    c.need(close(sq.I1, 1.0) && close(sq.I2, 2.0), "P=x^2 invariants");
    auto [l1, l2] = lambdas(sq.I1, sq.I2);
    c.need(close(l1, -1.0 / 6.0) && close(l2, 1.0 / 54.0), "P=x^2 lambdas");
    const cx sig{0.4, 0.7};
    Invariants cu = invariants(quartic({0, sig, -(1.0 + sig), 1.0}));
    c.need(close(cu.I1, sig * sig - sig + 1.0), "cubic I1");
    c.need(close(cu.I2, -(1.0 + sig) * (2.0 * sig - 1.0) * (sig - 2.0)), "cubic I2");

    // exponents: fit on a few maps, round, then assert
    std::mt19937_64 g(1212);
    auto rq = [&] {
        Quartic q;
        for (auto& z : q.k) z = rnd(g);
        return q;
    };
    auto rm = [&] { return Mobius{rnd(g), rnd(g), rnd(g), rnd(g)}; };
    double e1 = 0.0, e2 = 0.0;
    const int fits = 8;
    for (int i = 0; i < fits; ++i) {
        Quartic p = rq();
        Mobius m = rm();
        while (std::abs(std::log(std::abs(m.det()))) < 0.3) m = rm();
        Invariants a = invariants(p), b = invariants(mobius_transform_quartic(p, m));
        double ld = std::log(std::abs(m.det()));
        e1 += std::log(std::abs(b.I1 / a.I1)) / ld / fits;
        e2 += std::log(std::abs(b.I2 / a.I2)) / ld / fits;
    }
    const int k1 = static_cast<int>(std::lround(e1)), k2 = static_cast<int>(std::lround(e2));
    c.need(k1 == 4 && k2 == 6, "fitted exponents " + fmt(e1) + ", " + fmt(e2));
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Quartic p = rq();
        Mobius m = rm();
        Invariants a = invariants(p), b = invariants(mobius_transform_quartic(p, m));
        cx d = m.det();
        cx w1 = a.I1 * std::pow(d, k1), w2 = a.I2 * std::pow(d, k2);
        worst = std::max({worst, std::abs(b.I1 - w1) / std::abs(w1), std::abs(b.I2 - w2) / std::abs(w2)});
    }
    c.need(worst <= 1e-9, "semi-invariance rel " + fmt(worst));

    struct Pair {
        Quartic p;
        CanonicalType t;
        const char* verdict;
    };
    const Quartic ell = quartic({0, sig, -(1.0 + sig), 1.0});
    for (const auto& pr : {Pair{quartic({1}), CanonicalType::Rational, "sol1"},
                           Pair{quartic({0, 0, 1}), CanonicalType::Trigonometric, "sol2"},
                           Pair{ell, CanonicalType::Elliptic, "sol3"}}) {
        try {
            ClassificationRecord rec = classify({pr.p, pr.p});
            c.need(rec.type == pr.t && rec.verdict == pr.verdict, "pairing " + pr.p.to_string() + " gave " + rec.verdict);
        } catch (const ClassifierError& e) {
            c.need(false, string("pairing threw ") + e.what());
        }
    }
    // simultaneous change of both variables keeps the type and the class of sigma
    try {
        Mobius m{1.0, 2.0, 0.5, 3.0};
        const Quartic moved = mobius_transform_quartic(ell, m);
        ClassificationRecord a = classify({ell, ell}), b = classify({moved, moved});
        c.need(b.type == CanonicalType::Elliptic, "moved elliptic pair");
        c.need(a.p_form.sigma_class && b.p_form.sigma_class &&
                   std::abs(*a.p_form.sigma_class - *b.p_form.sigma_class) < 1e-6,
               "sigma class differs under a Moebius change");
    } catch (const ClassifierError& e) {
        c.need(false, string("moved pair threw ") + e.what());
    }
    bool rejected = false;
    try {
        classify({quartic({0, 0, 1}), quartic({1})});
    } catch (const ClassifierError&) {
        rejected = true;
    }
    c.need(rejected, "mixed pair accepted");
    report("C12", "quartic invariants, semi-invariance and classification", c);
}

void c13() {
    Check c;
    std::vector<std::pair<string, BracketRule>> rules{
        {"gh0", gh_rule({"t", [](cx t) { return t; }}, {"t^2+1", [](cx t) { return t * t + 1.0; }}, 0)},
        {"gh1", gh_rule({"t", [](cx t) { return t; }}, {"t^2+1", [](cx t) { return t * t + 1.0; }}, 1)},
        {"yang11", yang_rule(11, 2)},
        {"yang21", yang_rule(21, 2)},
    };
    const Arr r0 = newton_constant_solution(2, 7).r;
    rules.push_back({"shifted11", shifted_yang_rule(11, r0)});
    rules.push_back({"shifted21", shifted_yang_rule(21, r0)});
    std::mt19937_64 g(1313);
    for (const auto& [label, rule] : rules) {
        const CoefficientFunction alpha = alpha_of(rule);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            cx u = rnd(g), v = rnd(g), w = rnd(g);
            try {
                worst = std::max(worst, sixterm_residual(alpha, u, v, w, 0.05).rel());
            } catch (const PoleMarginError&) {
                --i;
            }
        }
        c.need(worst <= 1e-10, label + " rel " + fmt(worst));
    }
    report("C13", "six-term relation for one-parameter alphas", c);
}

void c14() {
    Check c;
    const std::vector<json> cfgs{
        {{"suite", "aybe4"}, {"solution", "rational"}, {"samples", 64}},
        {{"suite", "aybe4"}, {"solution", {{"family", "elliptic"}, {"tau", {0, 1}}}}, {"samples", 40}},
        {{"suite", "unitarity"}, {"solution", "trigonometric"}, {"samples", 64}},
        {{"suite", "equivalence"}, {"solution", "rational"}, {"params", {{"phi", "random"}, {"psi", "random"}}}, {"samples", 64}},
        {{"suite", "theorem1"}, {"solution", "rational"}, {"samples", 32}},
        {{"suite", "theorem2"}, {"rule", {{"family", "four_param"}, {"m", 2}, {"alpha", {{"tensor", "P1"}}}, {"beta", {{"tensor", "P2"}, {"scalar", "sol2"}}}}}, {"samples", 16}},
        {{"suite", "oneparam"}, {"rule", {{"family", "gh"}, {"eps", 1}}}, {"samples", 16}},
        {{"suite", "linear"}, {"rule", {{"family", "linear_structure"}, {"n", 2}}}, {"samples", 32}},
        {{"suite", "rota_baxter"}, {"samples", 32}},
        {{"suite", "trace"}, {"rule", {{"family", "yang"}, {"m", 2}}}, {"samples", 32}},
        {{"suite", "expand"}, {"rule", {{"family", "yang"}}}, {"params", {{"n", 2}}}},
        {{"suite", "classify"}, {"P", {0, 0, 1, 0, 0}}, {"Q", {0, 0, 1, 0, 0}}},
        {{"suite", "theta"}, {"tau", {0.3, 0.8}}, {"samples", 64}},
    };
    for (const auto& base : cfgs) {
        string out[2];
        int k = 0;
        for (int workers : {1, 8}) {
            json cfg = base;
            cfg["workers"] = workers;
            json rep = to_json(run(cfg));
            rep.erase("wall_time_s");
            out[k++] = rep.dump();
        }
        c.need(out[0] == out[1], base["suite"].get<string>() + " differs between 1 and 8 workers");
    }
    report("C14", "reports are identical for 1 and 8 workers", c);
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void()>>> all{
        {"C1", c1}, {"C2", c2},   {"C3", c3},   {"C4", c4},   {"C5", c5},   {"C6", c6},   {"C7", c7},
        {"C8", c8}, {"C9", c9}, {"C10", c10}, {"C11", c11}, {"C12", c12}, {"C13", c13}, {"C14", c14},
    };
    for (const auto& [id, f] : all) {
        try {
            f();
        } catch (const std::exception& e) {
            Check c;
            c.need(false, string("uncaught: ") + e.what());
            report(id, "", c);
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, all.size());
    return failures == 0 ? 0 : 1;
}
