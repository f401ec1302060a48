#include "yb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>

#include "yb/bracket.hpp"
#include "yb/catalog.hpp"
#include "yb/classifier.hpp"
#include "yb/residuals.hpp"
#include "yb/theta.hpp"

namespace yb {

// ---- literals -------------------------------------------------------------------------

json complex_json(cx z) { return json::array({z.real(), z.imag()}); }

cx complex_from_json(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError(path, "invalid complex literal (expected a number or [re, im])");
}

namespace {

const std::set<std::string> kSuites{"aybe4",  "unitarity", "theorem1", "theorem2", "oneparam", "linear",
                                    "rota_baxter", "trace", "expand", "classify", "theta", "equivalence"};

const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(path.empty() ? key : path + "." + key, "missing required field");
    return j.at(key);
}

std::string sub(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

cx get_cx(const json& j, const std::string& key, const std::string& path, cx def) {
    if (!j.is_object() || !j.contains(key)) return def;
    return complex_from_json(j.at(key), sub(path, key));
}

int get_int(const json& j, const std::string& key, const std::string& path, int def) {
    if (!j.is_object() || !j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(sub(path, key), "expected an integer");
    return v.get<int>();
}

double get_real(const json& j, const std::string& key, const std::string& path, double def) {
    if (!j.is_object() || !j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(sub(path, key), "expected a number");
    return v.get<double>();
}

std::string get_str(const json& j, const std::string& key, const std::string& path, const std::string& def) {
    if (!j.is_object() || !j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(sub(path, key), "expected a string");
    return v.get<std::string>();
}

std::vector<cx> cx_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of complex literals");
    std::vector<cx> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(complex_from_json(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

// five coefficients k0..k4, either five literals or ten reals (re, im pairs)
Quartic quartic_from_json(const json& j, const std::string& path) {
    Quartic q;
    if (j.is_array() && j.size() == 10 && std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_number(); })) {
        for (int i = 0; i < 5; ++i) q.k[i] = {j[2 * i].get<double>(), j[2 * i + 1].get<double>()};
        return q;
    }
    auto v = cx_list(j, path);
    if (v.size() != 5) throw ConfigError(path, "a quartic needs five coefficients k0..k4");
    for (int i = 0; i < 5; ++i) q.k[i] = v[i];
    return q;
}

json quartic_json(const Quartic& q) {
    json a = json::array();
    for (auto c : q.k) a.push_back(complex_json(c));
    return a;
}

Univariate poly_from_json(const json& j, const std::string& path) {
    auto c = cx_list(j, path);
    if (c.empty()) throw ConfigError(path, "empty polynomial");
    std::string name = "poly[";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) name += ",";
        name += std::to_string(c[i].real());
        if (c[i].imag() != 0.0) name += (c[i].imag() < 0 ? "" : "+") + std::to_string(c[i].imag()) + "i";
    }
    name += "]";
    return {name, [c](cx t) {
                cx r{};
                for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * t + *it;
                return r;
            }};
}

ThetaParams theta_from(const json& j, const std::string& path) {
    ThetaParams p;
    p.tau = complex_from_json(require(j, "tau", path), sub(path, "tau"));
    if (p.tau.imag() <= 0) throw ConfigError(sub(path, "tau"), "Im(tau) must be positive");
    return p;
}

// ---- solution and rule descriptors -------------------------------------------------------

json normalize_descriptor(const json& j) {
    if (j.is_string()) return json{{"family", j.get<std::string>()}};
    return j;
}

std::function<cx(cx, cx)> separable_h(const json& d, const std::string& path, const Quartic& P, const Quartic& Q) {
    std::string kind = get_str(d, "kind", path, "zero");
    if (kind == "zero") return [](cx, cx) { return cx{}; };
    if (kind == "rational") {
        cx c = get_cx(d, "c", path, cx{0.5, 0.5});
        return [c](cx u, cx x) { return -2.0 / (u - x - c); };
    }
    if (kind == "numeric") {
        SeparableH h;
        h.P = P;
        h.Q = Q;
        h.u0 = get_cx(d, "u0", path, h.u0);
        h.x0 = get_cx(d, "x0", path, h.x0);
        h.w0 = get_cx(d, "w0", path, h.w0);
        h.sign = get_int(d, "sign", path, 1);
        h.nodes = get_int(d, "nodes", path, h.nodes);
        h.steps = get_int(d, "steps", path, h.steps);
        return h;
    }
    throw ConfigError(sub(path, "kind"), "unknown h kind '" + kind + "'");
}

CoefficientFunction make_solution(const json& in, const std::string& path) {
    const json d = normalize_descriptor(in);
    if (!d.is_object()) throw ConfigError(path, "expected a solution descriptor");
    const std::string fam = get_str(d, "family", path, "");
    if (fam.empty()) throw ConfigError(sub(path, "family"), "missing required field");
    if (fam == "rational") return rational_solution();
    if (fam == "trigonometric") return trigonometric_solution();
    if (fam == "elliptic") return elliptic_solution(theta_from(d, path));
    if (fam == "elliptic_eta") return elliptic_eta_solution(theta_from(d, path), complex_from_json(require(d, "eta", path), sub(path, "eta")));
    if (fam == "elliptic_logderiv")
        return elliptic_logderiv_solution(theta_from(d, path), complex_from_json(require(d, "eta", path), sub(path, "eta")));
    if (fam == "uniform") {
        auto p = cx_list(require(d, "p", path), sub(path, "p"));
        if (p.size() != 3) throw ConfigError(sub(path, "p"), "expected [p1, p2, p3]");
        return uniform_solution(p[0], p[1], p[2]);
    }
    if (fam == "degenerate_uv") return degenerate_uv();
    if (fam == "degenerate_xy") return degenerate_xy();
    if (fam == "separable") {
        Quartic P = quartic_from_json(require(d, "P", path), sub(path, "P"));
        Quartic Q = quartic_from_json(require(d, "Q", path), sub(path, "Q"));
        json h = d.contains("h") ? d.at("h") : json::object();
        return separable_solution(P, Q, separable_h(h, sub(path, "h"), P, Q));
    }
    throw ConfigError(sub(path, "family"), "unknown solution family '" + fam + "'");
}

bool is_elliptic(const json& in) {
    const json d = normalize_descriptor(in);
    return d.is_object() && d.contains("family") && d["family"].is_string() &&
           d["family"].get<std::string>().rfind("elliptic", 0) == 0;
}

Arr named_tensor(const std::string& name, int m, const std::string& path) {
    if (name == "I") return identity_tensor(m);
    if (name == "X") return exchange_tensor(m);
    if (name == "P1" || name == "P2") {
        int k = name == "P1" ? 0 : 1;
        if (k >= m) throw ConfigError(path, name + " needs m >= 2");
        Arr t(m, 4);
        t(k, k, k, k) = 1.0;
        return t;
    }
    throw ConfigError(path, "unknown tensor '" + name + "' (I, X, P1, P2)");
}

CoefficientFunction four_param_coef(const json& d, int m, const std::string& path) {
    if (d.is_null()) return zero_coefficient(m, 4);
    if (d.is_string() && d.get<std::string>() == "zero") return zero_coefficient(m, 4);
    const std::string tname = get_str(d, "tensor", path, "I");
    if (tname == "zero") return zero_coefficient(m, 4);
    const Arr t = named_tensor(tname, m, sub(path, "tensor"));
    const std::string s = get_str(d, "scalar", path, "sol1");
    CoefficientFunction f;
    if (s == "sol1") f = rational_solution();
    else if (s == "sol2") f = trigonometric_solution();
    else if (s == "pole_uv") f = degenerate_uv();
    else if (s == "pole_xy") f = degenerate_xy();
    else throw ConfigError(sub(path, "scalar"), "unknown scalar '" + s + "'");
    cx k = get_cx(d, "scale", path, 1.0);
    auto out = times(f, t);
    return k == cx{1.0} ? out : scale(out, k);
}

BracketRule make_rule(const json& in, const std::string& path, std::uint64_t seed) {
    const json d = normalize_descriptor(in);
    if (!d.is_object()) throw ConfigError(path, "expected a rule descriptor");
    const std::string fam = get_str(d, "family", path, "");
    if (fam.empty()) throw ConfigError(sub(path, "family"), "missing required field");
    if (fam == "four_param") {
        int m = get_int(d, "m", path, 2);
        if (m < 1) throw ConfigError(sub(path, "m"), "m must be >= 1");
        auto c = [&](const char* k) { return four_param_coef(d.contains(k) ? d.at(k) : json(), m, sub(path, k)); };
        return four_param_rule("four_param", c("alpha"), c("beta"), c("gamma"), c("delta"));
    }
    if (fam == "gh") {
        Univariate g = poly_from_json(d.contains("g") ? d.at("g") : json::array({0, 1}), sub(path, "g"));
        Univariate h = poly_from_json(d.contains("h") ? d.at("h") : json::array({1, 0, 1}), sub(path, "h"));
        int eps = get_int(d, "eps", path, 0);
        if (eps != 0 && eps != 1) throw ConfigError(sub(path, "eps"), "eps must be 0 or 1");
        return gh_rule(g, h, eps);
    }
    if (fam == "yang" || fam == "shifted_yang") {
        int route = get_int(d, "route", path, 11);
        if (route != 11 && route != 21) throw ConfigError(sub(path, "route"), "route must be 11 or 21");
        int m = get_int(d, "m", path, fam == "yang" ? 1 : 2);
        if (m < 1) throw ConfigError(sub(path, "m"), "m must be >= 1");
        if (fam == "yang") return yang_rule(route, m);
        auto ns = static_cast<std::uint64_t>(get_int(d, "newton_seed", path, static_cast<int>(seed % 1000000)));
        return shifted_yang_rule(route, newton_constant_solution(m, ns).r);
    }
    if (fam == "linear_general") {
        Univariate a1 = poly_from_json(d.contains("a1") ? d.at("a1") : json::array({1}), sub(path, "a1"));
        Univariate b1 = poly_from_json(d.contains("b1") ? d.at("b1") : json::array({0, 1}), sub(path, "b1"));
        return linear_general_m1(a1, b1);
    }
    if (fam == "linear_structure" || fam == "linear_rota_baxter") {
        std::string alg = get_str(d, "algebra", path, "matrix");
        int n = get_int(d, "n", path, 2);
        if (n < 1) throw ConfigError(sub(path, "n"), "n must be >= 1");
        Arr c;
        if (alg == "matrix") c = matrix_structure_constants(n);
        else if (alg == "diagonal") c = diagonal_structure_constants(n);
        else throw ConfigError(sub(path, "algebra"), "unknown algebra '" + alg + "' (matrix, diagonal)");
        if (fam == "linear_structure") return linear_structure_rule(c);
        if (alg != "matrix") throw ConfigError(sub(path, "algebra"), "Rota-Baxter coefficients need the matrix algebra");
        auto ns = static_cast<std::uint64_t>(get_int(d, "newton_seed", path, static_cast<int>(seed % 1000000)));
        return linear_rota_baxter_rule(c, operator_matrix(newton_constant_solution(n, ns).r));
    }
    throw ConfigError(sub(path, "family"), "unknown rule family '" + fam + "'");
}

// ---- suites ---------------------------------------------------------------------------------

struct SuiteOutput {
    std::vector<ResidualReport> results;
    json details = json::object();
    std::string error;
};

SamplingConfig sampling(const RunConfig& cfg) {
    SamplingConfig s;
    s.seed = cfg.seed;
    s.samples = cfg.samples;
    s.margin = cfg.pole_margin;
    s.box = cfg.box;
    s.workers = cfg.workers;
    return s;
}

// deterministic auxiliary stream for a sample, keyed by the drawn values
std::mt19937_64 aux_rng(std::uint64_t seed, const Assignment& a) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
    for (const auto& [k, v] : a.values()) {
        double parts[2] = {v.real(), v.imag()};
        for (double p : parts) {
            std::uint64_t bits;
            std::memcpy(&bits, &p, sizeof bits);
            h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
    }
    return std::mt19937_64(h);
}

cx rand_cx(std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    double re = d(g);
    return {re, d(g)};
}

std::vector<std::string> dry_names(const std::function<std::vector<NamedResidual>(cx, cx, cx)>& f) {
    std::vector<std::string> names;
    for (const auto& r : f({0.31, 0.17}, {-0.42, 0.23}, {0.57, -0.36})) names.push_back(r.name);
    return names;
}

std::vector<SampleResidual> values_of(const std::vector<NamedResidual>& v) {
    std::vector<SampleResidual> out;
    for (const auto& r : v) out.push_back(r.value);
    return out;
}

SuiteOutput suite_aybe4(const RunConfig& cfg, bool with_aybe) {
    const CoefficientFunction r = make_solution(cfg.solution, "solution");
    std::vector<std::string> names;
    if (with_aybe) names.push_back("aybe4");
    names.push_back("unitarity");
    const double margin = cfg.pole_margin;
    SuiteOutput out;
    out.results = run_samples(
        names, six_tags(),
        [&](const Assignment& a) {
            Six s = Six::from(a);
            std::vector<SampleResidual> v;
            if (with_aybe) v.push_back(aybe4_residual(r, s, margin));
            v.push_back(unitarity_residual(r, s.u, s.v, s.x, s.y, margin));
            return v;
        },
        sampling(cfg), cfg.tolerance);
    out.details["solution"] = r.name;
    return out;
}

UnivariateMap mobius_from(const json& j, const std::string& path, std::mt19937_64& g) {
    if (j.is_null()) return {};
    if (j.is_string() && j.get<std::string>() == "random") {
        cx a = 1.0 + rand_cx(g, -0.3, 0.3), b = rand_cx(g, -0.5, 0.5), c = rand_cx(g, -0.2, 0.2),
           d = 1.0 + rand_cx(g, -0.3, 0.3);
        return mobius_map(a, b, c, d);
    }
    auto v = cx_list(j, path);
    if (v.size() != 4) throw ConfigError(path, "expected [a, b, c, d] or \"random\"");
    if (std::abs(v[0] * v[3] - v[1] * v[2]) == 0.0) throw ConfigError(path, "singular Moebius map");
    return mobius_map(v[0], v[1], v[2], v[3]);
}

SuiteOutput suite_equivalence(const RunConfig& cfg) {
    const CoefficientFunction r = make_solution(cfg.solution, "solution");
    const json& P = cfg.params;
    std::mt19937_64 g(sample_seed(cfg.seed, 0xE0));
    ScalarField2 q;
    const json qd = P.contains("q") ? P.at("q") : json{{"kind", "affine"}};
    const std::string qk = get_str(qd, "kind", "params.q", "affine");
    if (qk == "affine") {
        cx a = get_cx(qd, "a", "params.q", 1.0), b = get_cx(qd, "b", "params.q", 1.0), c = get_cx(qd, "c", "params.q", 3.0);
        q.name = "affine";
        q.f = [a, b, c](cx u, cx x) { return a * u + b * x + c; };
    } else if (qk == "theta") {
        ThetaParams tp = theta_from(qd, "params.q");
        q = theta_gauge(tp, get_cx(qd, "eta", "params.q", cx{0.17, 0.05}));
    } else if (qk != "one") {
        throw ConfigError("params.q.kind", "unknown gauge kind '" + qk + "' (affine, theta, one)");
    }
    UnivariateMap phi = mobius_from(P.contains("phi") ? P.at("phi") : json(), "params.phi", g);
    UnivariateMap psi = mobius_from(P.contains("psi") ? P.at("psi") : json(), "params.psi", g);
    const CoefficientFunction rt = equiv_transform(r, q, phi, psi);

    std::vector<std::string> names{"aybe4", "unitarity"};
    std::optional<CoefficientFunction> logd, eta_form, gauge_form;
    if (is_elliptic(cfg.solution) && P.contains("eta")) {
        ThetaParams tp = theta_from(normalize_descriptor(cfg.solution), "solution");
        cx eta = complex_from_json(P.at("eta"), "params.eta");
        logd = elliptic_logderiv_solution(tp, eta);
        eta_form = elliptic_eta_solution(tp, eta);
        gauge_form = equiv_transform(elliptic_solution(tp), theta_gauge(tp, eta));
        names.push_back("logderiv-vs-eta");
        names.push_back("eta-vs-gauge");
    }
    const double margin = cfg.pole_margin;
    SuiteOutput out;
    out.results = run_samples(
        names, six_tags(),
        [&](const Assignment& a) {
            Six s = Six::from(a);
            std::vector<SampleResidual> v{aybe4_residual(rt, s, margin), unitarity_residual(rt, s.u, s.v, s.x, s.y, margin)};
            if (logd) {
                auto cmp = [&](const CoefficientFunction& f1, const CoefficientFunction& f2) {
                    Arr x1 = f1.eval({s.u, s.v, s.x, s.y}, margin), x2 = f2.eval({s.u, s.v, s.x, s.y}, margin);
                    return SampleResidual{(x1 - x2).max_abs(), std::max(x1.max_abs(), x2.max_abs())};
                };
                v.push_back(cmp(*logd, *eta_form));
                v.push_back(cmp(*eta_form, *gauge_form));
            }
            return v;
        },
        sampling(cfg), cfg.tolerance);
    out.details["solution"] = rt.name;
    return out;
}

SuiteOutput suite_theorem1(const RunConfig& cfg) {
    const CoefficientFunction r = make_solution(cfg.solution, "solution");
    if (r.m != 1) throw ConfigError("solution", "theorem1 works with m = 1 solutions");
    const json bd = cfg.params.contains("beta") ? cfg.params.at("beta") : json::object();
    cx ka = get_cx(bd, "a", "params.beta", 1.0), kb = get_cx(bd, "b", "params.beta", 0.5),
       kc = get_cx(bd, "c", "params.beta", cx{0.3, -0.2});
    auto beta = beta_general_m1([ka](cx u, cx v) { return ka * ((u - v) + 1.0 / (u - v)); },
                                [kb](cx x, cx y) { return kb * (x - y) * (x - y) * (x - y); },
                                [kc](cx v, cx x) { return kc * (v * x + std::exp(v - x)); }, {diff_pole("u=v", 0, 1)});
    BracketRule comm = commutative_rule("theorem1", beta, r);
    const Generator ga{0, 2, {Tag("u"), Tag("x")}}, gb{0, 2, {Tag("v"), Tag("y")}}, gc{0, 2, {Tag("w"), Tag("z")}};
    const double margin = cfg.pole_margin;
    SuiteOutput out;
    out.results = run_samples(
        {"r-aybe", "cross", "beta-sixterm", "skew-r", "skew-beta", "reduced-beta", "commutative-jacobi"}, six_tags(),
        [&](const Assignment& a) {
            Six s = Six::from(a);
            Theorem1Sample t = theorem1_residuals(r, beta, s, margin);
            return std::vector<SampleResidual>{t.r_aybe,   t.cross,  t.beta_six,
                                               t.skew_r,   t.skew_beta, theorem1_reduced_beta(beta, s, margin),
                                               commutative_jacobi_oracle(comm, ga, gb, gc, a, margin)};
        },
        sampling(cfg), cfg.tolerance);
    out.details["solution"] = r.name;
    out.details["beta"] = beta.name;
    return out;
}

SuiteOutput suite_theorem2(const RunConfig& cfg) {
    const BracketRule rule = make_rule(cfg.rule, "rule", cfg.seed);
    if (rule.kind != Ansatz::FourParamExchange) throw ConfigError("rule.family", "theorem2 needs a four_param rule");
    const int m = rule.m;
    Algebra A(m, 2);
    std::vector<JacobiTerms> jac;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                jac.push_back(double_jacobi(rule, A.letter(i, "u", "x"), A.letter(j, "v", "y"), A.letter(k, "w", "z")));
    const double margin = cfg.pole_margin;
    auto names = dry_names([&](cx, cx, cx) {
        return theorem2_relation_residuals(rule, Six{{0.31, 0.17}, {-0.42, 0.23}, {0.57, -0.36}, {0.11, 0.5}, {-0.2, -0.7}, {0.45, 0.02}}, 0.0);
    });
    names.push_back("double-jacobi");
    SuiteOutput out;
    out.results = run_samples(
        names, six_tags(),
        [&](const Assignment& a) {
            auto v = values_of(theorem2_relation_residuals(rule, Six::from(a), margin));
            SampleResidual worst;
            for (const auto& J : jac) {
                SampleResidual r = double_jacobi_residual(rule, J, a, margin);
                worst.abs = std::max(worst.abs, r.abs);
                worst.term = std::max(worst.term, r.term);
            }
            v.push_back(worst);
            return v;
        },
        sampling(cfg), cfg.tolerance);
    out.details["rule"] = rule.name;
    return out;
}

// every triple of words with the given total length bound, letters on distinct tags a1, a2, ...
std::vector<std::array<FreeElement, 3>> word_triples(int m, int max_len) {
    Algebra A(m, 1);
    std::vector<std::array<FreeElement, 3>> out;
    for (int l1 = 1; l1 <= max_len; ++l1)
        for (int l2 = 1; l1 + l2 <= max_len; ++l2)
            for (int l3 = 1; l1 + l2 + l3 <= max_len; ++l3) {
                const int L = l1 + l2 + l3;
                int total = Arr::ipow(m, L);
                for (int code = 0; code < total; ++code) {
                    std::vector<int> idx(L);
                    int c = code;
                    for (int k = 0; k < L; ++k) idx[k] = c % m, c /= m;
                    auto word = [&](int from, int len) {
                        FreeElement e = A.unit();
                        for (int k = from; k < from + len; ++k)
                            e = e * A.letter(idx[k], Tag("a" + std::to_string(k + 1)));
                        return e;
                    };
                    out.push_back({word(0, l1), word(l1, l2), word(l1 + l2, l3)});
                }
            }
    return out;
}

std::vector<Tag> with_word_tags(std::vector<Tag> tags, int n) {
    for (int k = 1; k <= n; ++k) tags.push_back(Tag("a" + std::to_string(k)));
    return tags;
}

SuiteOutput suite_oneparam(const RunConfig& cfg) {
    const BracketRule rule = make_rule(cfg.rule, "rule", cfg.seed);
    if (rule.kind != Ansatz::OneParamQuadratic) throw ConfigError("rule.family", "oneparam needs gh, yang or shifted_yang");
    const int max_len = get_int(cfg.params, "max_word_length", "params", rule.m == 1 ? 5 : 3);
    if (max_len < 3) throw ConfigError("params.max_word_length", "must be >= 3");
    std::vector<JacobiTerms> jac;
    for (const auto& t : word_triples(rule.m, max_len)) jac.push_back(double_jacobi(rule, t[0], t[1], t[2]));
    const double margin = cfg.pole_margin;
    auto names = dry_names([&](cx u, cx v, cx w) { return oneparam_relation_residuals(rule, u, v, w, 0.0); });
    names.push_back("word-jacobi");
    names.push_back("sixterm");
    const CoefficientFunction alpha = alpha_of(rule);
    SuiteOutput out;
    out.results = run_samples(
        names, with_word_tags(three_tags(), max_len),
        [&](const Assignment& a) {
            const cx u = a.at("u"), v = a.at("v"), w = a.at("w");
            auto res = values_of(oneparam_relation_residuals(rule, u, v, w, margin));
            SampleResidual worst;
            for (const auto& J : jac) {
                SampleResidual r = double_jacobi_residual(rule, J, a, margin);
                worst.abs = std::max(worst.abs, r.abs);
                worst.term = std::max(worst.term, r.term);
            }
            res.push_back(worst);
            res.push_back(sixterm_residual(alpha, u, v, w, margin));
            return res;
        },
        sampling(cfg), cfg.tolerance);
    out.details["rule"] = rule.name;
    out.details["word_triples"] = jac.size();
    return out;
}

SuiteOutput suite_linear(const RunConfig& cfg) {
    const BracketRule rule = make_rule(cfg.rule, "rule", cfg.seed);
    if (rule.kind != Ansatz::Linear)
        throw ConfigError("rule.family", "linear needs linear_general, linear_structure or linear_rota_baxter");
    const double margin = cfg.pole_margin;
    auto names = dry_names([&](cx u, cx v, cx w) { return linear_relation_residuals(rule, u, v, w, 0.0); });
    names.push_back("associativity");
    SuiteOutput out;
    out.results = run_samples(
        names, three_tags(),
        [&](const Assignment& a) {
            const cx u = a.at("u"), v = a.at("v"), w = a.at("w");
            auto res = values_of(linear_relation_residuals(rule, u, v, w, margin));
            res.push_back(linear_associativity_residual(rule, u, v, w, margin));
            return res;
        },
        sampling(cfg), cfg.tolerance);
    out.details["rule"] = rule.name;
    return out;
}

Vec random_vec(std::mt19937_64& g, int dim) {
    Vec x(dim);
    for (auto& c : x) c = rand_cx(g);
    return x;
}

SuiteOutput suite_rota_baxter(const RunConfig& cfg) {
    const json& P = cfg.params;
    LaurentWindow win;
    if (P.contains("window")) {
        const json& w = P.at("window");
        win.n = get_int(w, "n", "params.window", win.n);
        win.lo = get_int(w, "lo", "params.window", win.lo);
        win.hi = get_int(w, "hi", "params.window", win.hi);
        if (win.n < 1 || win.lo > 0 || win.hi < 0) throw ConfigError("params.window", "need n >= 1 and lo <= 0 <= hi");
    }
    const AssocAlgebra lalg = win.algebra();
    const LinearOperatorOnA sts = sts_operator(win);
    const int m = get_int(P, "m", "params", 2);
    if (m < 1) throw ConfigError("params.m", "m must be >= 1");
    auto ns = static_cast<std::uint64_t>(get_int(P, "newton_seed", "params", static_cast<int>(cfg.seed % 1000000)));
    const NewtonResult nr = newton_constant_solution(m, ns);
    const AssocAlgebra malg = matrix_algebra(m);
    const LinearOperatorOnA R0 = constant_operator("M0", operator_matrix(nr.r));
    const LinearOperatorOnA Ruv = operator_sum(pole_identity(m * m), R0);
    const double margin = cfg.pole_margin;
    // operands live in degrees with sums inside the window
    const int dlo = win.lo / 2, dhi = win.hi / 2;
    SuiteOutput out;
    out.results = run_samples(
        {"sts-weight-minus-one", "constant-circ-associativity", "parameter-rota-baxter"}, three_tags(),
        [&](const Assignment& a) {
            std::mt19937_64 g = aux_rng(cfg.seed, a);
            const cx u = a.at("u"), v = a.at("v"), w = a.at("w");
            if (std::min({std::abs(u - v), std::abs(v - w), std::abs(u - w)}) < margin)
                throw PoleMarginError("u, v, w too close");
            auto window_vec = [&] {
                Vec x(win.dim());
                for (int i = 0; i < win.dim(); ++i) {
                    int d = win.degree_of(i);
                    if (d >= dlo && d <= dhi) x[i] = rand_cx(g);
                }
                return x;
            };
            std::vector<SampleResidual> res;
            double scale = 0.0;
            Vec x = window_vec(), y = window_vec();
            Vec r1 = rota_baxter_residual(sts, lalg, -1.0, u, v, w, x, y, &scale);
            res.push_back({max_abs(r1), scale});
            Vec p = random_vec(g, m * m), q = random_vec(g, m * m), s = random_vec(g, m * m);
            const cx params[2] = {u, v};
            Vec r2 = associativity_residual(R0, malg, params, p, q, s, &scale);
            res.push_back({max_abs(r2), scale});
            Vec r3 = rota_baxter_residual(Ruv, malg, 0.0, u, v, w, p, q, &scale);
            res.push_back({max_abs(r3), scale});
            return res;
        },
        sampling(cfg), cfg.tolerance);
    out.details["window"] = {{"n", win.n}, {"lo", win.lo}, {"hi", win.hi}};
    out.details["newton_residual"] = nr.residual;
    return out;
}

SuiteOutput suite_trace(const RunConfig& cfg) {
    const BracketRule rule = make_rule(cfg.rule, "rule", cfg.seed);
    if (rule.kind != Ansatz::OneParamQuadratic) throw ConfigError("rule.family", "trace needs gh, yang or shifted_yang");
    const int max_len = get_int(cfg.params, "max_word_length", "params", 3);
    if (max_len < 1) throw ConfigError("params.max_word_length", "must be >= 1");
    const double margin = cfg.pole_margin;
    const Algebra A(rule.m, 1);
    std::vector<Tag> tags;
    for (int k = 1; k <= 3 * max_len; ++k) tags.push_back(Tag("t" + std::to_string(k)));
    SuiteOutput out;
    out.results = run_samples(
        {"commutator-left", "commutator-right"}, tags,
        [&](const Assignment& a) {
            std::mt19937_64 g = aux_rng(cfg.seed, a);
            std::uniform_int_distribution<int> len(1, max_len), idx(0, rule.m - 1);
            int next = 1;
            auto word = [&] {
                FreeElement e = A.unit();
                int l = len(g);
                for (int k = 0; k < l; ++k) e = e * A.letter(idx(g), Tag("t" + std::to_string(next++)));
                return e;
            };
            FreeElement X = word(), Y = word(), Z = word();
            FreeElement comm = X * Y - Y * X;
            auto tl = trace_bracket(rule, comm, Z, a, margin);
            auto tr = trace_bracket(rule, Z, comm, a, margin);
            double term = std::max(max_abs(trace_bracket(rule, X * Y, Z, a, margin)),
                                   max_abs(trace_bracket(rule, Z, X * Y, a, margin)));
            return std::vector<SampleResidual>{{max_abs(tl), term}, {max_abs(tr), term}};
        },
        sampling(cfg), cfg.tolerance);
    out.details["rule"] = rule.name;
    return out;
}

json tensor2_json(const Tensor2<cx>& t, int n) {
    json terms = json::array();
    auto wname = [n](const Word& w) {
        std::string s;
        for (const auto& g : w) s += (s.empty() ? "" : "*") + ("e" + std::to_string(g.index / (n + 1) + 1) + "_" + std::to_string(g.index % (n + 1)));
        return s.empty() ? std::string("1") : s;
    };
    for (const auto& [k, c] : t.terms()) terms.push_back({wname(k[0]), wname(k[1]), complex_json(c)});
    return terms;
}

SuiteOutput suite_expand(const RunConfig& cfg) {
    const BracketRule rule = make_rule(cfg.rule, "rule", cfg.seed);
    const int n = get_int(cfg.params, "n", "params", 2);
    if (n < 0) throw ConfigError("params.n", "n must be >= 0");
    const Expansion ex = expand_polynomial_generators(rule, n);
    const int N = ex.rule.m;
    Algebra C(N, 0);
    SampleResidual jac;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                JacobiTerms J = double_jacobi(ex.rule, C.letter(i), C.letter(j), C.letter(k));
                auto none = [](const Atom&) -> cx { throw std::logic_error("constant rule produced a coefficient atom"); };
                jac.abs = std::max(jac.abs, max_abs(evaluate(J.total, none)));
                for (const auto& p : J.parts) jac.term = std::max(jac.term, max_abs(evaluate(p, none)));
            }
    SuiteOutput out;
    out.results.push_back(single_report("remainder", {ex.remainder, 0.0}, cfg.tolerance));
    out.results.push_back(single_report("double-jacobi", jac, cfg.tolerance));
    json table = json::object();
    for (const auto& [key, t] : ex.rule.table) {
        auto name = [n](int g) { return "e" + std::to_string(g / (n + 1) + 1) + "_" + std::to_string(g % (n + 1)); };
        table[name(key.first) + "," + name(key.second)] = tensor2_json(t, n);
    }
    out.details["rule"] = rule.name;
    out.details["n"] = n;
    out.details["generators"] = N;
    out.details["table"] = table;
    return out;
}

json mobius_json(const Mobius& m) { return json::array({complex_json(m.a), complex_json(m.b), complex_json(m.c), complex_json(m.d)}); }

json form_json(const CanonicalForm& f) {
    json j{{"type", to_string(f.type)},
           {"form", f.form},
           {"reduced_form", f.reduced_form},
           {"map", mobius_json(f.map)},
           {"scale", complex_json(f.scale)},
           {"verification", f.verification}};
    json roots = json::array();
    for (const auto& [z, k] : f.roots)
        roots.push_back({{"root", std::isnan(z.real()) ? json("inf") : complex_json(z)}, {"multiplicity", k}});
    j["roots"] = roots;
    if (f.sigma) j["sigma"] = complex_json(*f.sigma);
    if (f.sigma_class) j["sigma_class"] = complex_json(*f.sigma_class);
    return j;
}

SuiteOutput suite_classify(const RunConfig& cfg) {
    const json& P = cfg.params;
    SeparableData data{quartic_from_json(require(P, "P", "params"), "params.P"),
                       quartic_from_json(require(P, "Q", "params"), "params.Q")};
    Tolerances tol;
    tol.invariant_match = get_real(P, "invariant_tolerance", "params", tol.invariant_match);
    if (!(tol.invariant_match > 0)) throw ConfigError("params.invariant_tolerance", "must be positive");
    SuiteOutput out;
    out.details["P"] = quartic_json(data.P);
    out.details["Q"] = quartic_json(data.Q);
    try {
        ClassificationRecord rec = classify(data, tol);
        out.details["type"] = to_string(rec.type);
        out.details["verdict"] = rec.verdict;
        out.details["I1"] = complex_json(rec.inv.I1);
        out.details["I2"] = complex_json(rec.inv.I2);
        out.details["lambda1"] = complex_json(rec.lambda1);
        out.details["lambda2"] = complex_json(rec.lambda2);
        out.details["P_form"] = form_json(rec.p_form);
        out.details["Q_form"] = form_json(rec.q_form);
        out.results.push_back(single_report("classification", {0.0, 1.0}, cfg.tolerance));
        if (rec.lambda1.imag() == 0.0 && rec.lambda2.imag() == 0.0) {
            const double l1 = rec.lambda1.real(), l2 = rec.lambda2.real();
            double w0 = 0.5;
            while (2 * w0 * w0 * w0 + l1 * w0 + l2 < 0) w0 += 0.25;
            GridFunction Z = integrate_z(l1, l2, w0, 1, 0.0, 5e-4, 801);
            ZOdeResult zr = z_ode_residual(Z, l1, l2, 1e-6);
            out.results.push_back(single_report("z-ode", {zr.residual, 0.0}, std::max(cfg.tolerance, 1e-6)));
            out.details["z_ode_truncation_estimate"] = zr.truncation_estimate;
        }
    } catch (const ClassifierError& e) {
        out.error = e.what();
        ResidualReport r = single_report("classification", {1.0, 0.0}, cfg.tolerance);
        r.pass = false;
        out.results.push_back(r);
        out.details["rejected"] = e.what();
    }
    return out;
}

SuiteOutput suite_theta(const RunConfig& cfg) {
    ThetaParams tp;
    if (cfg.params.contains("tau")) tp = theta_from(cfg.params, "params");
    const double eps = 1e-3;
    RunConfig c2 = cfg;
    if (!cfg.box_given) c2.box = {-1.0, 1.0, -tp.tau.imag() / 2, tp.tau.imag() / 2};
    SuiteOutput out;
    out.results = run_samples(
        {"oddness", "period-1", "period-tau", "derivative"}, {Tag("z")},
        [&](const Assignment& a) {
            const cx z = a.at("z");
            const cx t = theta11(z, tp), tau = tp.tau, I{0.0, 1.0};
            const double pi = 3.14159265358979323846;
            const cx tm = theta11(-z, tp), t1 = theta11(z + 1.0, tp), tt = theta11(z + tau, tp);
            const cx fac = std::exp(-pi * I * tau - 2.0 * pi * I * z);
            const cx d = theta11_prime(z, tp);
            const cx fd = (-theta11(z + 2 * eps, tp) + 8.0 * theta11(z + eps, tp) - 8.0 * theta11(z - eps, tp) +
                           theta11(z - 2 * eps, tp)) / (12 * eps);
            return std::vector<SampleResidual>{{std::abs(tm + t), std::abs(t)},
                                               {std::abs(t1 + t), std::abs(t)},
                                               {std::abs(tt + fac * t), std::max(std::abs(tt), std::abs(fac * t))},
                                               {std::abs(d - fd), std::abs(d)}};
        },
        sampling(c2), cfg.tolerance);
    out.details["tau"] = complex_json(tp.tau);
    return out;
}

}  // namespace

// ---- config -------------------------------------------------------------------------------

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
    static const std::set<std::string> known{"suite", "solution", "rule", "params", "identities", "samples", "seed",
                                             "tolerance", "pole_margin", "box", "workers", "out", "P", "Q", "tau"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw ConfigError(k, "unknown field");
    RunConfig c;
    c.suite = get_str(j, "suite", "", "");
    if (c.suite.empty()) throw ConfigError("suite", "missing required field");
    if (!kSuites.count(c.suite)) throw ConfigError("suite", "unknown suite '" + c.suite + "'");
    if (j.contains("samples")) {
        if (!j["samples"].is_number_integer() || j["samples"].get<long long>() < 1)
            throw ConfigError("samples", "must be an integer >= 1");
        c.samples = j["samples"].get<int>();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || (j["seed"].is_number_integer() && !j["seed"].is_number_unsigned() && j["seed"].get<long long>() < 0))
            throw ConfigError("seed", "must be a non-negative 64-bit integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    c.tolerance = get_real(j, "tolerance", "", c.tolerance);
    if (!(c.tolerance > 0)) throw ConfigError("tolerance", "must be positive");
    c.pole_margin = get_real(j, "pole_margin", "", c.pole_margin);
    if (!(c.pole_margin > 0)) throw ConfigError("pole_margin", "must be positive");
    c.workers = get_int(j, "workers", "", 1);
    if (c.workers < 1) throw ConfigError("workers", "must be >= 1");
    c.out = get_str(j, "out", "", "");
    if (j.contains("identities")) {
        const json& ids = j["identities"];
        if (!ids.is_array()) throw ConfigError("identities", "expected an array of names");
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (!ids[i].is_string()) throw ConfigError("identities[" + std::to_string(i) + "]", "expected a string");
            c.identities.push_back(ids[i].get<std::string>());
        }
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw ConfigError("params", "expected an object");
        c.params = j["params"];
    }
    for (const char* k : {"P", "Q", "tau"})
        if (j.contains(k)) c.params[k] = j[k];
    if (j.contains("solution")) c.solution = normalize_descriptor(j["solution"]);
    if (j.contains("rule")) c.rule = normalize_descriptor(j["rule"]);

    static const std::set<std::string> needs_solution{"aybe4", "unitarity", "theorem1", "equivalence"};
    static const std::set<std::string> needs_rule{"theorem2", "oneparam", "linear", "trace", "expand"};
    if (needs_solution.count(c.suite)) {
        if (c.solution.is_null()) throw ConfigError("solution", "missing required field");
        make_solution(c.solution, "solution");
    }
    if (needs_rule.count(c.suite) && c.rule.is_null()) throw ConfigError("rule", "missing required field");
    if (c.suite == "classify") {
        quartic_from_json(require(c.params, "P", "params"), "params.P");
        quartic_from_json(require(c.params, "Q", "params"), "params.Q");
    }

    if (j.contains("box")) {
        const json& b = j["box"];
        auto range = [&](const char* k, double& lo, double& hi) {
            if (!b.contains(k)) return;
            const json& r = b[k];
            if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number() || r[0].get<double>() >= r[1].get<double>())
                throw ConfigError(std::string("box.") + k, "expected [lo, hi] with lo < hi");
            lo = r[0].get<double>();
            hi = r[1].get<double>();
        };
        range("re", c.box.re_lo, c.box.re_hi);
        range("im", c.box.im_lo, c.box.im_hi);
        c.box_given = true;
    } else if (!c.solution.is_null()) {
        if (is_elliptic(c.solution)) {
            const double h = theta_from(c.solution, "solution").tau.imag() / 4;
            c.box = {-1.0, 1.0, -h, h};
        }
    }
    return c;
}

json to_json(const RunConfig& c) {
    json j;
    j["suite"] = c.suite;
    if (!c.solution.is_null()) j["solution"] = c.solution;
    if (!c.rule.is_null()) j["rule"] = c.rule;
    if (!c.params.empty()) j["params"] = c.params;
    if (!c.identities.empty()) j["identities"] = c.identities;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    j["tolerance"] = c.tolerance;
    j["pole_margin"] = c.pole_margin;
    j["box"] = {{"re", {c.box.re_lo, c.box.re_hi}}, {"im", {c.box.im_lo, c.box.im_hi}}};
    return j;
}

// ---- running -----------------------------------------------------------------------------

RunReport run_suite(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteOutput o;
    const std::string& s = cfg.suite;
    if (s == "aybe4") o = suite_aybe4(cfg, true);
    else if (s == "unitarity") o = suite_aybe4(cfg, false);
    else if (s == "equivalence") o = suite_equivalence(cfg);
    else if (s == "theorem1") o = suite_theorem1(cfg);
    else if (s == "theorem2") o = suite_theorem2(cfg);
    else if (s == "oneparam") o = suite_oneparam(cfg);
    else if (s == "linear") o = suite_linear(cfg);
    else if (s == "rota_baxter") o = suite_rota_baxter(cfg);
    else if (s == "trace") o = suite_trace(cfg);
    else if (s == "expand") o = suite_expand(cfg);
    else if (s == "classify") o = suite_classify(cfg);
    else if (s == "theta") o = suite_theta(cfg);
    else throw ConfigError("suite", "unknown suite '" + s + "'");

    if (cfg.params.contains("tolerances")) {
        const json& t = cfg.params.at("tolerances");
        if (!t.is_object()) throw ConfigError("params.tolerances", "expected an object of identity -> tolerance");
        for (auto& x : o.results)
            if (t.contains(x.identity)) {
                x.tolerance = get_real(t, x.identity, "params.tolerances", x.tolerance);
                if (!(x.tolerance > 0)) throw ConfigError("params.tolerances." + x.identity, "must be positive");
                x.pass = x.relative_residual <= x.tolerance;
            }
    }

    RunReport r;
    r.config = cfg;
    r.details = std::move(o.details);
    r.error = o.error;
    if (cfg.identities.empty()) {
        r.results = std::move(o.results);
    } else {
        for (std::size_t i = 0; i < cfg.identities.size(); ++i) {
            auto it = std::find_if(o.results.begin(), o.results.end(),
                                   [&](const ResidualReport& x) { return x.identity == cfg.identities[i]; });
            if (it == o.results.end())
                throw ConfigError("identities[" + std::to_string(i) + "]",
                                  "suite " + s + " has no identity '" + cfg.identities[i] + "'");
            r.results.push_back(*it);
        }
    }
    r.pass = r.error.empty();
    for (const auto& x : r.results) r.pass = r.pass && x.pass;
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

json to_json(const RunReport& r) {
    json j;
    j["config"] = to_json(r.config);
    json res = json::array();
    for (const auto& x : r.results) {
        json a = json::object();
        for (const auto& [t, v] : x.argmax) a[t] = complex_json(v);
        res.push_back({{"identity", x.identity},
                       {"samples", x.samples},
                       {"max_abs_residual", x.max_abs_residual},
                       {"relative_residual", x.relative_residual},
                       {"tolerance", x.tolerance},
                       {"pass", x.pass},
                       {"argmax", a}});
    }
    j["results"] = res;
    j["details"] = r.details;
    if (!r.error.empty()) j["error"] = r.error;
    j["pass"] = r.pass;
    j["wall_time_s"] = r.wall_time;
    return j;
}

RunReport report_from_json(const json& j) {
    RunReport r;
    r.config = parse_config(require(j, "config", ""));
    for (const auto& x : require(j, "results", "")) {
        ResidualReport rr;
        rr.identity = x.at("identity").get<std::string>();
        rr.samples = x.at("samples").get<int>();
        rr.max_abs_residual = x.at("max_abs_residual").get<double>();
        rr.relative_residual = x.at("relative_residual").get<double>();
        rr.tolerance = x.at("tolerance").get<double>();
        rr.pass = x.at("pass").get<bool>();
        for (const auto& [t, v] : x.at("argmax").items()) rr.argmax.emplace_back(t, complex_from_json(v, "argmax." + t));
        r.results.push_back(rr);
    }
    r.details = j.value("details", json::object());
    r.error = j.value("error", "");
    r.pass = require(j, "pass", "").get<bool>();
    r.wall_time = j.value("wall_time_s", 0.0);
    return r;
}

void emit_report(const RunReport& r, const std::string& path) {
    const std::string text = to_json(r).dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write report to " + path);
    f << text;
}

}  // namespace yb
