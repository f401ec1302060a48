#include "yb/bracket.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace yb {

std::string to_string(Ansatz a) {
    switch (a) {
        case Ansatz::FourParamExchange: return "four_param";
        case Ansatz::OneParamQuadratic: return "one_param";
        case Ansatz::Linear: return "linear";
        case Ansatz::QuadraticPoissonCommutative: return "commutative";
        case Ansatz::OneParamPoisson: return "one_param_poisson";
        case Ansatz::Constant: return "constant";
    }
    return "?";
}

int BracketRule::arity() const {
    switch (kind) {
        case Ansatz::FourParamExchange:
        case Ansatz::QuadraticPoissonCommutative: return 2;
        case Ansatz::Constant: return 0;
        default: return 1;
    }
}

namespace {

bool is_zero_fn(const CoefficientFunction& f) { return f.name == "0"; }

BracketRule make_rule(std::string name, Ansatz kind, std::vector<CoefficientFunction> coef,
                      int arity, int rank) {
    BracketRule r;
    r.name = std::move(name);
    r.kind = kind;
    r.m = coef.at(0).m;
    for (const auto& c : coef) {
        if (c.m != r.m) throw AlgebraError("coefficient " + c.name + " has mismatched m");
        if (c.arity != arity || c.rank != rank)
            throw AlgebraError("coefficient " + c.name + " has wrong arity or rank for " +
                               to_string(kind));
        r.vanishing.push_back(is_zero_fn(c));
    }
    r.coef = std::move(coef);
    return r;
}

}  // namespace

BracketRule four_param_rule(std::string name, const CoefficientFunction& alpha,
                            const CoefficientFunction& beta, const CoefficientFunction& gamma,
                            const CoefficientFunction& delta) {
    return make_rule(std::move(name), Ansatz::FourParamExchange, {alpha, beta, gamma, delta}, 4, 4);
}

BracketRule one_param_rule(std::string name, const CoefficientFunction& alpha,
                           const CoefficientFunction& beta, const CoefficientFunction& gamma,
                           const CoefficientFunction& delta) {
    return make_rule(std::move(name), Ansatz::OneParamQuadratic, {alpha, beta, gamma, delta}, 2, 4);
}

BracketRule linear_rule(std::string name, const CoefficientFunction& a, const CoefficientFunction& b) {
    return make_rule(std::move(name), Ansatz::Linear, {a, b}, 2, 3);
}

BracketRule commutative_rule(std::string name, const CoefficientFunction& beta,
                             const CoefficientFunction& r) {
    return make_rule(std::move(name), Ansatz::QuadraticPoissonCommutative, {beta, r}, 4, 4);
}

BracketRule one_param_poisson_rule(std::string name, const CoefficientFunction& alpha) {
    return make_rule(std::move(name), Ansatz::OneParamPoisson, {alpha}, 2, 4);
}

BracketRule constant_rule(std::string name, int m, std::map<std::pair<int, int>, Tensor2<cx>> table) {
    BracketRule r;
    r.name = std::move(name);
    r.kind = Ansatz::Constant;
    r.m = m;
    r.table = std::move(table);
    return r;
}

// ---- generator brackets ------------------------------------------------------------

namespace {

Generator make_gen(int index, int arity, const Tag& a, const Tag& b = {}) {
    Generator g;
    g.index = index;
    g.arity = arity;
    if (arity >= 1) g.slots[0] = a;
    if (arity == 2) g.slots[1] = b;
    return g;
}

Atom atom(int fn, std::array<int, 4> idx, std::initializer_list<Tag> args) {
    Atom a;
    a.fn = fn;
    a.idx = idx;
    int k = 0;
    for (const auto& t : args) a.args[k++] = t;
    a.nargs = k;
    return a;
}

void add_term(SymTensor2& out, const Word& l, const Word& r, const Atom& a, cx c = 1.0) {
    out.add({l, r}, Sym::atom(a, c));
}

void check_gen(const BracketRule& rule, const Generator& g) {
    if (g.arity != rule.arity())
        throw AlgebraError("generator " + to_string(g) + " has arity " + std::to_string(g.arity) +
                           " but rule " + rule.name + " expects " + std::to_string(rule.arity()));
    if (g.index < 0 || g.index >= rule.m)
        throw AlgebraError("generator index out of range for rule " + rule.name);
}

}  // namespace

SymTensor2 bracket_generators(const BracketRule& rule, const Generator& ga, const Generator& gb) {
    check_gen(rule, ga);
    check_gen(rule, gb);
    SymTensor2 out;
    out.spec = rule.spec();
    const int m = rule.m;
    const int i = ga.index, j = gb.index;
    const Word one{};
    switch (rule.kind) {
        case Ansatz::FourParamExchange: {
            const Tag &u = ga.slots[0], &x = ga.slots[1], &v = gb.slots[0], &y = gb.slots[1];
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    const std::array<int, 4> id{k, l, i, j};
                    if (rule.active(0))
                        add_term(out, {make_gen(k, 2, u, y)}, {make_gen(l, 2, v, x)}, atom(0, id, {u, v, x, y}));
                    if (rule.active(1))
                        add_term(out, {make_gen(k, 2, v, x)}, {make_gen(l, 2, u, y)}, atom(1, id, {u, v, x, y}));
                    if (rule.active(2))
                        add_term(out, {make_gen(k, 2, u, x)}, {make_gen(l, 2, v, y)}, atom(2, id, {u, v, x, y}));
                    if (rule.active(3))
                        add_term(out, {make_gen(k, 2, v, y)}, {make_gen(l, 2, u, x)}, atom(3, id, {u, v, x, y}));
                }
            break;
        }
        case Ansatz::OneParamQuadratic: {
            const Tag &u = ga.slots[0], &v = gb.slots[0];
            for (int p = 0; p < m; ++p)
                for (int q = 0; q < m; ++q) {
                    const std::array<int, 4> id{p, q, i, j}, di{p, q, j, i};
                    const Generator pu = make_gen(p, 1, u), pv = make_gen(p, 1, v);
                    const Generator qu = make_gen(q, 1, u), qv = make_gen(q, 1, v);
                    if (rule.active(0)) add_term(out, {pu}, {qv}, atom(0, id, {u, v}));
                    if (rule.active(1)) add_term(out, {pv}, {qu}, atom(1, id, {u, v}));
                    if (rule.active(2)) {
                        add_term(out, {pu, qv}, one, atom(2, id, {u, v}));
                        add_term(out, one, {pv, qu}, atom(2, di, {v, u}), -1.0);
                    }
                    if (rule.active(3)) {
                        add_term(out, one, {pu, qv}, atom(3, id, {u, v}));
                        add_term(out, {pv, qu}, one, atom(3, di, {v, u}), -1.0);
                    }
                }
            break;
        }
        case Ansatz::Linear: {
            const Tag &u = ga.slots[0], &v = gb.slots[0];
            for (int k = 0; k < m; ++k) {
                const Generator ku = make_gen(k, 1, u), kv = make_gen(k, 1, v);
                if (rule.active(0)) {
                    add_term(out, {ku}, one, atom(0, {k, i, j, 0}, {u, v}));
                    add_term(out, one, {kv}, atom(0, {k, j, i, 0}, {v, u}), -1.0);
                }
                if (rule.active(1)) {
                    add_term(out, {kv}, one, atom(1, {k, i, j, 0}, {u, v}));
                    add_term(out, one, {ku}, atom(1, {k, j, i, 0}, {v, u}), -1.0);
                }
            }
            break;
        }
        case Ansatz::Constant: {
            auto it = rule.table.find({i, j});
            if (it != rule.table.end()) return lift(it->second);
            it = rule.table.find({j, i});
            if (it != rule.table.end()) return lift(Tensor2<cx>(-tensor_flip(it->second)));
            break;
        }
        default:
            throw AlgebraError("rule " + rule.name + " defines a commutative bracket, not a double one");
    }
    return out;
}

namespace {

SymTensor2 left_mult(const Word& w, const SymTensor2& t) {
    SymTensor2 r;
    r.spec = t.spec;
    for (const auto& [k, c] : t.terms()) r.add({concat(w, k[0]), k[1]}, c);
    return r;
}

SymTensor2 right_mult(const SymTensor2& t, const Word& w) {
    SymTensor2 r;
    r.spec = t.spec;
    for (const auto& [k, c] : t.terms()) r.add({k[0], concat(k[1], w)}, c);
    return r;
}

// {{g, w}} for a generator g and a word w, by the right Leibniz rule
SymTensor2 gen_word(const BracketRule& rule, const Generator& g, const Word& w) {
    SymTensor2 out;
    out.spec = rule.spec();
    for (std::size_t k = 0; k < w.size(); ++k) {
        const Word pre(w.begin(), w.begin() + k), post(w.begin() + k + 1, w.end());
        out += right_mult(left_mult(pre, bracket_generators(rule, g, w[k])), post);
    }
    return out;
}

SymTensor2 word_word(const BracketRule& rule, const Word& a, const Word& b) {
    SymTensor2 out;
    out.spec = rule.spec();
    if (a.empty() || b.empty()) return out;
    for (std::size_t k = 0; k < b.size(); ++k) {
        const Word pre(b.begin(), b.begin() + k), post(b.begin() + k + 1, b.end());
        SymTensor2 ab = a.size() == 1 ? bracket_generators(rule, a[0], b[k])
                                      : SymTensor2(-tensor_flip(gen_word(rule, b[k], a)));
        out += right_mult(left_mult(pre, ab), post);
    }
    return out;
}

}  // namespace

SymTensor2 bracket_extend(const BracketRule& rule, const SymFree& a, const SymFree& b) {
    SymTensor2 out;
    out.spec = rule.spec();
    for (const auto& [wa, ca] : a.terms())
        for (const auto& [wb, cb] : b.terms()) {
            const Sym c = ca * cb;
            const SymTensor2 ww = word_word(rule, wa, wb);
            for (const auto& [k, s] : ww.terms()) out.add(k, c * s);
        }
    return out;
}

SymTensor2 bracket_extend(const BracketRule& rule, const FreeElement& a, const FreeElement& b) {
    return bracket_extend(rule, lift(a), lift(b));
}

namespace {

// {{a, {{b, c}}}}_l
SymTensor3 inner(const BracketRule& rule, const SymFree& a, const SymFree& b, const SymFree& c) {
    SymTensor3 out;
    out.spec = rule.spec();
    const SymTensor2 bc = bracket_extend(rule, b, c);
    for (const auto& [k, s] : bc.terms()) {
        SymFree l;
        l.spec = rule.spec();
        l.add(k[0], Sym(1.0));
        const SymTensor2 al = bracket_extend(rule, a, l);
        for (const auto& [kk, ss] : al.terms())
            out.add({kk[0], kk[1], k[1]}, s * ss);
    }
    return out;
}

}  // namespace

JacobiTerms double_jacobi(const BracketRule& rule, const FreeElement& a, const FreeElement& b,
                          const FreeElement& c) {
    const SymFree A = lift(a), B = lift(b), C = lift(c);
    JacobiTerms j;
    j.parts[0] = inner(rule, A, B, C);
    j.parts[1] = cyclic_shift(inner(rule, B, C, A));
    j.parts[2] = cyclic_shift(cyclic_shift(inner(rule, C, A, B)));
    j.total = j.parts[0] + j.parts[1] + j.parts[2];
    return j;
}

// ---- evaluation ----------------------------------------------------------------------

const Arr& CoefficientEvaluator::array(int fn, const std::array<Tag, 4>& args, int nargs) {
    std::array<std::string, 4> key;
    for (int k = 0; k < nargs; ++k) key[k] = args[k].name;
    auto it = cache_.find({fn, key});
    if (it != cache_.end()) return it->second;
    cx vals[4];
    for (int k = 0; k < nargs; ++k) vals[k] = asg_.at(args[k]);
    const auto& f = rule_.coef.at(fn);
    if (f.arity != nargs) throw AlgebraError("coefficient " + f.name + " called with wrong arity");
    return cache_.emplace(std::make_pair(fn, key), f.eval(vals, margin_)).first->second;
}

cx CoefficientEvaluator::operator()(const Atom& a) {
    const Arr& t = array(a.fn, a.args, a.nargs);
    if (t.rank() == 3) return t(a.idx[0], a.idx[1], a.idx[2]);
    return t(a.idx[0], a.idx[1], a.idx[2], a.idx[3]);
}

SampleResidual double_jacobi_residual(const BracketRule& rule, const JacobiTerms& j,
                                      const Assignment& asg, double margin) {
    CoefficientEvaluator ev(rule, asg, margin);
    return residual_of(j.total, {&j.parts[0], &j.parts[1], &j.parts[2]}, ev);
}

// ---- relation chains ------------------------------------------------------------------

namespace {

Arr at(const CoefficientFunction& f, std::initializer_list<cx> a, double margin) {
    return f.eval(a, margin);
}

Arr swap_skew(const Arr& t) { return t.transposed({1, 0, 3, 2}); }

}  // namespace

std::vector<NamedResidual> theorem2_relation_residuals(const BracketRule& rule, const Six& s,
                                                       double margin) {
    if (rule.kind != Ansatz::FourParamExchange) throw AlgebraError("theorem2 needs a four-parameter rule");
    const cx u = s.u, v = s.v, w = s.w, x = s.x, y = s.y, z = s.z;
    auto F = [&](int k) {
        return [&, k](cx a, cx b, cx c, cx d) { return at(rule.coef[k], {a, b, c, d}, margin); };
    };
    auto A = F(0), B = F(1), G = F(2), D = F(3);
    const char* p1 = "smjk,pqis->ijkpqm";
    const char* p2 = "spki,qmjs->ijkpqm";
    const char* p3 = "sqij,mpks->ijkpqm";
    std::vector<NamedResidual> out;
    auto rel = [&](std::string name, std::vector<Arr> terms) {
        ResidualAccumulator acc;
        for (const auto& t : terms) acc.add(t);
        out.push_back({std::move(name), acc.result()});
    };
    rel("alpha-alpha", {einsum(p1, A(v, w, y, z), A(u, v, x, z)), einsum(p2, A(w, u, z, x), A(v, w, y, x)),
                        einsum(p3, A(u, v, x, y), A(w, u, z, y))});
    rel("beta-beta", {einsum(p1, B(v, w, y, z), B(u, w, x, y)), einsum(p2, B(w, u, z, x), B(v, u, y, z)),
                      einsum(p3, B(u, v, x, y), B(w, v, z, x))});
    rel("alpha-beta", {einsum(p1, A(v, w, y, z), B(u, v, x, z))});
    rel("beta-alpha", {einsum(p1, B(v, w, y, z), A(u, w, x, y))});
    rel("delta-delta", {einsum(p1, D(v, w, y, z), D(u, w, x, z)), einsum(p2, D(w, u, z, x), D(v, u, y, x)),
                        einsum(p3, D(u, v, x, y), D(w, v, z, y))});
    rel("gamma-gamma", {einsum(p1, G(v, w, y, z), G(u, v, x, y)), einsum(p2, G(w, u, z, x), G(v, w, y, z)),
                        einsum(p3, G(u, v, x, y), G(w, u, z, x))});
    rel("alpha-gamma", {einsum(p1, A(v, w, y, z), G(u, v, x, z)), einsum(p2, G(w, u, z, x), A(v, w, y, z))});
    rel("beta-gamma", {einsum(p1, B(v, w, y, z), G(u, w, x, y)), einsum(p2, G(w, u, z, x), B(v, w, y, z))});
    rel("alpha-delta", {einsum(p1, A(v, w, y, z), D(u, v, x, z)), einsum(p3, D(u, v, x, y), A(w, v, z, y))});
    rel("beta-delta", {einsum(p1, B(v, w, y, z), D(u, w, x, y)), einsum(p3, D(u, v, x, y), B(w, v, z, y))});
    rel("gamma-delta", {einsum(p1, G(v, w, y, z), D(u, v, x, y)), einsum(p3, D(u, v, x, y), G(w, v, z, y))});
    const char* names[4] = {"skew-alpha", "skew-beta", "skew-gamma", "skew-delta"};
    auto fns = {A, B, G, D};
    int k = 0;
    for (const auto& f : fns) rel(names[k++], {f(u, v, x, y), swap_skew(f(v, u, y, x))});
    return out;
}

std::vector<NamedResidual> oneparam_relation_residuals(const BracketRule& rule, cx u, cx v, cx w,
                                                       double margin) {
    if (rule.kind != Ansatz::OneParamQuadratic) throw AlgebraError("needs a one-parameter quadratic rule");
    auto F = [&](int k) { return [&, k](cx a, cx b) { return at(rule.coef[k], {a, b}, margin); }; };
    auto A = F(0), B = F(1), G = F(2), D = F(3);
    std::vector<NamedResidual> out;
    using Term = std::pair<Arr, cx>;
    auto rel = [&](std::string name, std::vector<Term> terms) {
        ResidualAccumulator acc;
        for (const auto& [t, c] : terms) acc.add(t, c);
        out.push_back({std::move(name), acc.result()});
    };
    auto E = [](const char* spec, const Arr& a, const Arr& b) { return einsum(spec, a, b); };
    // free indices i j k q r s, summation index t
    rel("alpha-alpha", {{E("tqki,rsjt->ijkqrs", A(w, u), A(v, w)), 1.0},
                        {E("trij,sqkt->ijkqrs", A(u, v), A(w, u)), 1.0},
                        {E("tsjk,qrit->ijkqrs", A(v, w), A(u, v)), 1.0}});
    rel("beta-beta", {{E("tqki,rsjt->ijkqrs", B(w, u), B(v, u)), 1.0},
                      {E("trij,sqkt->ijkqrs", B(u, v), B(w, v)), 1.0},
                      {E("tsjk,qrit->ijkqrs", B(v, w), B(u, w)), 1.0}});
    rel("alpha-beta", {{E("tqjk,rsit->ijkqrs", A(v, w), B(u, v)), 1.0},
                       {E("tsij,qrkt->ijkqrs", B(u, v), A(w, v)), 1.0}});

    rel("delta-delta", {{E("tqkj,rsit->ijkqrs", D(w, v), D(u, w)), 1.0},
                        {E("rtik,sqtj->ijkqrs", D(u, w), D(w, v)), -1.0}});
    rel("gamma-gamma-1", {{E("tqjk,rsti->ijkqrs", G(v, w), G(v, u)), 1.0}});
    rel("gamma-gamma-2", {{E("qtki,rsjt->ijkqrs", G(w, u), G(v, u)), 1.0}});
    rel("gamma-gamma-3", {{E("qtij,rskt->ijkqrs", G(u, v), G(v, w)), 1.0}});
    rel("gamma-gamma-4", {{E("tqjk,rsit->ijkqrs", G(v, w), G(u, v)), 1.0}});
    rel("delta-delta-beta", {{E("qtji,rskt->ijkqrs", D(v, u), D(w, u)), 1.0},
                             {E("rsti,tqjk->ijkqrs", D(w, u), B(v, w)), 1.0},
                             {E("tsji,qrkt->ijkqrs", D(v, u), B(w, v)), 1.0}});
    rel("delta-delta-alpha", {{E("tqji,rstk->ijkqrs", D(v, u), D(v, w)), 1.0},
                              {E("rsjt,tqki->ijkqrs", D(v, w), A(w, u)), 1.0},
                              {E("rtji,qstk->ijkqrs", D(v, u), A(u, w)), 1.0}});
    rel("gamma-alpha", {{E("rsit,tqjk->ijkqrs", G(u, v), A(v, w)), 1.0},
                        {E("tsij,qrkt->ijkqrs", G(u, v), A(w, u)), 1.0}});
    rel("gamma-beta", {{E("rtki,sqjt->ijkqrs", G(w, u), B(v, u)), 1.0},
                       {E("rsti,qtkj->ijkqrs", G(w, u), B(w, v)), 1.0}});
    rel("delta-alpha", {{E("tqik,rsjt->ijkqrs", D(u, w), A(v, u)), 1.0},
                        {E("sqtk,trij->ijkqrs", D(u, w), A(u, v)), 1.0}});
    rel("delta-beta", {{E("rsit,tqjk->ijkqrs", D(u, w), B(v, w)), 1.0},
                       {E("rtik,qstj->ijkqrs", D(u, w), B(w, v)), 1.0}});
    rel("gamma-delta-1", {{E("qrtk,tsji->ijkqrs", G(v, w), D(v, u)), 1.0},
                          {E("qtjk,rsti->ijkqrs", G(v, w), D(w, u)), -1.0}});
    // second term read as printed: its free index s does not occur, so it is constant in s
    rel("gamma-delta-2", {{E("rsit,qtkj->ijkqrs", G(u, v), D(w, v)), 1.0},
                          {E("trij,qrkt->ijkqrs", G(u, v), D(v, w)), -1.0}});
    rel("gamma-alpha-delta-1", {{E("qtij,srtk->ijkqrs", G(u, v), A(v, w)), 1.0},
                                {E("tsij,qrtk->ijkqrs", G(u, v), D(u, v)), 1.0}});
    rel("gamma-alpha-delta-2", {{E("rstj,tqki->ijkqrs", G(w, v), A(w, u)), 1.0},
                                {E("rskt,tqji->ijkqrs", G(w, v), D(v, u)), 1.0}});
    rel("gamma-beta-delta-1", {{E("tqij,rskt->ijkqrs", G(u, v), B(w, u)), 1.0},
                               {E("qtij,rskt->ijkqrs", G(u, v), D(w, v)), 1.0}});
    rel("gamma-beta-delta-2", {{E("rsit,tqjk->ijkqrs", G(u, w), B(v, w)), 1.0},
                               {E("rstk,qtji->ijkqrs", G(u, w), D(v, u)), 1.0}});

    rel("skew-alpha", {{A(u, v), 1.0}, {swap_skew(A(v, u)), 1.0}});
    rel("skew-beta", {{B(u, v), 1.0}, {swap_skew(B(v, u)), 1.0}});

    if (rule.m == 1) {
        auto a = [&](cx p, cx q) { return A(p, q)[0]; };
        auto b = [&](cx p, cx q) { return B(p, q)[0]; };
        auto g = [&](cx p, cx q) { return G(p, q)[0]; };
        auto d = [&](cx p, cx q) { return D(p, q)[0]; };
        auto srel = [&](std::string name, std::vector<cx> terms) {
            ResidualAccumulator acc;
            for (cx t : terms) acc.add(t);
            out.push_back({std::move(name), acc.result()});
        };
        srel("m1-gamma", {g(u, v)});
        srel("m1-alpha", {a(v, w) * a(u, v), a(w, u) * a(v, w), a(u, v) * a(w, u)});
        srel("m1-beta", {b(v, w) * b(u, v), b(w, u) * b(v, w), b(u, v) * b(w, u)});
        srel("m1-delta-alpha", {d(v, u) * d(v, w), -a(w, u) * d(v, u), a(w, u) * d(v, w)});
        srel("m1-delta-beta", {d(w, v) * d(u, v), -b(w, u) * d(w, v), b(w, u) * d(u, v)});
    }
    return out;
}

std::vector<NamedResidual> linear_relation_residuals(const BracketRule& rule, cx u, cx v, cx w,
                                                     double margin) {
    if (rule.kind != Ansatz::Linear) throw AlgebraError("needs a linear rule");
    auto A = [&](cx a, cx b) { return at(rule.coef[0], {a, b}, margin); };
    auto B = [&](cx a, cx b) { return at(rule.coef[1], {a, b}, margin); };
    std::vector<NamedResidual> out;
    auto rel = [&](std::string name, std::vector<std::pair<Arr, cx>> terms) {
        ResidualAccumulator acc;
        for (const auto& [t, c] : terms) acc.add(t, c);
        out.push_back({std::move(name), acc.result()});
    };
    // free i j k l (l is the upper index), summation s
    rel("a-a", {{einsum("sij,lks->ijkl", A(u, v), A(w, u)), 1.0},
                {einsum("ski,lsj->ijkl", A(w, u), A(w, v)), -1.0},
                {einsum("lks,sij->ijkl", A(w, v), B(u, v)), 1.0}});
    rel("b-b", {{einsum("sij,lks->ijkl", B(u, v), B(w, v)), 1.0},
                {einsum("ski,lsj->ijkl", B(w, u), B(u, v)), -1.0},
                {einsum("lsj,ski->ijkl", B(w, v), A(w, u)), -1.0}});
    rel("a-b", {{einsum("sjk,lis->ijkl", A(v, w), B(u, v)), 1.0},
                {einsum("sij,lsk->ijkl", B(u, v), A(v, w)), -1.0}});
    return out;
}

SampleResidual linear_associativity_residual(const BracketRule& rule, cx u, cx v, cx w,
                                             double margin) {
    if (rule.kind != Ansatz::Linear) throw AlgebraError("needs a linear rule");
    auto A = [&](cx a, cx b) { return at(rule.coef[0], {a, b}, margin); };
    auto B = [&](cx a, cx b) { return at(rule.coef[1], {a, b}, margin); };
    // (E_i(u)E_j(v))E_k(w) - E_i(u)(E_j(v)E_k(w)), coefficient of E_l at u, v and w
    ResidualAccumulator cu, cv, cw;
    cu.add(einsum("sij,lsk->ijkl", A(u, v), A(u, w)));
    cu.add(einsum("sjk,lis->ijkl", A(v, w), A(u, v)), -1.0);
    cu.add(einsum("sjk,lis->ijkl", B(v, w), A(u, w)), -1.0);
    cv.add(einsum("sij,lsk->ijkl", B(u, v), A(v, w)));
    cv.add(einsum("sjk,lis->ijkl", A(v, w), B(u, v)), -1.0);
    cw.add(einsum("sij,lsk->ijkl", A(u, v), B(u, w)));
    cw.add(einsum("sij,lsk->ijkl", B(u, v), B(v, w)));
    cw.add(einsum("sjk,lis->ijkl", B(v, w), B(u, w)), -1.0);
    SampleResidual r;
    for (const auto& acc : {cu.result(), cv.result(), cw.result()}) {
        r.abs = std::max(r.abs, acc.abs);
        r.term = std::max(r.term, acc.term);
    }
    return r;
}

EquivalencePair associativity_equivalence_check(const BracketRule& rule, cx u, cx v, cx w,
                                                double margin) {
    EquivalencePair p;
    for (const auto& n : linear_relation_residuals(rule, u, v, w, margin)) {
        p.relations.abs = std::max(p.relations.abs, n.value.abs);
        p.relations.term = std::max(p.relations.term, n.value.term);
    }
    p.associativity = linear_associativity_residual(rule, u, v, w, margin);
    return p;
}

// ---- trace bracket ------------------------------------------------------------------------

Trace<Sym> trace_bracket(const BracketRule& rule, const FreeElement& a, const FreeElement& b) {
    return trace_project(mu(bracket_extend(rule, a, b)));
}

TraceElement trace_bracket(const BracketRule& rule, const FreeElement& a, const FreeElement& b,
                           const Assignment& asg, double margin) {
    CoefficientEvaluator ev(rule, asg, margin);
    return evaluate(trace_bracket(rule, a, b), ev.fn());
}

// ---- commutative Poisson oracle ------------------------------------------------------------

namespace {

using CommPoly = Combination<Word, Sym>;  // keys are sorted generator multisets

Word sorted(Word w) {
    std::sort(w.begin(), w.end());
    return w;
}

CommPoly comm_generators(const BracketRule& rule, const Generator& ga, const Generator& gb) {
    CommPoly out;
    const int m = rule.m, i = ga.index, j = gb.index;
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            const std::array<int, 4> id{p, q, i, j};
            if (rule.kind == Ansatz::QuadraticPoissonCommutative) {
                const Tag &u = ga.slots[0], &x = ga.slots[1], &v = gb.slots[0], &y = gb.slots[1];
                if (rule.active(0))
                    out.add(sorted({make_gen(p, 2, u, x), make_gen(q, 2, v, y)}),
                            Sym::atom(atom(0, id, {u, v, x, y})));
                if (rule.active(1))
                    out.add(sorted({make_gen(p, 2, u, y), make_gen(q, 2, v, x)}),
                            Sym::atom(atom(1, id, {u, v, x, y})));
            } else if (rule.kind == Ansatz::OneParamPoisson) {
                const Tag &u = ga.slots[0], &v = gb.slots[0];
                out.add(sorted({make_gen(p, 1, u), make_gen(q, 1, v)}), Sym::atom(atom(0, id, {u, v})));
            } else {
                throw AlgebraError("commutative oracle needs a commutative rule");
            }
        }
    return out;
}

// {g, P} by the commutative Leibniz rule
CommPoly comm_bracket(const BracketRule& rule, const Generator& g, const CommPoly& p) {
    CommPoly out;
    for (const auto& [mono, c] : p.terms())
        for (std::size_t k = 0; k < mono.size(); ++k) {
            Word rest = mono;
            rest.erase(rest.begin() + k);
            const CommPoly gk = comm_generators(rule, g, mono[k]);
            for (const auto& [m2, c2] : gk.terms())
                out.add(sorted(concat(rest, m2)), c * c2);
        }
    return out;
}

}  // namespace

SampleResidual commutative_jacobi_oracle(const BracketRule& rule, const Generator& a,
                                         const Generator& b, const Generator& c,
                                         const Assignment& asg, double margin) {
    check_gen(rule, a);
    check_gen(rule, b);
    check_gen(rule, c);
    const CommPoly t1 = comm_bracket(rule, a, comm_generators(rule, b, c));
    const CommPoly t2 = comm_bracket(rule, b, comm_generators(rule, c, a));
    const CommPoly t3 = comm_bracket(rule, c, comm_generators(rule, a, b));
    CoefficientEvaluator ev(rule, asg, margin);
    return residual_of(t1 + t2 + t3, {&t1, &t2, &t3}, ev);
}

// ---- polynomial generators -------------------------------------------------------------------

namespace {

// (x - y) f(x, y) = c0 + c1 x + c2 y, fitted and then checked at further points
struct AffineNumerator {
    Arr c0, c1, c2;
};

AffineNumerator fit_numerator(const CoefficientFunction& f) {
    const cx pts[6][2] = {{{0.31, 0.2}, {-0.7, 0.1}}, {{1.1, -0.3}, {0.2, 0.4}}, {{-0.4, 0.6}, {0.9, -0.5}},
                          {{0.13, -0.8}, {-0.35, 0.27}}, {{0.77, 0.41}, {-0.18, -0.62}}, {{-1.2, 0.05}, {0.6, 0.33}}};
    std::vector<Arr> n;
    for (const auto& p : pts) n.push_back(f.raw({p[0], p[1]}) * (p[0] - p[1]));
    Eigen::Matrix3cd M;
    for (int k = 0; k < 3; ++k) M.row(k) << 1.0, pts[k][0], pts[k][1];
    const Eigen::Matrix3cd Minv = M.inverse();
    AffineNumerator a{Arr(f.m, f.rank), Arr(f.m, f.rank), Arr(f.m, f.rank)};
    double scale = 0.0;
    for (std::size_t e = 0; e < a.c0.size(); ++e) {
        Eigen::Vector3cd rhs(n[0][e], n[1][e], n[2][e]);
        Eigen::Vector3cd c = Minv * rhs;
        a.c0[e] = c(0), a.c1[e] = c(1), a.c2[e] = c(2);
        scale = std::max({scale, std::abs(c(0)), std::abs(c(1)), std::abs(c(2))});
    }
    for (int k = 3; k < 6; ++k)
        for (std::size_t e = 0; e < a.c0.size(); ++e) {
            const cx pred = a.c0[e] + a.c1[e] * pts[k][0] + a.c2[e] * pts[k][1];
            if (std::abs(pred - n[k][e]) > 1e-9 * (1.0 + scale))
                throw ExpansionError("coefficient " + f.name + " times (u - v) is not affine in u, v");
        }
    for (Arr* c : {&a.c0, &a.c1, &a.c2})
        for (std::size_t e = 0; e < c->size(); ++e) {
            cx& z = (*c)[e];
            if (std::abs(z.real()) < 1e-12 * (1.0 + scale)) z.real(0.0);
            if (std::abs(z.imag()) < 1e-12 * (1.0 + scale)) z.imag(0.0);
            const double rr = std::round(z.real()), ri = std::round(z.imag());
            if (std::abs(z.real() - rr) < 1e-12 * (1.0 + scale)) z.real(rr);
            if (std::abs(z.imag() - ri) < 1e-12 * (1.0 + scale)) z.imag(ri);
        }
    return a;
}

using BiPoly = std::map<std::pair<int, int>, Tensor2<cx>>;  // (deg u, deg v) -> constant tensor

struct Factor {
    int gen;
    bool at_v;  // E_gen(v) rather than E_gen(u)
};

// add coef(u,v) * (product of factors) (x) (product of factors), E_i(x) = sum_a e_{i a} x^a
void add_expanded(BiPoly& out, int n, const std::array<cx, 3>& c, bool swapped,
                  const std::vector<Factor>& left, const std::vector<Factor>& right) {
    // numerator: unswapped c0 + c1 u + c2 v; swapped -(c0 + c1 v + c2 u)
    std::vector<std::pair<std::pair<int, int>, cx>> num;
    const double sg = swapped ? -1.0 : 1.0;
    num.push_back({{0, 0}, sg * c[0]});
    num.push_back({swapped ? std::make_pair(0, 1) : std::make_pair(1, 0), sg * c[1]});
    num.push_back({swapped ? std::make_pair(1, 0) : std::make_pair(0, 1), sg * c[2]});
    const int nl = static_cast<int>(left.size()), nr = static_cast<int>(right.size());
    const int nf = nl + nr;
    std::vector<int> deg(nf, 0);
    const int stride = n + 1;
    while (true) {
        Word wl, wr;
        int du = 0, dv = 0;
        for (int k = 0; k < nf; ++k) {
            const Factor& f = k < nl ? left[k] : right[k - nl];
            Generator g;
            g.index = f.gen * stride + deg[k];
            g.arity = 0;
            (k < nl ? wl : wr).push_back(g);
            (f.at_v ? dv : du) += deg[k];
        }
        for (const auto& [d, val] : num) {
            if (val == cx{}) continue;
            auto& t = out[{du + d.first, dv + d.second}];
            t.add({wl, wr}, val);
        }
        int k = 0;
        while (k < nf && ++deg[k] > n) deg[k++] = 0;
        if (k == nf) break;
    }
}

}  // namespace

Expansion expand_polynomial_generators(const BracketRule& rule, int n) {
    if (rule.kind != Ansatz::OneParamQuadratic)
        throw ExpansionError("polynomial expansion needs a one-parameter quadratic rule");
    if (n < 0) throw ExpansionError("degree must be non-negative");
    const int m = rule.m, M = m * (n + 1);
    std::vector<AffineNumerator> fits;
    for (std::size_t k = 0; k < rule.coef.size(); ++k)
        fits.push_back(rule.active(static_cast<int>(k)) ? fit_numerator(rule.coef[k])
                                                         : AffineNumerator{});
    Expansion ex;
    std::map<std::pair<int, int>, Tensor2<cx>> table;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            BiPoly N;
            for (int p = 0; p < m; ++p)
                for (int q = 0; q < m; ++q) {
                    auto coefs = [&](int fn, int a, int b) {
                        const auto& f = fits[fn];
                        return std::array<cx, 3>{f.c0(p, q, a, b), f.c1(p, q, a, b), f.c2(p, q, a, b)};
                    };
                    if (rule.active(0)) add_expanded(N, n, coefs(0, i, j), false, {{p, false}}, {{q, true}});
                    if (rule.active(1)) add_expanded(N, n, coefs(1, i, j), false, {{p, true}}, {{q, false}});
                    if (rule.active(2)) {
                        add_expanded(N, n, coefs(2, i, j), false, {{p, false}, {q, true}}, {});
                        auto c = coefs(2, j, i);
                        for (auto& z : c) z = -z;
                        add_expanded(N, n, c, true, {}, {{p, true}, {q, false}});
                    }
                    if (rule.active(3)) {
                        add_expanded(N, n, coefs(3, i, j), false, {}, {{p, false}, {q, true}});
                        auto c = coefs(3, j, i);
                        for (auto& z : c) z = -z;
                        add_expanded(N, n, c, true, {{p, true}, {q, false}}, {});
                    }
                }
            // synthetic division by (u - v) in u, coefficients polynomials in v
            int du = 0;
            for (const auto& [d, t] : N) du = std::max(du, d.first);
            std::vector<std::map<int, Tensor2<cx>>> nk(du + 1);
            for (const auto& [d, t] : N) nk[d.first][d.second] += t;
            auto shift_v = [](const std::map<int, Tensor2<cx>>& a) {
                std::map<int, Tensor2<cx>> r;
                for (const auto& [d, t] : a) r[d + 1] = t;
                return r;
            };
            auto plus = [](std::map<int, Tensor2<cx>> a, const std::map<int, Tensor2<cx>>& b) {
                for (const auto& [d, t] : b) a[d] += t;
                return a;
            };
            std::vector<std::map<int, Tensor2<cx>>> q(std::max(du, 1));
            std::map<int, Tensor2<cx>> rem;
            if (du == 0) {
                rem = nk[0];
            } else {
                q[du - 1] = nk[du];
                for (int k = du - 1; k >= 1; --k) q[k - 1] = plus(nk[k], shift_v(q[k]));
                rem = plus(nk[0], shift_v(q[0]));
            }
            for (const auto& [d, t] : rem) ex.remainder = std::max(ex.remainder, max_abs(t));
            if (ex.remainder > 1e-12)
                throw ExpansionError("division by (u - v) leaves a nonzero remainder " +
                                     std::to_string(ex.remainder));
            for (int a = 0; a < static_cast<int>(q.size()); ++a)
                for (const auto& [b, t] : q[a]) {
                    if (max_abs(t) == 0.0) continue;
                    if (a > n || b > n)
                        throw ExpansionError("quotient has a term of degree above the generator window");
                    Tensor2<cx> clean;
                    clean.spec = {M, 0};
                    for (const auto& [key, c] : t.terms())
                        if (std::abs(c) > 1e-14) clean.add(key, c);
                    table[{i * (n + 1) + a, j * (n + 1) + b}] += clean;
                }
        }
    for (int I = 0; I < M; ++I)
        for (int J = 0; J < M; ++J) table[{I, J}].spec = {M, 0};
    ex.rule = constant_rule(rule.name + "-expanded-" + std::to_string(n), M, std::move(table));
    return ex;
}

}  // namespace yb
