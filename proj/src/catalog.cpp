#include "yb/catalog.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <unsupported/Eigen/LevenbergMarquardt>

namespace yb {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

PoleLocus lattice_pole(std::string what, std::function<cx(const cx*)> arg, cx tau) {
    return {std::move(what), [arg, tau](const cx* a) { return lattice_distance(arg(a), tau); }};
}

PoleLocus exp_pole(std::string what, int i, int j) {
    return {std::move(what), [i, j](const cx* a) { return exp_pole_distance(a[i] - a[j]); }};
}

PoleLocus value_pole(std::string what, std::function<cx(const cx*)> f) {
    return {std::move(what), [f](const cx* a) { return std::abs(f(a)); }};
}

}  // namespace

double exp_pole_distance(cx z) {
    const double k = std::round(z.imag() / two_pi);
    return std::abs(z - cx{0.0, two_pi * k});
}

CoefficientFunction rational_solution() {
    return scalar4(
        "rational", [](cx u, cx v, cx x, cx y) { return 1.0 / (u - v) - 1.0 / (x - y); },
        {diff_pole("u=v", 0, 1), diff_pole("x=y", 2, 3)});
}

CoefficientFunction trigonometric_solution() {
    return scalar4(
        "trigonometric",
        [](cx u, cx v, cx x, cx y) {
            const cx a = std::exp(u - v), b = std::exp(x - y);
            return (a - b) / ((a - 1.0) * (b - 1.0));
        },
        {exp_pole("u-v in 2 pi i Z", 0, 1), exp_pole("x-y in 2 pi i Z", 2, 3)});
}

CoefficientFunction elliptic_solution(const ThetaParams& p) {
    return scalar4(
        "elliptic",
        [p](cx u, cx v, cx x, cx y) {
            return theta11(u - v + x - y, p) / (theta11(u - v, p) * theta11(x - y, p));
        },
        {lattice_pole("u-v on lattice", [](const cx* a) { return a[0] - a[1]; }, p.tau),
         lattice_pole("x-y on lattice", [](const cx* a) { return a[2] - a[3]; }, p.tau)});
}

namespace {

std::vector<PoleLocus> eta_poles(const ThetaParams& p, cx eta) {
    return {lattice_pole("u-v on lattice", [](const cx* a) { return a[0] - a[1]; }, p.tau),
            lattice_pole("x-y on lattice", [](const cx* a) { return a[2] - a[3]; }, p.tau),
            lattice_pole("u+x+eta on lattice", [eta](const cx* a) { return a[0] + a[2] + eta; }, p.tau),
            lattice_pole("v+y+eta on lattice", [eta](const cx* a) { return a[1] + a[3] + eta; }, p.tau)};
}

}  // namespace

CoefficientFunction elliptic_eta_solution(const ThetaParams& p, cx eta) {
    return scalar4(
        "elliptic_eta",
        [p, eta](cx u, cx v, cx x, cx y) {
            return theta11(u - v + x - y, p) * theta11(u + y + eta, p) * theta11(v + x + eta, p) /
                   (theta11(u - v, p) * theta11(x - y, p) * theta11(u + x + eta, p) *
                    theta11(v + y + eta, p));
        },
        eta_poles(p, eta));
}

CoefficientFunction elliptic_logderiv_solution(const ThetaParams& p, cx eta) {
    const cx d0 = theta11_prime(0.0, p);
    return scalar4(
        "elliptic_logderiv",
        [p, eta, d0](cx u, cx v, cx x, cx y) {
            auto L = [&](cx z) { return theta11_prime(z, p) / theta11(z, p); };
            return (L(u - v) - L(u + x + eta) + L(x - y) + L(v + y + eta)) / d0;
        },
        eta_poles(p, eta));
}

ScalarField2 theta_gauge(const ThetaParams& p, cx eta) {
    ScalarField2 q;
    q.name = "theta(u+x+eta)";
    q.f = [p, eta](cx a, cx b) { return theta11(a + b + eta, p); };
    return q;
}

CoefficientFunction uniform_solution(cx p1, cx p2, cx p3) {
    return scalar4(
        "uniform",
        [p1, p2, p3](cx u, cx v, cx x, cx y) {
            return (p1 * u * v + p2 * (u + v) + p3) / (u - v) - (p1 * x * y + p2 * (x + y) + p3) / (x - y);
        },
        {diff_pole("u=v", 0, 1), diff_pole("x=y", 2, 3)});
}

CoefficientFunction degenerate_uv() {
    return scalar4("degenerate_uv", [](cx u, cx v, cx, cx) { return 1.0 / (u - v); },
                   {diff_pole("u=v", 0, 1)});
}

CoefficientFunction degenerate_xy() {
    return scalar4("degenerate_xy", [](cx, cx, cx x, cx y) { return 1.0 / (x - y); },
                   {diff_pole("x=y", 2, 3)});
}

CoefficientFunction beta_general_m1(ScalarFn2 a, ScalarFn2 b, ScalarFn2 c, std::vector<PoleLocus> poles) {
    return scalar4(
        "beta_general",
        [a, b, c](cx u, cx v, cx x, cx y) { return a(u, v) + b(x, y) + c(v, x) - c(u, y); },
        std::move(poles));
}

// ---- one-parameter rules ----------------------------------------------------------------

BracketRule gh_rule(const Univariate& g, const Univariate& h, int eps) {
    if (eps != 0 && eps != 1) throw std::invalid_argument("gh rule needs eps in {0, 1}");
    auto G = g.f, H = h.f;
    auto alpha = scalar2("1/(g(u)-g(v))", [G](cx u, cx v) { return 1.0 / (G(u) - G(v)); },
                         {value_pole("g(u)=g(v)", [G](const cx* a) { return G(a[0]) - G(a[1]); })});
    auto beta = scalar2("1/(h(u)-h(v))", [H](cx u, cx v) { return 1.0 / (H(u) - H(v)); },
                        {value_pole("h(u)=h(v)", [H](const cx* a) { return H(a[0]) - H(a[1]); })});
    CoefficientFunction delta =
        eps == 0 ? zero_coefficient(1, 2)
                 : scalar2("1/(g(v)-h(u))", [G, H](cx u, cx v) { return 1.0 / (G(v) - H(u)); },
                           {value_pole("g(v)=h(u)", [G, H](const cx* a) { return G(a[1]) - H(a[0]); })});
    return one_param_rule("gh[" + g.name + "," + h.name + ",eps=" + std::to_string(eps) + "]", alpha,
                          beta, zero_coefficient(1, 2), delta);
}

namespace {

CoefficientFunction pole_times(const Arr& k, cx sign) {
    auto s = scalar2("1/(u-v)", [sign](cx u, cx v) { return sign / (u - v); }, {diff_pole("u=v", 0, 1)});
    return times(s, k);
}

Arr route_tensor(int route, int m) {
    if (route == 11) return identity_tensor(m);
    if (route == 21) return exchange_tensor(m);
    throw std::invalid_argument("Yang route must be 11 or 21");
}

}  // namespace

BracketRule yang_rule(int route, int m) {
    const Arr k = route_tensor(route, m);
    return one_param_rule("yang" + std::to_string(route), pole_times(k, 1.0), pole_times(k, -1.0),
                          zero_coefficient(m, 2), zero_coefficient(m, 2));
}

BracketRule shifted_yang_rule(int route, const Arr& r) {
    const int m = r.m();
    const Arr k = route_tensor(route, m);
    const auto shift = constant4("r", r, 2);
    if (route == 11)
        return one_param_rule("shifted_yang11", pole_times(k, 1.0), sum(pole_times(k, -1.0), shift),
                              zero_coefficient(m, 2), zero_coefficient(m, 2));
    return one_param_rule("shifted_yang21", sum(pole_times(k, 1.0), shift), pole_times(k, -1.0),
                          zero_coefficient(m, 2), zero_coefficient(m, 2));
}

CoefficientFunction alpha_of(const BracketRule& rule) { return rule.coef.at(0); }

// ---- linear rules -----------------------------------------------------------------------------

BracketRule linear_general_m1(const Univariate& a1, const Univariate& b1) {
    auto A = a1.f, B = b1.f;
    std::vector<PoleLocus> poles{value_pole("b1(u)=b1(v)", [B](const cx* x) { return B(x[0]) - B(x[1]); })};
    Arr one(1, 3);
    one[0] = 1.0;
    auto a = times(scalar2("a", [A, B](cx u, cx v) { return A(v) * B(u) / (B(u) - B(v)); }, poles), one);
    auto b = times(scalar2("b", [A, B](cx u, cx v) { return A(u) * B(v) / (B(v) - B(u)); }, poles), one);
    return linear_rule("linear_general[" + a1.name + "," + b1.name + "]", a, b);
}

BracketRule linear_structure_rule(const Arr& c) {
    if (c.rank() != 3) throw std::invalid_argument("structure constants must be rank 3");
    return linear_rule("linear_structure", pole_times(c, 1.0), pole_times(c, -1.0));
}

BracketRule linear_rota_baxter_rule(const Arr& c, const Arr& r0) {
    const int m = c.m();
    if (r0.rank() != 2 || r0.m() != m) throw std::invalid_argument("r0 must be an m x m matrix");
    auto build = [c, r0, m](bool is_b) {
        CoefficientFunction f;
        f.name = is_b ? "b_rb" : "a_rb";
        f.arity = 2;
        f.m = m;
        f.rank = 3;
        f.fn = [c, r0, m, is_b](const cx* p) {
            // r^s_j(u,v) = delta^s_j/(u-v) + r0[s,j]; b uses r(v,u)
            const cx d = is_b ? 1.0 / (p[1] - p[0]) : 1.0 / (p[0] - p[1]);
            Arr out(m, 3);
            for (int k = 0; k < m; ++k)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) {
                        cx acc{};
                        for (int s = 0; s < m; ++s) {
                            if (!is_b) {
                                const cx rsj = (s == j ? d : cx{}) + r0(s, j);
                                acc += c(k, i, s) * rsj;
                            } else {
                                const cx rsi = (s == i ? d : cx{}) + r0(s, i);
                                acc += c(k, s, j) * rsi;
                            }
                        }
                        out(k, i, j) = acc;
                    }
            return out;
        };
        f.poles = {diff_pole("u=v", 0, 1)};
        return f;
    };
    return linear_rule("linear_rota_baxter", build(false), build(true));
}

// ---- Newton oracle ---------------------------------------------------------------------------

Arr operator_matrix(const Arr& r, bool bar) {
    const int m = r.m();
    Arr M(m * m, 2);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            for (int n = 0; n < m; ++n)
                for (int k = 0; k < m; ++k) M(p * m + q, n * m + k) = bar ? r(p, k, n, q) : r(k, p, n, q);
    return M;
}

namespace {

Arr skew_part(const Eigen::VectorXd& x, int m) {
    Arr r(m, 4);
    for (std::size_t e = 0; e < r.size(); ++e) r[e] = x(static_cast<Eigen::Index>(e));
    return (r - r.transposed({1, 0, 3, 2})) * 0.5;
}

struct AybeFunctor : Eigen::DenseFunctor<double> {
    int m;
    Eigen::VectorXd normal;
    AybeFunctor(int m_, Eigen::VectorXd n)
        : DenseFunctor<double>(m_ * m_ * m_ * m_, Arr::ipow(m_, 6) + 1), m(m_), normal(std::move(n)) {}

    int operator()(const InputType& x, ValueType& f) const {
        const Arr r = skew_part(x, m);
        const Arr t = constant_aybe_tensor(r);
        for (std::size_t e = 0; e < t.size(); ++e) f(static_cast<Eigen::Index>(e)) = t[e].real();
        double lin = 0.0;
        for (std::size_t e = 0; e < r.size(); ++e) lin += normal(static_cast<Eigen::Index>(e)) * r[e].real();
        f(values() - 1) = lin - 1.0;
        return 0;
    }
    // quadratic map: Q(r + e) - Q(r) - Q(e) is the exact linearization
    int df(const InputType& x, JacobianType& J) const {
        const Arr r = skew_part(x, m);
        const Arr q0 = constant_aybe_tensor(r);
        for (int k = 0; k < inputs(); ++k) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(inputs());
            e(k) = 1.0;
            const Arr re = skew_part(e, m);
            const Arr d = constant_aybe_tensor(r + re) - q0 - constant_aybe_tensor(re);
            for (std::size_t i = 0; i < d.size(); ++i) J(static_cast<Eigen::Index>(i), k) = d[i].real();
            double lin = 0.0;
            for (std::size_t i = 0; i < re.size(); ++i) lin += normal(static_cast<Eigen::Index>(i)) * re[i].real();
            J(values() - 1, k) = lin;
        }
        return 0;
    }
};

}  // namespace

NewtonResult newton_constant_solution(int m, std::uint64_t seed, double accept, int max_restarts) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, 1.0);
    const int n = m * m * m * m;
    for (int attempt = 0; attempt < max_restarts; ++attempt) {
        Eigen::VectorXd normal(n), x(n);
        for (int i = 0; i < n; ++i) normal(i) = N(rng);
        for (int i = 0; i < n; ++i) x(i) = N(rng);
        AybeFunctor f(m, normal);
        Eigen::LevenbergMarquardt<AybeFunctor> lm(f);
        lm.setXtol(1e-15);
        lm.setFtol(1e-15);
        lm.setGtol(0.0);
        lm.setMaxfev(4000);
        lm.minimize(x);
        const Arr r = skew_part(x, m);
        const double res = std::max(constant_aybe_tensor(r).max_abs(), skew_defect(r));
        if (res <= accept && r.max_abs() > 1e-6) return {r, res, attempt};
    }
    throw NumericHazard("constant AYBE oracle found no solution within the restart budget");
}

}  // namespace yb
