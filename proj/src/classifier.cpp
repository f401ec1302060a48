#include "yb/classifier.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace yb {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_inf(cx z) { return std::isnan(z.real()); }
cx inf_point() { return {std::numeric_limits<double>::quiet_NaN(), 0.0}; }

using Poly = std::vector<cx>;  // increasing degree

Poly pmul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, cx{});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

Poly ppow(const Poly& a, int e) {
    Poly r{cx{1.0}};
    for (int i = 0; i < e; ++i) r = pmul(r, a);
    return r;
}

cx peval(const Poly& p, cx x) {
    cx r{};
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
    return r;
}

Poly pderiv(const Poly& p) {
    if (p.size() <= 1) return {cx{}};
    Poly r(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = p[i] * static_cast<double>(i);
    return r;
}

Poly as_poly(const Quartic& q) { return Poly(q.k.begin(), q.k.end()); }

// homogeneous coordinates of a point of P^1
Eigen::Vector2cd hom(cx z) {
    if (is_inf(z)) return {cx{1.0}, cx{}};
    return {z, cx{1.0}};
}

Mobius from_columns(const Eigen::Vector2cd& c0, const Eigen::Vector2cd& c1) {
    // t -> (c0 t + c1), i.e. [1:0] -> c0, [0:1] -> c1
    return {c0(0), c1(0), c0(1), c1(1)};
}

// infinity -> e1, 0 -> e2, 1 -> e3
Mobius three_point(cx e1, cx e2, cx e3) {
    Eigen::Matrix2cd m;
    m.col(0) = hom(e1);
    m.col(1) = hom(e2);
    Eigen::Vector2cd lam = m.fullPivLu().solve(hom(e3));
    return from_columns(lam(0) * hom(e1), lam(1) * hom(e2));
}

// infinity -> e1, 0 -> e2
Mobius two_point(cx e1, cx e2) { return from_columns(hom(e1), hom(e2)); }

// infinity -> e
Mobius one_point(cx e) {
    if (is_inf(e)) return {};
    return from_columns(hom(e), Eigen::Vector2cd(cx{1.0}, cx{}));
}

cx newton_root(const Poly& p, cx x0) {
    Poly dp = pderiv(p);
    cx x = x0;
    for (int it = 0; it < 60; ++it) {
        cx d = peval(dp, x);
        if (std::abs(d) == 0.0) break;
        cx step = peval(p, x) / d;
        x -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

std::string cfmt(cx z) {
    std::ostringstream os;
    os.precision(12);
    if (z.imag() == 0.0)
        os << z.real();
    else
        os << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i)";
    return os.str();
}

struct Clusters {
    std::vector<std::vector<int>> groups;
};

Clusters cluster(const std::vector<cx>& pts, double thr) {
    int n = static_cast<int>(pts.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(pts[i] - pts[j]) < thr) parent[find(i)] = find(j);
    std::map<int, std::vector<int>> g;
    for (int i = 0; i < n; ++i) g[find(i)].push_back(i);
    Clusters c;
    for (auto& [_, v] : g) c.groups.push_back(v);
    std::sort(c.groups.begin(), c.groups.end(),
              [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return c;
}

double coeff_mismatch(const Quartic& a, const Quartic& b) {
    double s = std::max(a.norm(), b.norm());
    double d = 0.0;
    for (int i = 0; i < 5; ++i) d = std::max(d, std::abs(a.k[i] - b.k[i]));
    return s > 0 ? d / s : d;
}

Quartic form_quartic(const std::string& form, cx sigma) {
    Quartic q;
    if (form == "1") q.k[0] = 1.0;
    else if (form == "x") q.k[1] = 1.0;
    else if (form == "x^2") q.k[2] = 1.0;
    else if (form == "x(x-1)") { q.k[1] = -1.0; q.k[2] = 1.0; }
    else { q.k[1] = sigma; q.k[2] = -(1.0 + sigma); q.k[3] = 1.0; }
    return q;
}

cx leading_scale(const Quartic& p, const std::string& form) {
    if (form == "1") return p.k[0];
    if (form == "x") return p.k[1];
    if (form == "x^2") return p.k[2];
    if (form == "x(x-1)") return p.k[2];
    return p.k[3];
}

}  // namespace

// ---- Quartic ----------------------------------------------------------------------

cx Quartic::operator()(cx x) const { return peval(as_poly(*this), x); }

cx Quartic::derivative(cx x, int order) const {
    Poly p = as_poly(*this);
    for (int i = 0; i < order; ++i) p = pderiv(p);
    return peval(p, x);
}

double Quartic::norm() const {
    double s = 0.0;
    for (auto c : k) s = std::max(s, std::abs(c));
    return s;
}

std::string Quartic::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < 5; ++i) {
        if (k[i] == cx{}) continue;
        if (!first) os << " + ";
        first = false;
        os << cfmt(k[i]);
        if (i >= 1) os << "*x";
        if (i >= 2) os << "^" << i;
    }
    return first ? "0" : os.str();
}

Invariants invariants(const Quartic& p) {
    auto [k0, k1, k2, k3, k4] = p.k;
    cx I1 = k2 * k2 - 3.0 * k1 * k3 + 12.0 * k0 * k4;
    cx I2 = 2.0 * k2 * k2 * k2 - 9.0 * k1 * k2 * k3 + 27.0 * k0 * k3 * k3 + 27.0 * k1 * k1 * k4 -
            72.0 * k0 * k2 * k4;
    return {I1, I2};
}

std::pair<cx, cx> lambdas(cx I1, cx I2) { return {-I1 / 6.0, I2 / 108.0}; }

Mobius Mobius::then(const Mobius& o) const {
    return {o.a * a + o.b * c, o.a * b + o.b * d, o.c * a + o.d * c, o.c * b + o.d * d};
}

Quartic mobius_transform_quartic(const Quartic& p, const Mobius& m) {
    if (std::abs(m.det()) <= 1e-300) throw ClassifierError("singular Mobius map");
    Poly num{m.b, m.a}, den{m.d, m.c};
    Poly acc(5, cx{});
    for (int i = 0; i < 5; ++i) {
        if (p.k[i] == cx{}) continue;
        Poly t = pmul(ppow(num, i), ppow(den, 4 - i));
        for (std::size_t j = 0; j < t.size() && j < 5; ++j) acc[j] += p.k[i] * t[j];
    }
    Quartic r;
    for (int i = 0; i < 5; ++i) r.k[i] = acc[i];
    return r;
}

Quartic pullback(const Quartic& p, const std::function<cx(cx)>& phi,
                 const std::function<cx(cx)>& dphi) {
    auto val = [&](cx t) {
        cx d = dphi(t);
        return p(phi(t)) / (d * d);
    };
    // fit on five points of a circle, check on four others
    Eigen::Matrix<cx, 5, 5> V;
    Eigen::Matrix<cx, 5, 1> rhs;
    for (int i = 0; i < 5; ++i) {
        cx t = 0.9 * std::polar(1.0, 2 * kPi * i / 5 + 0.3);
        cx pw{1.0};
        for (int j = 0; j < 5; ++j) V(i, j) = pw, pw *= t;
        rhs(i) = val(t);
    }
    Eigen::Matrix<cx, 5, 1> c = V.fullPivLu().solve(rhs);
    Quartic q;
    for (int i = 0; i < 5; ++i) q.k[i] = c(i);
    double s = std::max(1.0, q.norm());
    for (int i = 0; i < 4; ++i) {
        cx t = 1.3 * std::polar(1.0, 2 * kPi * i / 4 + 0.1);
        if (std::abs(q(t) - val(t)) > 1e-9 * s * std::pow(1.3, 4))
            throw ClassifierError("pullback is not a polynomial of degree <= 4");
    }
    for (auto& z : q.k)
        if (std::abs(z) < 1e-13 * s) z = cx{};
    return q;
}

cx reduce_trig(cx t) { return -(2.0 * t - 1.0) * (2.0 * t - 1.0) / (8.0 * t); }
cx reduce_trig_d(cx t) { return (1.0 - 4.0 * t * t) / (8.0 * t * t); }
cx reduce_rat(cx t) { return t * t / 4.0; }
cx reduce_rat_d(cx t) { return t / 2.0; }

std::string to_string(CanonicalType t) {
    switch (t) {
        case CanonicalType::Rational: return "Rational";
        case CanonicalType::Trigonometric: return "Trigonometric";
        case CanonicalType::Elliptic: return "Elliptic";
    }
    return "?";
}

std::array<cx, 6> anharmonic_orbit(cx s) {
    return {s, 1.0 / s, 1.0 - s, 1.0 / (1.0 - s), s / (s - 1.0), (s - 1.0) / s};
}

cx anharmonic_representative(cx s) {
    auto orb = anharmonic_orbit(s);
    cx best = orb[0];
    for (cx z : orb) {
        double da = std::abs(z) - std::abs(best);
        if (da < -1e-12 || (std::abs(da) <= 1e-12 && std::arg(z) < std::arg(best) - 1e-12)) best = z;
    }
    return best;
}

CanonicalForm canonical_type(const Quartic& p_in, const Tolerances& tol) {
    double s = p_in.norm();
    if (s == 0.0) throw ClassifierError("zero quartic");
    Quartic p = p_in;
    for (auto& z : p.k) z /= s;

    CanonicalForm out;
    auto [I1, I2] = invariants(p);
    double a1 = std::abs(I1), a2 = std::abs(I2);
    if (a1 < tol.degenerate && a2 < tol.degenerate) {
        out.type = CanonicalType::Rational;
    } else {
        double gap = std::abs(4.0 * I1 * I1 * I1 - I2 * I2) / (4.0 * a1 * a1 * a1 + a2 * a2);
        if (gap < tol.degenerate) out.type = CanonicalType::Trigonometric;
        else if (gap > tol.generic) out.type = CanonicalType::Elliptic;
        else
            throw ClassifierError("ambiguous root structure: discriminant ratio " + std::to_string(gap));
    }

    // move a regular point to infinity: Ph(t) = t^4 P(c + 1/t)
    const cx probes[] = {{0.0}, {1.0}, {-1.0}, {0.0, 1.0}, {0.0, -1.0}, {2.0}, {0.5, 0.3}, {-0.7, 0.4}};
    cx c0 = probes[0];
    for (cx z : probes)
        if (std::abs(p(z)) / std::pow(1 + std::abs(z), 4) > std::abs(p(c0)) / std::pow(1 + std::abs(c0), 4)) c0 = z;
    Quartic ph = mobius_transform_quartic(p, {c0, 1.0, 1.0, 0.0});
    Eigen::Matrix<cx, 5, 1> coeffs;
    for (int i = 0; i < 5; ++i) coeffs(i) = ph.k[i];
    Eigen::PolynomialSolver<cx, 4> solver(coeffs);
    std::vector<cx> ts(solver.roots().data(), solver.roots().data() + 4);

    double scale = 1.0;
    for (cx t : ts) scale = std::max(scale, std::abs(t));
    double thr = out.type == CanonicalType::Rational ? 1e-3 * scale
                 : out.type == CanonicalType::Trigonometric ? 1e-5 * scale
                                                            : 1e-6 * scale;
    Clusters cl = cluster(ts, thr);
    std::vector<int> mult;
    for (auto& g : cl.groups) mult.push_back(static_cast<int>(g.size()));
    bool ok = false;
    switch (out.type) {
        case CanonicalType::Rational: ok = mult == std::vector<int>{4} || mult == std::vector<int>{3, 1}; break;
        case CanonicalType::Trigonometric:
            ok = mult == std::vector<int>{2, 1, 1} || mult == std::vector<int>{2, 2};
            break;
        case CanonicalType::Elliptic: ok = mult == std::vector<int>{1, 1, 1, 1}; break;
    }
    if (!ok) throw ClassifierError("root clustering inconsistent with the invariants");

    Poly php = as_poly(ph);
    for (auto& g : cl.groups) {
        cx centre{};
        for (int i : g) centre += ts[i];
        centre /= static_cast<double>(g.size());
        Poly d = php;
        for (std::size_t i = 1; i < g.size(); ++i) d = pderiv(d);
        cx t = newton_root(d, centre);
        cx x = std::abs(t) < 1e-9 * scale ? inf_point() : c0 + 1.0 / t;
        out.roots.push_back({x, static_cast<int>(g.size())});
    }
    // deterministic order: by multiplicity, infinity first, then (re, im)
    std::sort(out.roots.begin(), out.roots.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        if (is_inf(a.first) != is_inf(b.first)) return is_inf(a.first);
        if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
        return a.first.imag() < b.first.imag();
    });

    const auto& R = out.roots;
    switch (out.type) {
        case CanonicalType::Rational:
            if (R.size() == 1) {
                out.form = "1";
                out.map = one_point(R[0].first);
            } else {
                out.form = "x";
                out.map = two_point(R[0].first, R[1].first);
            }
            out.reduced_form = "1";
            break;
        case CanonicalType::Trigonometric:
            if (R.size() == 2) {
                out.form = "x^2";
                out.map = two_point(R[0].first, R[1].first);
            } else {
                out.form = "x(x-1)";
                out.map = three_point(R[0].first, R[1].first, R[2].first);
            }
            out.reduced_form = "x^2";
            break;
        case CanonicalType::Elliptic: {
            out.form = "x(x-1)(x-s)";
            out.reduced_form = out.form;
            out.map = three_point(R[0].first, R[1].first, R[2].first);
            Mobius mu = out.map.inverse();
            cx e4 = R[3].first;
            out.sigma = is_inf(e4) ? mu.a / mu.c : mu(e4);
            out.sigma_class = anharmonic_representative(*out.sigma);
            break;
        }
    }

    cx det = out.map.det();
    Quartic pt = mobius_transform_quartic(p_in, out.map);
    for (auto& z : pt.k) z /= det * det;
    out.scale = leading_scale(pt, out.form);
    Quartic expect = form_quartic(out.form, out.sigma.value_or(cx{}));
    for (auto& z : expect.k) z *= out.scale;
    out.verification = coeff_mismatch(pt, expect);
    if (out.form == "x" || out.form == "x(x-1)") {
        Quartic red = out.form == "x" ? pullback(pt, reduce_rat, reduce_rat_d)
                                      : pullback(pt, reduce_trig, reduce_trig_d);
        Quartic rexp = form_quartic(out.reduced_form, {});
        for (auto& z : rexp.k) z *= out.scale;
        out.verification = std::max(out.verification, coeff_mismatch(red, rexp));
    }
    if (!(out.verification <= std::sqrt(tol.degenerate)))
        throw ClassifierError("canonical form check failed: mismatch " + std::to_string(out.verification));
    return out;
}

ClassificationRecord classify(const SeparableData& data, const Tolerances& tol) {
    Invariants ip = invariants(data.P), iq = invariants(data.Q);
    auto close = [&](cx a, cx b) {
        return std::abs(a - b) <= tol.invariant_match * std::max({1.0, std::abs(a), std::abs(b)});
    };
    if (!close(ip.I1, iq.I1) || !close(ip.I2, iq.I2)) {
        std::ostringstream os;
        os << "not a solution datum: invariants differ, I(P) = (" << cfmt(ip.I1) << ", " << cfmt(ip.I2)
           << "), I(Q) = (" << cfmt(iq.I1) << ", " << cfmt(iq.I2) << ")";
        throw ClassifierError(os.str());
    }
    ClassificationRecord rec;
    rec.inv = ip;
    std::tie(rec.lambda1, rec.lambda2) = lambdas(ip.I1, ip.I2);
    rec.p_form = canonical_type(data.P, tol);
    rec.q_form = canonical_type(data.Q, tol);
    if (rec.p_form.type != rec.q_form.type)
        throw ClassifierError("mixed canonical types: P is " + to_string(rec.p_form.type) + ", Q is " +
                              to_string(rec.q_form.type));
    rec.type = rec.p_form.type;
    rec.verdict = rec.type == CanonicalType::Rational        ? "sol1"
                  : rec.type == CanonicalType::Trigonometric ? "sol2"
                                                             : "sol3";
    return rec;
}

// ---- separable ansatz ---------------------------------------------------------------

namespace {

// sqrt(P) continued from the principal value at `from` along the segment to `to`;
// throws when the continuation disagrees with the principal value at `to`.
void check_branch(const Quartic& p, cx from, cx to, int steps = 64) {
    cx prev = std::sqrt(p(from));
    for (int i = 1; i <= steps; ++i) {
        cx z = from + (to - from) * (static_cast<double>(i) / steps);
        cx s = std::sqrt(p(z));
        if (std::abs(s - prev) > std::abs(s + prev)) throw PoleMarginError("sample path crosses a branch cut");
        prev = s;
    }
}

struct GaussLegendre {
    std::vector<double> x, w;
    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = z;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (z * p1 - p0) / (z * z - 1.0);
                double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

const GaussLegendre& gauss(int n) {
    static thread_local std::map<int, GaussLegendre> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, GaussLegendre(n)).first;
    return it->second;
}

template <class F>
cx segment_integral(F f, cx a, cx b, int n) {
    const auto& g = gauss(n);
    cx mid = 0.5 * (a + b), half = 0.5 * (b - a);
    cx acc{};
    for (int i = 0; i < n; ++i) acc += g.w[i] * f(mid + half * g.x[i]);
    return half * acc;
}

Quartic second_derivative(const Quartic& p) {
    Quartic d;
    d.k[0] = 2.0 * p.k[2];
    d.k[1] = 6.0 * p.k[3];
    d.k[2] = 12.0 * p.k[4];
    return d;
}

}  // namespace

ScalarField2 separable_f(const Quartic& p) {
    ScalarField2 f;
    f.name = "(U(u)+U(v))/(u-v), U^2 = " + p.to_string();
    f.f = [p](cx u, cx v) {
        check_branch(p, u, v);
        return (std::sqrt(p(u)) + std::sqrt(p(v))) / (u - v);
    };
    return f;
}

ZOdeResult z_ode_residual(const GridFunction& Z, cx l1, cx l2, double tolerance) {
    if (Z.h > 1e-3) throw ClassifierError("grid too coarse: spacing " + std::to_string(Z.h) + " > 1e-3");
    int n = static_cast<int>(Z.z.size());
    if (n < 9) throw ClassifierError("grid too short for centred differences");
    const auto& z = Z.z;
    auto res = [&](int i, int s) {
        double h = Z.h * s;
        double d1 = (-z[i + 2 * s] + 8 * z[i + s] - 8 * z[i - s] + z[i - 2 * s]) / (12 * h);
        double d2 = (-z[i + 2 * s] + 16 * z[i + s] - 30 * z[i] + 16 * z[i - s] - z[i - 2 * s]) / (12 * h * h);
        return cx{d2 * d2} - 2.0 * d1 * d1 * d1 - l1 * d1 - l2;
    };
    ZOdeResult out;
    for (int i = 4; i < n - 4; ++i) {
        cx r1 = res(i, 1), r2 = res(i, 2);
        out.residual = std::max(out.residual, std::abs(r1));
        out.truncation_estimate = std::max(out.truncation_estimate, std::abs(r2 - r1) / 15.0);
    }
    if (out.truncation_estimate > tolerance)
        throw ClassifierError("grid too coarse: truncation estimate " + std::to_string(out.truncation_estimate) +
                              " exceeds tolerance");
    return out;
}

GridFunction integrate_z(double l1, double l2, double w0, int sign, double t0, double h, int n) {
    double disc = 2 * w0 * w0 * w0 + l1 * w0 + l2;
    if (disc < 0) throw ClassifierError("inconsistent initial data: Z''(t0)^2 would be negative");
    std::array<double, 3> s{0.0, w0, sign * std::sqrt(disc)};
    auto f = [&](const std::array<double, 3>& y) {
        return std::array<double, 3>{y[1], y[2], 3 * y[1] * y[1] + l1 / 2};
    };
    auto axpy = [](const std::array<double, 3>& y, double a, const std::array<double, 3>& k) {
        return std::array<double, 3>{y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2]};
    };
    GridFunction g;
    g.t0 = t0;
    g.h = h;
    g.z.reserve(n);
    for (int i = 0; i < n; ++i) {
        g.z.push_back(s[0]);
        auto k1 = f(s), k2 = f(axpy(s, h / 2, k1)), k3 = f(axpy(s, h / 2, k2)), k4 = f(axpy(s, h, k3));
        for (int j = 0; j < 3; ++j) s[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    }
    return g;
}

cx SeparableH::operator()(cx u, cx x) const {
    check_branch(P, u0, u);
    check_branch(Q, x0, x);
    Quartic P2 = second_derivative(P), Q2 = second_derivative(Q);
    const Quartic &p = P, &q = Q;
    cx A1 = segment_integral([&](cx t) { return -P2(t) / (12.0 * std::sqrt(p(t))); }, u0, u, nodes);
    cx B1 = segment_integral([&](cx t) { return 1.0 / std::sqrt(p(t)); }, u0, u, nodes);
    cx A2 = segment_integral([&](cx t) { return -Q2(t) / (12.0 * std::sqrt(q(t))); }, x0, x, nodes);
    cx B2 = segment_integral([&](cx t) { return 1.0 / std::sqrt(q(t)); }, x0, x, nodes);
    cx s = B1 - B2;

    auto [I1, I2] = invariants(P);
    auto [l1, l2] = lambdas(I1, I2);
    using S = std::array<cx, 3>;
    S y{cx{}, w0, static_cast<double>(sign) * std::sqrt(2.0 * w0 * w0 * w0 + l1 * w0 + l2)};
    cx h = s / static_cast<double>(steps);
    auto f = [&](const S& v) { return S{v[1], v[2], 3.0 * v[1] * v[1] + l1 / 2.0}; };
    auto axpy = [](const S& v, cx a, const S& k) { return S{v[0] + a * k[0], v[1] + a * k[1], v[2] + a * k[2]}; };
    for (int i = 0; i < steps; ++i) {
        S k1 = f(y), k2 = f(axpy(y, h / 2.0, k1)), k3 = f(axpy(y, h / 2.0, k2)), k4 = f(axpy(y, h, k3));
        for (int j = 0; j < 3; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return A1 - A2 + y[0];
}

CoefficientFunction separable_solution(const Quartic& P, const Quartic& Q, std::function<cx(cx, cx)> h,
                                       std::vector<PoleLocus> h_poles) {
    ScalarField2 f = separable_f(P), g = separable_f(Q);
    std::vector<PoleLocus> poles{diff_pole("u=v", 0, 1), diff_pole("x=y", 2, 3)};
    for (auto& pl : h_poles) poles.push_back(pl);
    return scalar4(
        "f(u,v) - g(x,y) + h(u,x) - h(v,y)",
        [f, g, h](cx u, cx v, cx x, cx y) { return f.f(u, v) - g.f(x, y) + h(u, x) - h(v, y); }, poles);
}

SampleResidual verify_separable_solution(const Quartic& P, const Quartic& Q, std::function<cx(cx, cx)> h,
                                         const Six& s, double margin) {
    return aybe4_residual(separable_solution(P, Q, std::move(h)), s, margin);
}

}  // namespace yb
