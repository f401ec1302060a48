#include "yb/residuals.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace yb {

Six Six::from(const Assignment& a) {
    return {a.at("u"), a.at("v"), a.at("w"), a.at("x"), a.at("y"), a.at("z")};
}

const std::vector<Tag>& six_tags() {
    static const std::vector<Tag> t{"u", "v", "w", "x", "y", "z"};
    return t;
}

const std::vector<Tag>& three_tags() {
    static const std::vector<Tag> t{"u", "v", "w"};
    return t;
}

namespace {

Arr at4(const CoefficientFunction& r, cx a, cx b, cx c, cx d, double margin) {
    const cx args[4] = {a, b, c, d};
    return r.eval(args, margin);
}

Arr at2(const CoefficientFunction& r, cx a, cx b, double margin) {
    const cx args[2] = {a, b};
    return r.eval(args, margin);
}

using Mat = Eigen::MatrixXcd;

// r acting in slots (a, b) of C^m (x) C^m (x) C^m
Mat embed(const Arr& r, int a, int b) {
    const int m = r.m();
    const int n = m * m * m;
    Mat out = Mat::Zero(n, n);
    const int c = 3 - a - b;
    int row[3], col[3];
    for (int R = 0; R < n; ++R) {
        row[0] = R / (m * m), row[1] = (R / m) % m, row[2] = R % m;
        for (int C = 0; C < n; ++C) {
            col[0] = C / (m * m), col[1] = (C / m) % m, col[2] = C % m;
            if (row[c] != col[c]) continue;
            out(R, C) = r(row[a], row[b], col[a], col[b]);
        }
    }
    return out;
}

Arr from_mat(const Mat& M, int m) {
    Arr out(m, 6);
    const int n = m * m * m;
    for (int R = 0; R < n; ++R)
        for (int C = 0; C < n; ++C) out[static_cast<std::size_t>(R) * n + C] = M(R, C);
    return out;
}

}  // namespace

SampleResidual aybe4_residual(const CoefficientFunction& r, const Six& s, double margin, Arr* out) {
    const Arr t1 = einsum("ijpt,tkqs->ijkpqs", at4(r, s.u, s.v, s.x, s.y, margin),
                          at4(r, s.u, s.w, s.y, s.z, margin));
    const Arr t2 = einsum("ikts,tjpq->ijkpqs", at4(r, s.u, s.w, s.x, s.z, margin),
                          at4(r, s.w, s.v, s.x, s.y, margin));
    const Arr t3 = einsum("jkqt,itps->ijkpqs", at4(r, s.v, s.w, s.y, s.z, margin),
                          at4(r, s.u, s.v, s.x, s.z, margin));
    ResidualAccumulator acc;
    acc.add(t1);
    acc.add(t2, -1.0);
    acc.add(t3, -1.0);
    if (out) *out = acc.total();
    return acc.result();
}

SampleResidual unitarity_residual(const CoefficientFunction& r, cx u, cx v, cx x, cx y,
                                  double margin) {
    ResidualAccumulator acc;
    acc.add(at4(r, u, v, x, y, margin));
    acc.add(at4(r, v, u, y, x, margin).transposed({1, 0, 3, 2}));
    return acc.result();
}

Arr constant_aybe_tensor(const Arr& r) {
    return einsum("lsab,mnst->lmnabt", r, r) + einsum("msbt,nlsa->lmnabt", r, r) +
           einsum("nsta,lmsb->lmnabt", r, r);
}

double skew_defect(const Arr& r) { return (r + r.transposed({1, 0, 3, 2})).max_abs(); }

ResidualReport constant_aybe_residual(const Arr& r, double tolerance) {
    ResidualAccumulator acc;
    acc.add(einsum("lsab,mnst->lmnabt", r, r));
    acc.add(einsum("msbt,nlsa->lmnabt", r, r));
    acc.add(einsum("nsta,lmsb->lmnabt", r, r));
    SampleResidual res = acc.result();
    res.abs = std::max(res.abs, skew_defect(r));
    ResidualReport rep = single_report("constant_aybe", res, tolerance);
    return rep;
}

Arr conjugate13(const Arr& t) { return t.transposed({2, 1, 0, 5, 4, 3}); }

CybeResult cybe_bracket(const Arr& r) {
    CybeResult c;
    c.a = einsum("ijpt,tkqs->ijkpqs", r, r) - einsum("ikts,tjpq->ijkpqs", r, r) -
          einsum("jkqt,itps->ijkpqs", r, r);
    c.a_star = einsum("jkts,itpq->ijkpqs", r, r) - einsum("ikpt,jtqs->ijkpqs", r, r) -
               einsum("ijtq,tkps->ijkpqs", r, r);
    c.bracket = c.a - c.a_star;
    const Mat r12 = embed(r, 0, 1), r13 = embed(r, 0, 2), r23 = embed(r, 1, 2);
    const Mat comm = (r12 * r13 - r13 * r12) + (r12 * r23 - r23 * r12) + (r13 * r23 - r23 * r13);
    c.commutators = from_mat(comm, r.m());
    c.mismatch = (c.bracket - c.commutators).max_abs();
    return c;
}

CybeResult cybe_bracket(const CoefficientFunction& r, const Six& s, double margin) {
    const Arr uvxy = at4(r, s.u, s.v, s.x, s.y, margin), uwyz = at4(r, s.u, s.w, s.y, s.z, margin),
              uwxz = at4(r, s.u, s.w, s.x, s.z, margin), wvxy = at4(r, s.w, s.v, s.x, s.y, margin),
              vwyz = at4(r, s.v, s.w, s.y, s.z, margin), uvxz = at4(r, s.u, s.v, s.x, s.z, margin),
              uwxy = at4(r, s.u, s.w, s.x, s.y, margin), vuyz = at4(r, s.v, s.u, s.y, s.z, margin),
              vwxz = at4(r, s.v, s.w, s.x, s.z, margin);
    CybeResult c;
    c.a = einsum("ijpt,tkqs->ijkpqs", uvxy, uwyz) - einsum("ikts,tjpq->ijkpqs", uwxz, wvxy) -
          einsum("jkqt,itps->ijkpqs", vwyz, uvxz);
    c.a_star = einsum("jkts,itpq->ijkpqs", vwyz, uwxy) - einsum("ikpt,jtqs->ijkpqs", uwxz, vuyz) -
               einsum("ijtq,tkps->ijkpqs", uvxy, vwxz);
    c.bracket = c.a - c.a_star;
    const Mat comm = (embed(uvxy, 0, 1) * embed(uwyz, 1, 2) - embed(vwyz, 1, 2) * embed(uwxy, 0, 1)) +
                     (embed(uvxy, 0, 1) * embed(vwxz, 0, 2) - embed(uwxz, 0, 2) * embed(wvxy, 0, 1)) +
                     (embed(uwxz, 0, 2) * embed(vuyz, 1, 2) - embed(vwyz, 1, 2) * embed(uvxz, 0, 2));
    c.commutators = from_mat(comm, r.m);
    c.mismatch = (c.bracket - c.commutators).max_abs();
    return c;
}

Theorem1Sample theorem1_residuals(const CoefficientFunction& r, const CoefficientFunction& b,
                                  const Six& s, double margin) {
    const cx u = s.u, v = s.v, w = s.w, x = s.x, y = s.y, z = s.z;
    auto R = [&](cx a, cx bb, cx c, cx d) { return at4(r, a, bb, c, d, margin); };
    auto B = [&](cx a, cx bb, cx c, cx d) { return at4(b, a, bb, c, d, margin); };
    Theorem1Sample t;
    {
        ResidualAccumulator acc;
        acc.add(einsum("tqki,rsjt->ijkqrs", R(w, u, z, x), R(v, w, y, x)));
        acc.add(einsum("trij,sqkt->ijkqrs", R(u, v, x, y), R(w, u, z, y)));
        acc.add(einsum("tsjk,qrit->ijkqrs", R(v, w, y, z), R(u, v, x, z)));
        t.r_aybe = acc.result();
    }
    {
        ResidualAccumulator acc;
        acc.add(einsum("tqij,rskt->ijkqrs", R(u, v, x, y), B(w, u, z, y)));
        acc.add(einsum("tsji,rqkt->ijkqrs", R(v, u, y, x), B(w, v, z, x)), -1.0);
        acc.add(einsum("trjk,sqit->ijkqrs", B(v, w, y, z), R(u, v, x, y)));
        acc.add(einsum("trik,qsjt->ijkqrs", B(u, w, x, z), R(v, u, y, x)), -1.0);
        t.cross = acc.result();
    }
    {
        // parameter slots made pair-consistent: (u,x), (v,y), (w,z) travel together
        ResidualAccumulator acc;
        acc.add(einsum("tqjk,rsit->ijkqrs", B(v, w, y, z), B(u, v, x, y)));
        acc.add(einsum("trji,qskt->ijkqrs", B(v, u, y, x), B(w, v, z, y)), -1.0);
        acc.add(einsum("trki,sqjt->ijkqrs", B(w, u, z, x), B(v, w, y, z)));
        acc.add(einsum("tskj,rqit->ijkqrs", B(w, v, z, y), B(u, w, x, z)), -1.0);
        acc.add(einsum("tsij,qrkt->ijkqrs", B(u, v, x, y), B(w, u, z, x)));
        acc.add(einsum("tqik,srjt->ijkqrs", B(u, w, x, z), B(v, u, y, x)), -1.0);
        t.beta_six = acc.result();
    }
    {
        ResidualAccumulator acc;
        acc.add(R(u, v, x, y));
        acc.add(R(v, u, y, x).transposed({1, 0, 3, 2}));
        t.skew_r = acc.result();
    }
    {
        ResidualAccumulator acc;
        acc.add(B(u, v, x, y));
        acc.add(B(v, u, y, x).transposed({1, 0, 3, 2}));
        t.skew_beta = acc.result();
    }
    return t;
}

SampleResidual theorem1_reduced_beta(const CoefficientFunction& b, const Six& s, double margin) {
    if (b.m != 1) throw std::invalid_argument("reduced beta condition is for m = 1");
    ResidualAccumulator acc;
    acc.add(at4(b, s.w, s.u, s.z, s.y, margin)[0]);
    acc.add(at4(b, s.w, s.u, s.z, s.x, margin)[0], -1.0);
    acc.add(at4(b, s.v, s.w, s.y, s.z, margin)[0]);
    acc.add(at4(b, s.v, s.w, s.x, s.z, margin)[0], -1.0);
    return acc.result();
}

SampleResidual sixterm_residual(const CoefficientFunction& a, cx u, cx v, cx w, double margin,
                                Arr* out) {
    auto A = [&](cx p, cx q) { return at2(a, p, q, margin); };
    ResidualAccumulator acc;
    acc.add(einsum("tlij,rskt->ijklrs", A(u, v), A(w, u)));
    acc.add(einsum("trjk,slit->ijklrs", A(v, w), A(u, v)));
    acc.add(einsum("tski,lrjt->ijklrs", A(w, u), A(v, w)));
    acc.add(einsum("tsji,rlkt->ijklrs", A(v, u), A(w, v)), -1.0);
    acc.add(einsum("tlkj,srit->ijklrs", A(w, v), A(u, w)), -1.0);
    acc.add(einsum("trik,lsjt->ijklrs", A(u, w), A(v, u)), -1.0);
    if (out) *out = acc.total();
    return acc.result();
}

UnivariateMap mobius_map(cx a, cx b, cx c, cx d) {
    if (std::abs(a * d - b * c) == 0.0) throw std::invalid_argument("singular Mobius map");
    UnivariateMap m;
    m.name = "mobius";
    m.f = [=](cx z) { return (a * z + b) / (c * z + d); };
    if (c != cx{}) m.pole_distance = [=](cx z) { return std::abs(z + d / c); };
    return m;
}

CoefficientFunction equiv_transform(const CoefficientFunction& r, const ScalarField2& q,
                                    const UnivariateMap& phi, const UnivariateMap& psi) {
    if (r.arity != 4) throw std::invalid_argument("equiv_transform needs a four-slot r");
    CoefficientFunction out = r;
    out.name = r.name + "~[" + q.name + "," + phi.name + "," + psi.name + "]";
    auto mapped = [phi, psi](const cx* a, cx* b) {
        b[0] = phi.f(a[0]);
        b[1] = phi.f(a[1]);
        b[2] = psi.f(a[2]);
        b[3] = psi.f(a[3]);
    };
    auto base = r.fn;
    auto qf = q.f;
    out.fn = [base, qf, mapped](const cx* a) {
        cx b[4];
        mapped(a, b);
        const cx factor = qf(a[0], a[3]) * qf(a[1], a[2]) / (qf(a[0], a[2]) * qf(a[1], a[3]));
        return base(b) * factor;
    };
    out.poles.clear();
    // maps' own poles come first so that mapped loci are never evaluated there
    if (phi.pole_distance)
        out.poles.push_back({phi.name + " pole", [phi](const cx* a) {
                                 return std::min(phi.pole_distance(a[0]), phi.pole_distance(a[1]));
                             }});
    if (psi.pole_distance)
        out.poles.push_back({psi.name + " pole", [psi](const cx* a) {
                                 return std::min(psi.pole_distance(a[2]), psi.pole_distance(a[3]));
                             }});
    for (const auto& p : r.poles) {
        auto d = p.distance;
        out.poles.push_back({p.what + " (mapped)", [d, mapped](const cx* a) {
                                 cx b[4];
                                 mapped(a, b);
                                 return d(b);
                             }});
    }
    out.poles.push_back({q.name + " zero", [qf](const cx* a) {
                             return std::min(std::abs(qf(a[0], a[2])), std::abs(qf(a[1], a[3])));
                         }});
    return out;
}

// ---- algebras and operators --------------------------------------------------------

double max_abs(const Vec& v) {
    double r = 0.0;
    for (const auto& x : v) r = std::max(r, std::abs(x));
    return r;
}

AssocAlgebra matrix_algebra(int m) {
    AssocAlgebra a;
    a.name = "Mat" + std::to_string(m);
    a.dim = m * m;
    a.mul = [m](const Vec& x, const Vec& y) {
        Vec z(m * m);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) {
                const cx xik = x[i * m + k];
                if (xik == cx{}) continue;
                for (int j = 0; j < m; ++j) z[i * m + j] += xik * y[k * m + j];
            }
        return z;
    };
    a.unit.assign(m * m, 0.0);
    for (int i = 0; i < m; ++i) a.unit[i * m + i] = 1.0;
    return a;
}

AssocAlgebra structure_algebra(const Arr& c) {
    const int m = c.m();
    AssocAlgebra a;
    a.name = "structure";
    a.dim = m;
    a.mul = [c, m](const Vec& x, const Vec& y) {
        Vec z(m);
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) z[k] += c(k, i, j) * x[i] * y[j];
        return z;
    };
    return a;
}

Arr matrix_structure_constants(int n) {
    // basis e_{ab} -> index a*n+b ; e_{ab} e_{cd} = delta_{bc} e_{ad}
    const int m = n * n;
    Arr c(m, 3);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int d = 0; d < n; ++d) c(a * n + d, a * n + b, b * n + d) = 1.0;
    return c;
}

Arr diagonal_structure_constants(int m) {
    Arr c(m, 3);
    for (int k = 0; k < m; ++k) c(k, k, k) = 1.0;
    return c;
}

AssocAlgebra LaurentWindow::algebra() const {
    AssocAlgebra a;
    a.name = "Laurent[" + std::to_string(lo) + "," + std::to_string(hi) + "]";
    a.dim = dim();
    const int n_ = n, lo_ = lo, hi_ = hi;
    a.mul = [n_, lo_, hi_](const Vec& x, const Vec& y) {
        const int nn = n_ * n_;
        const int span = hi_ - lo_ + 1;
        Vec z(nn * span);
        for (int p = 0; p < span; ++p) {
            bool xp = false;
            for (int e = 0; e < nn; ++e) xp = xp || x[p * nn + e] != cx{};
            if (!xp) continue;
            for (int q = 0; q < span; ++q) {
                bool yq = false;
                for (int e = 0; e < nn; ++e) yq = yq || y[q * nn + e] != cx{};
                if (!yq) continue;
                const int d = (p + lo_) + (q + lo_);
                if (d < lo_ || d > hi_)
                    throw NumericHazard("truncation overflow: product degree " + std::to_string(d) +
                                        " leaves window");
                const int r = d - lo_;
                for (int i = 0; i < n_; ++i)
                    for (int k = 0; k < n_; ++k)
                        for (int j = 0; j < n_; ++j)
                            z[r * nn + i * n_ + j] += x[p * nn + i * n_ + k] * y[q * nn + k * n_ + j];
            }
        }
        return z;
    };
    a.unit.assign(a.dim, 0.0);
    for (int i = 0; i < n; ++i) a.unit[(0 - lo) * n * n + i * n + i] = 1.0;
    return a;
}

LinearOperatorOnA sts_operator(const LaurentWindow& w) {
    LinearOperatorOnA op;
    op.name = "sts";
    op.arity = 2;
    op.apply = [w](const cx*, const Vec& x) {
        Vec y = x;
        for (int i = 0; i < w.dim(); ++i)
            if (w.degree_of(i) < 0) y[i] = -y[i];
        return y;
    };
    return op;
}

LinearOperatorOnA matrix_operator(const CoefficientFunction& r, bool bar, double margin) {
    if (r.arity != 2 || r.rank != 4) throw std::invalid_argument("matrix_operator needs r(u,v) on Mat_m");
    LinearOperatorOnA op;
    op.name = std::string(bar ? "rbar:" : "r:") + r.name;
    op.arity = 2;
    const int m = r.m;
    op.apply = [r, bar, m, margin](const cx* p, const Vec& x) {
        const Arr R = r.eval(p, margin);
        Vec y(m * m);
        for (int pp = 0; pp < m; ++pp)
            for (int q = 0; q < m; ++q)
                for (int n = 0; n < m; ++n)
                    for (int k = 0; k < m; ++k)
                        y[pp * m + q] += (bar ? R(pp, k, n, q) : R(k, pp, n, q)) * x[n * m + k];
        return y;
    };
    op.poles = r.poles;
    return op;
}

LinearOperatorOnA constant_operator(std::string name, const Arr& M) {
    LinearOperatorOnA op;
    op.name = std::move(name);
    op.arity = 2;
    const int d = M.m();
    op.apply = [M, d](const cx*, const Vec& x) {
        Vec y(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) y[i] += M(i, j) * x[j];
        return y;
    };
    return op;
}

LinearOperatorOnA operator_sum(const LinearOperatorOnA& a, const LinearOperatorOnA& b) {
    LinearOperatorOnA op;
    op.name = a.name + "+" + b.name;
    op.arity = a.arity;
    auto fa = a.apply, fb = b.apply;
    op.apply = [fa, fb](const cx* p, const Vec& x) {
        Vec y = fa(p, x);
        const Vec z = fb(p, x);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += z[i];
        return y;
    };
    op.poles = a.poles;
    op.poles.insert(op.poles.end(), b.poles.begin(), b.poles.end());
    return op;
}

LinearOperatorOnA pole_identity(int dim) {
    LinearOperatorOnA op;
    op.name = "id/(u-v)";
    op.arity = 2;
    op.apply = [dim](const cx* p, const Vec& x) {
        Vec y(dim);
        for (int i = 0; i < dim; ++i) y[i] = x[i] / (p[0] - p[1]);
        return y;
    };
    op.poles.push_back(diff_pole("u=v", 0, 1));
    return op;
}

namespace {

Vec apply_op(const LinearOperatorOnA& r, cx a, cx b, const Vec& x) {
    const cx p[2] = {a, b};
    return r.apply(p, x);
}

void axpy(Vec& y, cx s, const Vec& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

}  // namespace

Vec rota_baxter_residual(const LinearOperatorOnA& r, const AssocAlgebra& alg, cx lambda, cx u,
                         cx v, cx w, const Vec& x, const Vec& y, double* term_scale) {
    const Vec t1 = alg.mul(apply_op(r, u, w, x), apply_op(r, u, v, y));
    const Vec t2 = apply_op(r, u, v, alg.mul(apply_op(r, v, w, x), y));
    const Vec t3 = apply_op(r, u, w, alg.mul(x, apply_op(r, w, v, y)));
    const Vec t4 = alg.mul(x, y);
    Vec res = t1;
    axpy(res, -1.0, t2);
    axpy(res, -1.0, t3);
    axpy(res, -lambda, t4);
    if (term_scale)
        *term_scale = std::max({max_abs(t1), max_abs(t2), max_abs(t3), std::abs(lambda) * max_abs(t4)});
    return res;
}

Vec circ_product(const LinearOperatorOnA& r, const AssocAlgebra& alg, const cx* params,
                 const Vec& x, const Vec& y) {
    Vec a = alg.mul(r.apply(params, x), y);
    axpy(a, 1.0, alg.mul(x, r.apply(params, y)));
    return a;
}

Vec associativity_residual(const LinearOperatorOnA& r, const AssocAlgebra& alg, const cx* params,
                           const Vec& x, const Vec& y, const Vec& z, double* term_scale) {
    const Vec left = circ_product(r, alg, params, circ_product(r, alg, params, x, y), z);
    const Vec right = circ_product(r, alg, params, x, circ_product(r, alg, params, y, z));
    Vec res = left;
    axpy(res, -1.0, right);
    if (term_scale) *term_scale = std::max(max_abs(left), max_abs(right));
    return res;
}

MatrixRbSample matrix_rb_index_residual(const CoefficientFunction& r, cx u, cx v, cx w,
                                        double margin) {
    auto R = [&](cx a, cx b) { return at2(r, a, b, margin); };
    MatrixRbSample s;
    {
        ResidualAccumulator acc;
        acc.add(einsum("atbj,rgst->abjrgs", R(u, v), R(u, w)));
        acc.add(einsum("rtsb,agtj->abjrgs", R(v, w), R(u, v)), -1.0);
        acc.add(einsum("tgsj,arbt->abjrgs", R(u, w), R(w, v)), -1.0);
        s.index = acc.result();
    }
    {
        ResidualAccumulator acc;
        acc.add(R(u, v));
        acc.add(R(v, u).transposed({1, 0, 3, 2}));
        s.skew = acc.result();
    }
    return s;
}

PhiPsiSample phi_psi_residuals(const CoefficientFunction& r, const ScalarField2& phi,
                               const ScalarField2& psi, const Six& s, double margin) {
    if (r.m != 1) throw std::invalid_argument("phi/psi equations are scalar (m = 1)");
    auto R = [&](cx a, cx b, cx c, cx d) { return at4(r, a, b, c, d, margin)[0]; };
    auto PP = [&](cx a, cx b) { return psi.f(a, b) * psi.f(b, a); };
    const cx u = s.u, v = s.v, w = s.w, x = s.x, y = s.y, z = s.z;
    PhiPsiSample out;
    {
        ResidualAccumulator acc;
        acc.add(R(u, v, x, y) * R(u, v, y, x));
        acc.add(phi.f(x, y) * phi.f(y, x), -1.0);
        acc.add(PP(u, v));
        out.quadratic = acc.result();
    }
    {
        ResidualAccumulator acc;
        acc.add((PP(v, w) - PP(u, v)) * R(u, w, x, z));
        acc.add(R(u, v, x, y) * R(u, v, y, z) * R(v, w, x, z), -1.0);
        acc.add(R(u, v, x, z) * R(v, w, x, y) * R(v, w, y, z));
        out.cubic = acc.result();
    }
    for (auto* r : {&out.quadratic, &out.cubic})
        if (!std::isfinite(r->abs)) throw PoleMarginError("phi/psi evaluation hit a pole");
    return out;
}

}  // namespace yb
