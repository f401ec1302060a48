#pragma once

#include <functional>
#include <string>
#include <vector>

#include "yb/tensor.hpp"

namespace yb {

// Six spectral values in the order u, v, w, x, y, z.
struct Six {
    cx u, v, w, x, y, z;
    static Six from(const Assignment& a);
};

const std::vector<Tag>& six_tags();
const std::vector<Tag>& three_tags();

// ---- four-parameter AYBE and unitarity ---------------------------------------
// r12(u,v,x,y) r23(u,w,y,z) - r13(u,w,x,z) r12(w,v,x,y) - r23(v,w,y,z) r13(u,v,x,z)
// as an m^6 array indexed (i,j,k | p,q,s) = row (i,j,k), column (p,q,s).
SampleResidual aybe4_residual(const CoefficientFunction& r, const Six& s, double margin,
                              Arr* out = nullptr);
// r^{jm}_{ik}(u,v,x,y) + r^{mj}_{ki}(v,u,y,x)
SampleResidual unitarity_residual(const CoefficientFunction& r, cx u, cx v, cx x, cx y,
                                  double margin);

// ---- constant AYBE -------------------------------------------------------------
Arr constant_aybe_tensor(const Arr& r);  // index form, free (l,m,n,a,b,t)
ResidualReport constant_aybe_residual(const Arr& r, double tolerance = 1e-12);
double skew_defect(const Arr& r);  // max |r^{se}_{ab} + r^{es}_{ba}|

// ---- CYBE as a difference of AYBEs ---------------------------------------------
struct CybeResult {
    Arr a, a_star, bracket;  // bracket = a - a_star
    Arr commutators;         // three-commutator sum built from explicit embeddings
    double mismatch = 0.0;   // max |bracket - commutators|
};
CybeResult cybe_bracket(const Arr& r);
CybeResult cybe_bracket(const CoefficientFunction& r, const Six& s, double margin);
// conjugate an (i,j,k|p,q,s) operator by P13
Arr conjugate13(const Arr& t);

// ---- Theorem 1 -----------------------------------------------------------------
struct Theorem1Sample {
    SampleResidual r_aybe, cross, beta_six, skew_r, skew_beta;
};
Theorem1Sample theorem1_residuals(const CoefficientFunction& r, const CoefficientFunction& beta,
                                  const Six& s, double margin);
// m = 1: beta(w,u,z,y) - beta(w,u,z,x) + beta(v,w,y,z) - beta(v,w,x,z)
SampleResidual theorem1_reduced_beta(const CoefficientFunction& beta, const Six& s, double margin);

// ---- six-term relation ---------------------------------------------------------
SampleResidual sixterm_residual(const CoefficientFunction& alpha, cx u, cx v, cx w, double margin,
                                Arr* out = nullptr);

// ---- equivalence transformations ----------------------------------------------
struct UnivariateMap {
    std::string name = "id";
    std::function<cx(cx)> f = [](cx z) { return z; };
    std::function<double(cx)> pole_distance;  // empty: entire
};
UnivariateMap mobius_map(cx a, cx b, cx c, cx d);

struct ScalarField2 {
    std::string name = "1";
    std::function<cx(cx, cx)> f = [](cx, cx) { return cx{1.0}; };
};

// r -> r(phi u, phi v, psi x, psi y) q(u,y) q(v,x) / (q(u,x) q(v,y))
CoefficientFunction equiv_transform(const CoefficientFunction& r, const ScalarField2& q,
                                    const UnivariateMap& phi = {}, const UnivariateMap& psi = {});

// ---- Rota-Baxter machinery -----------------------------------------------------
using Vec = std::vector<cx>;

struct AssocAlgebra {
    std::string name;
    int dim = 0;
    std::function<Vec(const Vec&, const Vec&)> mul;
    Vec unit;
};

AssocAlgebra matrix_algebra(int m);                      // row-major, x[n*m+k] = x^n_k
AssocAlgebra structure_algebra(const Arr& c);            // (xy)^k = c[k,i,j] x^i y^j
Arr matrix_structure_constants(int m);                   // Mat_m as an m^2-dim algebra
Arr diagonal_structure_constants(int m);                 // C^m

// Truncated Laurent polynomials with n x n matrix coefficients, degrees lo..hi.
struct LaurentWindow {
    int n = 2, lo = -3, hi = 3;
    int dim() const { return n * n * (hi - lo + 1); }
    AssocAlgebra algebra() const;  // throws NumericHazard on overflow
    int degree_of(int component) const { return lo + component / (n * n); }
};

struct LinearOperatorOnA {
    std::string name;
    int arity = 2;
    std::function<Vec(const cx* params, const Vec&)> apply;
    std::vector<PoleLocus> poles;
};

// identity on degrees >= 0, minus identity below
LinearOperatorOnA sts_operator(const LaurentWindow& w);
// r(u,v)(x)^p_q = r^{kp}_{nq}(u,v) x^n_k ;  bar: r^{pk}_{nq}
LinearOperatorOnA matrix_operator(const CoefficientFunction& r, bool bar = false, double margin = 0.0);
LinearOperatorOnA constant_operator(std::string name, const Arr& matrix);  // dim x dim, rank-2 Arr
LinearOperatorOnA operator_sum(const LinearOperatorOnA& a, const LinearOperatorOnA& b);
LinearOperatorOnA pole_identity(int dim);  // id / (u - v)

// (r(u,w)x)(r(u,v)y) - r(u,v)((r(v,w)x)y) - r(u,w)(x(r(w,v)y)) - lambda x y
Vec rota_baxter_residual(const LinearOperatorOnA& r, const AssocAlgebra& alg, cx lambda, cx u,
                         cx v, cx w, const Vec& x, const Vec& y, double* term_scale = nullptr);
Vec circ_product(const LinearOperatorOnA& r, const AssocAlgebra& alg, const cx* params,
                 const Vec& x, const Vec& y);
Vec associativity_residual(const LinearOperatorOnA& r, const AssocAlgebra& alg,
                           const cx* params, const Vec& x, const Vec& y, const Vec& z,
                           double* term_scale = nullptr);
double max_abs(const Vec& v);

// index form of the parameter Rota-Baxter equation on Mat_m, plus the skew check
struct MatrixRbSample {
    SampleResidual index, skew;
};
MatrixRbSample matrix_rb_index_residual(const CoefficientFunction& r, cx u, cx v, cx w,
                                        double margin);

// ---- phi / psi compatibility (m = 1) -------------------------------------------
struct PhiPsiSample {
    SampleResidual quadratic, cubic;
};
PhiPsiSample phi_psi_residuals(const CoefficientFunction& r, const ScalarField2& phi,
                               const ScalarField2& psi, const Six& s, double margin);

}  // namespace yb
