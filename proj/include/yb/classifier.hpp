#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "yb/residuals.hpp"
#include "yb/tensor.hpp"

namespace yb {

struct ClassifierError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// P(x) = k0 + k1 x + ... + k4 x^4
struct Quartic {
    std::array<cx, 5> k{};
    cx operator()(cx x) const;
    cx derivative(cx x, int order = 1) const;
    double norm() const;  // max |k_i|
    std::string to_string() const;
};

struct Invariants {
    cx I1, I2;
};
Invariants invariants(const Quartic& p);
std::pair<cx, cx> lambdas(cx I1, cx I2);  // (-I1/6, I2/108)

// x -> (a x + b)/(c x + d)
struct Mobius {
    cx a{1.0}, b{}, c{}, d{1.0};
    cx det() const { return a * d - b * c; }
    cx operator()(cx x) const { return (a * x + b) / (c * x + d); }
    Mobius inverse() const { return {d, -b, -c, a}; }
    Mobius then(const Mobius& outer) const;  // outer o this
};

// (c x + d)^4 P((a x + b)/(c x + d))
Quartic mobius_transform_quartic(const Quartic& p, const Mobius& m);
// P(phi(t)) / phi'(t)^2, refitted as a quartic; throws ClassifierError if not polynomial
Quartic pullback(const Quartic& p, const std::function<cx(cx)>& phi,
                 const std::function<cx(cx)>& dphi);
// the two printed non-Moebius reductions
cx reduce_trig(cx t);   // -(2t-1)^2/(8t): x(x-1) -> t^2
cx reduce_trig_d(cx t);
cx reduce_rat(cx t);    // t^2/4: x -> 1
cx reduce_rat_d(cx t);

enum class CanonicalType { Rational, Trigonometric, Elliptic };
std::string to_string(CanonicalType t);

struct Tolerances {
    double degenerate = 1e-8;  // relative size below which an invariant combination counts as zero
    double generic = 1e-4;     // relative size above which it counts as nonzero
    double invariant_match = 1e-8;
};

struct CanonicalForm {
    CanonicalType type = CanonicalType::Rational;
    std::string form;          // "1", "x", "x^2", "x(x-1)", "x(x-1)(x-s)"
    std::string reduced_form;  // after the printed reductions: "1", "x^2", "x(x-1)(x-s)"
    Mobius map;                // x = map(t) brings P to c * form
    cx scale{1.0};             // the constant c
    std::vector<std::pair<cx, int>> roots;  // on P^1 (inf encoded as NaN), with multiplicities
    std::optional<cx> sigma;                // raw cross-ratio root
    std::optional<cx> sigma_class;          // anharmonic representative
    double verification = 0.0;              // max coefficient mismatch of the check
};

CanonicalForm canonical_type(const Quartic& p, const Tolerances& tol = {});

// the six values sigma, 1/sigma, 1-sigma, ... ; representative minimal by (|s|, arg s)
std::array<cx, 6> anharmonic_orbit(cx s);
cx anharmonic_representative(cx s);

struct SeparableData {
    Quartic P, Q;
};

struct ClassificationRecord {
    CanonicalType type = CanonicalType::Rational;
    Invariants inv;
    cx lambda1, lambda2;
    CanonicalForm p_form, q_form;
    std::string verdict;  // sol1 | sol2 | sol3
};

ClassificationRecord classify(const SeparableData& data, const Tolerances& tol = {});

// ---- separable ansatz ---------------------------------------------------------------------
// f(u,v) = (U(u)+U(v))/(u-v), U = sqrt(P) on the principal branch
ScalarField2 separable_f(const Quartic& p);

// Z'' ^2 = 2 Z'^3 + l1 Z' + l2 on a uniform grid, 4th order centred differences
struct GridFunction {
    double t0 = 0.0, h = 1e-3;
    std::vector<double> z;
};
struct ZOdeResult {
    double residual = 0.0;
    double truncation_estimate = 0.0;
};
ZOdeResult z_ode_residual(const GridFunction& Z, cx l1, cx l2, double tolerance = 1e-6);
// integrates W'' = 3W^2 + l1/2 (W = Z') from Z(t0)=0, W(t0)=w0, W'(t0)=sign*sqrt(2w0^3+l1 w0+l2)
GridFunction integrate_z(double l1, double l2, double w0, int sign, double t0, double h, int n);

// Lemma-3 style h(u,x) = A1(u) - A2(x) + Z(B1(u) - B2(x)) built numerically:
// A1' = -P''/(12 U), B1' = 1/U, A2' = -Q''/(12 V), B2' = 1/V, W = Z' with
// W'' = 3 W^2 + l1/2. Branches follow the principal square root; a path that
// crosses a cut raises PoleMarginError so samplers redraw.
struct SeparableH {
    Quartic P, Q;
    cx u0{1.6}, x0{1.7};  // base points of the quadratures
    cx w0{0.2, 0.1};      // W at s = 0
    int sign = 1;         // branch of W'(0)
    int nodes = 60;       // Gauss-Legendre nodes
    int steps = 400;      // RK4 steps for Z
    cx operator()(cx u, cx x) const;
};

// r = f(u,v) - g(x,y) + h(u,x) - h(v,y)
CoefficientFunction separable_solution(const Quartic& P, const Quartic& Q,
                                       std::function<cx(cx, cx)> h, std::vector<PoleLocus> h_poles = {});
SampleResidual verify_separable_solution(const Quartic& P, const Quartic& Q, std::function<cx(cx, cx)> h,
                                         const Six& s, double margin);

}  // namespace yb
