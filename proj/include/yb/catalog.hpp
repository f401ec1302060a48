#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "yb/bracket.hpp"
#include "yb/residuals.hpp"
#include "yb/tensor.hpp"
#include "yb/theta.hpp"

namespace yb {

struct Univariate {
    std::string name;
    std::function<cx(cx)> f;
};

// ---- four-parameter m = 1 solutions ----------------------------------------------
CoefficientFunction rational_solution();       // 1/(u-v) - 1/(x-y)
CoefficientFunction trigonometric_solution();  // (e^{u-v} - e^{x-y}) / ((e^{u-v}-1)(e^{x-y}-1))
CoefficientFunction elliptic_solution(const ThetaParams& p);  // th(u-v+x-y) / (th(u-v) th(x-y))
// th(u-v+x-y) th(u+y+eta) th(v+x+eta) / (th(u-v) th(x-y) th(u+x+eta) th(v+y+eta))
CoefficientFunction elliptic_eta_solution(const ThetaParams& p, cx eta);
// (L(u-v) - L(u+x+eta) + L(x-y) + L(v+y+eta)) / th'(0), L = th'/th
CoefficientFunction elliptic_logderiv_solution(const ThetaParams& p, cx eta);
ScalarField2 theta_gauge(const ThetaParams& p, cx eta);  // q(u,x) = th(u+x+eta)

// (p1 uv + p2 (u+v) + p3)/(u-v) - (p1 xy + p2 (x+y) + p3)/(x-y)
CoefficientFunction uniform_solution(cx p1, cx p2, cx p3);
CoefficientFunction degenerate_uv();  // 1/(u-v)
CoefficientFunction degenerate_xy();  // 1/(x-y)

// distance from z to 2 pi i Z
double exp_pole_distance(cx z);

// beta(u,v,x,y) = a(u,v) + b(x,y) + c(v,x) - c(u,y), with a, b odd
CoefficientFunction beta_general_m1(ScalarFn2 a, ScalarFn2 b, ScalarFn2 c,
                                    std::vector<PoleLocus> poles = {});

// ---- one-parameter double brackets ---------------------------------------------------
// alpha = 1/(g(u)-g(v)), beta = 1/(h(u)-h(v)), gamma = 0, delta = eps/(g(v)-h(u))
BracketRule gh_rule(const Univariate& g, const Univariate& h, int eps);
// route 11: k = delta^i_p delta^j_q, route 21: k = delta^i_q delta^j_p; alpha = k/(u-v), beta = -alpha
BracketRule yang_rule(int route, int m);
// route 11: alpha = I/(u-v), beta = I/(v-u) + r; route 21: alpha = X/(u-v) + r, beta = X/(v-u)
BracketRule shifted_yang_rule(int route, const Arr& r);

// ---- linear brackets -------------------------------------------------------------------
BracketRule linear_general_m1(const Univariate& a1, const Univariate& b1);
// a = c/(u-v), b = c/(v-u), c[k,i,j] structure constants
BracketRule linear_structure_rule(const Arr& c);
// a^k_ij = c^k_is r^s_j(u,v), b^k_ij = c^k_sj r^s_i(v,u), r(u,v) = id/(u-v) + r0
BracketRule linear_rota_baxter_rule(const Arr& c, const Arr& r0);

// one-parameter Poisson alpha from the alpha of a one-parameter quadratic rule
CoefficientFunction alpha_of(const BracketRule& rule);

// ---- constant AYBE oracle ------------------------------------------------------------
struct NewtonResult {
    Arr r;
    double residual = 0.0;  // max |index form| together with the skew defect
    int restarts = 0;
};
// Random-restart Levenberg-Marquardt on the skew-symmetric constant AYBE with
// a random linear normalization (excludes r = 0). Throws NumericHazard on failure.
NewtonResult newton_constant_solution(int m, std::uint64_t seed, double accept = 1e-12,
                                      int max_restarts = 200);

// matrix of a constant operator on Mat_m given by an m^4 array (matrix_operator convention)
Arr operator_matrix(const Arr& r, bool bar = false);

}  // namespace yb
