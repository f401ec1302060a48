#pragma once

#include <complex>
#include <stdexcept>

namespace yb {

using cx = std::complex<double>;

struct ThetaParams {
    cx tau{0.0, 1.0};
};

struct ThetaError : std::domain_error {
    using std::domain_error::domain_error;
};

// z = z0 + a + b*tau with integers a, b and |Im z0| <= Im(tau)/2.
struct LatticeReduction {
    cx z0;
    long a = 0;
    long b = 0;
};

LatticeReduction reduce(cx z, cx tau);

// Smallest N with exp(-pi Im(tau) (N+1/2)^2 + 2 pi (N+1/2)|Im z0|) < 1e-16.
int truncation(double im_tau, double im_z0);

// theta_11(z) = sum_n (-1)^n exp(pi i (n+1/2)^2 tau + 2 pi i (n+1/2) z)
cx theta11(cx z, const ThetaParams& p = {});
cx theta11_prime(cx z, const ThetaParams& p = {});

// Plain truncated series with no reduction (reference for tests).
cx theta11_series(cx z, cx tau, int n_terms);
cx theta11_prime_series(cx z, cx tau, int n_terms);

// Distance from z to the lattice Z + tau Z.
double lattice_distance(cx z, cx tau);

}  // namespace yb
