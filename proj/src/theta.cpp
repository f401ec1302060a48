#include "yb/theta.hpp"

#include <cmath>
#include <numbers>

namespace yb {

namespace {

constexpr double pi = std::numbers::pi;
const cx I{0.0, 1.0};

void check_tau(cx tau) {
    if (!(tau.imag() > 0.0)) throw ThetaError("theta11 needs Im(tau) > 0");
}

// value and derivative of the truncated series at a reduced argument
void sum_series(cx z, cx tau, int n, cx& val, cx& der) {
    val = der = 0.0;
    for (int k = -n - 1; k <= n; ++k) {
        const double h = k + 0.5;
        const cx e = std::exp(I * pi * h * h * tau + 2.0 * I * pi * h * z);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        val += sign * e;
        der += sign * 2.0 * I * pi * h * e;
    }
}

}  // namespace

LatticeReduction reduce(cx z, cx tau) {
    check_tau(tau);
    LatticeReduction r;
    r.b = std::lround(z.imag() / tau.imag());
    cx w = z - static_cast<double>(r.b) * tau;
    r.a = std::lround(w.real());
    r.z0 = w - static_cast<double>(r.a);
    return r;
}

int truncation(double im_tau, double im_z0) {
    const double target = std::log(1e-16);
    for (int n = 0; n < 10000; ++n) {
        const double h = n + 0.5;
        if (-pi * im_tau * h * h + 2.0 * pi * h * std::abs(im_z0) < target) return n;
    }
    throw ThetaError("theta11 truncation did not converge");
}

// theta(z0 + a + b tau) = (-1)^(a+b) exp(-pi i b^2 tau - 2 pi i b z0) theta(z0)
static void eval(cx z, const ThetaParams& p, cx& val, cx& der) {
    const auto r = reduce(z, p.tau);
    const int n = truncation(p.tau.imag(), r.z0.imag());
    cx v0, d0;
    sum_series(r.z0, p.tau, n, v0, d0);
    const double b = static_cast<double>(r.b);
    const double sign = ((r.a + r.b) % 2 == 0) ? 1.0 : -1.0;
    const cx pref = sign * std::exp(-I * pi * b * b * p.tau - 2.0 * I * pi * b * r.z0);
    val = pref * v0;
    der = pref * (d0 - 2.0 * I * pi * b * v0);
}

cx theta11(cx z, const ThetaParams& p) {
    cx v, d;
    eval(z, p, v, d);
    return v;
}

cx theta11_prime(cx z, const ThetaParams& p) {
    cx v, d;
    eval(z, p, v, d);
    return d;
}

cx theta11_series(cx z, cx tau, int n_terms) {
    check_tau(tau);
    cx v, d;
    sum_series(z, tau, n_terms, v, d);
    return v;
}

cx theta11_prime_series(cx z, cx tau, int n_terms) {
    check_tau(tau);
    cx v, d;
    sum_series(z, tau, n_terms, v, d);
    return d;
}

double lattice_distance(cx z, cx tau) {
    const auto r = reduce(z, tau);
    double best = std::abs(r.z0);
    for (int da = -1; da <= 1; ++da)
        for (int db = -1; db <= 1; ++db)
            best = std::min(best, std::abs(r.z0 - static_cast<double>(da) - static_cast<double>(db) * tau));
    return best;
}

}  // namespace yb
