#include <doctest.h>

#include <cmath>
#include <random>

#include "yb/theta.hpp"

using namespace yb;

TEST_CASE("theta zero and oddness") {
    ThetaParams p;
    CHECK(std::abs(theta11(0.0, p)) < 1e-15);
    cx z{0.3, 0.1};
    CHECK(std::abs(theta11(-z, p) + theta11(z, p)) < 1e-14);
    // independent of the reduction: plain partial sums at +-z
    CHECK(std::abs(theta11_series(-z, p.tau, 30) + theta11_series(z, p.tau, 30)) < 1e-14);
    CHECK(std::abs(theta11(z, p) - theta11_series(z, p.tau, 30)) < 1e-14);
}

TEST_CASE("theta shift by one flips sign") {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> d(-1, 1);
    for (int i = 0; i < 20; ++i) {
        cx z{d(g), 0.4 * d(g)};
        CHECK(std::abs(theta11(z + 1.0) + theta11(z)) < 1e-13);
    }
}

TEST_CASE("theta far from the strip") {
    const cx tau{0.3, 0.8};
    cx z{0.2, 1.9};
    LatticeReduction r = reduce(z, tau);
    CHECK(std::abs(r.z0 + double(r.a) + double(r.b) * tau - z) < 1e-14);
    CHECK(std::abs(r.z0.imag()) <= tau.imag() / 2 + 1e-15);
    cx ref = theta11_series(z, tau, 60);
    CHECK(std::abs(theta11(z, {tau}) - ref) < 1e-12 * (1.0 + std::abs(ref)));
}

TEST_CASE("theta derivative") {
    ThetaParams p;
    cx d0 = theta11_prime(0.0, p);
    CHECK(std::abs(d0) > 1.0);
    // 2 pi i times a real series: purely imaginary for this characteristic
    CHECK(std::abs(d0.real()) < 1e-14 * std::abs(d0));
    const double h = 1e-5;
    cx fd = (theta11(h, p) - theta11(-h, p)) / (2 * h);
    CHECK(std::abs(fd - d0) < 1e-8 * std::abs(d0));
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> d(-1, 1);
    for (int i = 0; i < 20; ++i) {
        cx z{d(g), 0.45 * d(g)};
        CHECK(std::abs(theta11_prime(-z, p) - theta11_prime(z, p)) < 1e-12);
        cx f = (theta11(z + h, p) - theta11(z - h, p)) / (2 * h);
        CHECK(std::abs(f - theta11_prime(z, p)) < 1e-8 * (1.0 + std::abs(f)));
    }
}

TEST_CASE("theta rejects a bad modulus") {
    CHECK_THROWS_AS(theta11(0.1, ThetaParams{cx{0.0, -1.0}}), ThetaError);
}
