#include <doctest.h>

#include <random>

#include "yb/classifier.hpp"

using namespace yb;

namespace {
Quartic Q(std::initializer_list<cx> k) {
    Quartic q;
    int i = 0;
    for (cx z : k) q.k[i++] = z;
    return q;
}
bool same(const Quartic& a, const Quartic& b, double tol = 1e-12) {
    for (int i = 0; i < 5; ++i)
        if (std::abs(a.k[i] - b.k[i]) > tol) return false;
    return true;
}
}  // namespace

TEST_CASE("invariants and lambdas") {
    Invariants one = invariants(Q({1}));
    CHECK(std::abs(one.I1) == 0.0);
    CHECK(std::abs(one.I2) == 0.0);
    Invariants sq = invariants(Q({0, 0, 1}));
    CHECK(std::abs(sq.I1 - 1.0) < 1e-15);
    CHECK(std::abs(sq.I2 - 2.0) < 1e-15);
    auto [a, b] = lambdas(sq.I1, sq.I2);
    CHECK(std::abs(a + 1.0 / 6.0) < 1e-15);
    CHECK(std::abs(b - 1.0 / 54.0) < 1e-15);
    Invariants cu = invariants(Q({0, 2, -3, 1}));
    CHECK(std::abs(lambdas(cu.I1, cu.I2).first + 0.5) < 1e-15);
    auto zero = lambdas(0.0, 0.0);
    CHECK(zero.first == cx{});
    CHECK(zero.second == cx{});
}

TEST_CASE("Moebius action on quartics") {
    Quartic p = Q({0.3, -1.0, 2.0, 0.5, 1.5});
    CHECK(same(mobius_transform_quartic(p, Mobius{}), p));
    CHECK(same(mobius_transform_quartic(Q({0, 1}), Mobius{1.0, 1.0, 0.0, 1.0}), Q({1, 1})));
    Mobius m{1.0, 2.0, 0.5, 3.0}, n{0.2, -1.0, 1.0, 0.7};
    CHECK(same(mobius_transform_quartic(mobius_transform_quartic(p, m), n), mobius_transform_quartic(p, n.then(m)), 1e-11));
}

TEST_CASE("printed reductions") {
    Quartic t = pullback(Q({0, -1, 1}), reduce_trig, reduce_trig_d);
    // x(x-1) becomes a multiple of t^2
    CHECK(std::abs(t.k[0]) < 1e-12);
    CHECK(std::abs(t.k[1]) < 1e-12);
    CHECK(std::abs(t.k[3]) < 1e-12);
    CHECK(std::abs(t.k[4]) < 1e-12);
    CHECK(std::abs(t.k[2]) > 1e-3);
    Quartic r = pullback(Q({0, 1}), reduce_rat, reduce_rat_d);
    CHECK(same(Q({r.k[0]}), r));
    CHECK_THROWS_AS(pullback(Q({1, 0, 0, 0, 1}), reduce_rat, reduce_rat_d), ClassifierError);
}

TEST_CASE("canonical types") {
    CHECK(canonical_type(Q({1})).type == CanonicalType::Rational);
    CHECK(canonical_type(Q({0, 1})).type == CanonicalType::Rational);
    CHECK(canonical_type(Q({0, -1, 1})).type == CanonicalType::Trigonometric);
    CHECK(canonical_type(Q({0, 0, 1})).type == CanonicalType::Trigonometric);
    CanonicalForm e = canonical_type(Q({0, 2, -3, 1}));
    CHECK(e.type == CanonicalType::Elliptic);
    REQUIRE(e.sigma_class);
    CHECK(std::abs(*e.sigma_class - 0.5) < 1e-9);
    bool has2 = false;
    for (cx s : anharmonic_orbit(*e.sigma)) has2 = has2 || std::abs(s - 2.0) < 1e-9;
    CHECK(has2);
    CHECK(e.verification < 1e-4);
}

TEST_CASE("anharmonic orbit") {
    const cx s{0.3, 0.4};
    auto o = anharmonic_orbit(s);
    for (cx t : o) CHECK(std::abs(anharmonic_representative(t) - anharmonic_representative(s)) < 1e-12);
}

TEST_CASE("classify pairings") {
    CHECK(classify({Q({1}), Q({1})}).verdict == "sol1");
    CHECK(classify({Q({0, 0, 1}), Q({0, 0, 1})}).verdict == "sol2");
    CHECK(classify({Q({0, 2, -3, 1}), Q({0, 2, -3, 1})}).verdict == "sol3");
    CHECK_THROWS_AS(classify({Q({0, 0, 1}), Q({1})}), ClassifierError);
}

TEST_CASE("separable f") {
    const cx u{0.8, 0.1}, v{0.3, -0.2};
    ScalarField2 f1 = separable_f(Q({1}));
    CHECK(std::abs(f1.f(u, v) - 2.0 / (u - v)) < 1e-14);
    ScalarField2 f2 = separable_f(Q({0, 0, 1}));
    CHECK(std::abs(f2.f(u, v) - (u + v) / (u - v)) < 1e-14);
    ScalarField2 f3 = separable_f(Q({0.5, 0.1, 1.0, 0.2, 0.3}));
    CHECK(std::abs(f3.f(u, v) + f3.f(v, u)) < 1e-14);
}

TEST_CASE("Z equation residual") {
    GridFunction flat{0.0, 1e-3, std::vector<double>(50, 2.0)};
    CHECK(z_ode_residual(flat, 0.0, 0.0).residual == 0.0);
    GridFunction lg{1.0, 1e-3, {}};
    for (int i = 0; i < 200; ++i) lg.z.push_back(-2.0 * std::log(1.0 + i * 1e-3));
    CHECK(z_ode_residual(lg, 0.0, 0.0).residual > 1.0);
    GridFunction z = integrate_z(-1.0 / 6.0, 1.0 / 54.0, 0.5, 1, 0.0, 5e-4, 801);
    CHECK(z_ode_residual(z, -1.0 / 6.0, 1.0 / 54.0).residual <= 1e-6);
    GridFunction coarse{0.0, 1e-2, std::vector<double>(50, 0.0)};
    CHECK_THROWS_AS(z_ode_residual(coarse, 0.0, 0.0), ClassifierError);
}

TEST_CASE("separable ansatz checker") {
    const Six s{{1.1, 0.1}, {1.5, -0.2}, {0.7, 0.3}, {-0.4, 0.2}, {-0.9, -0.1}, {0.2, -0.3}};
    auto h = [](cx u, cx x) { return -2.0 / (u - x - cx{0.5, 0.5}); };
    CHECK(verify_separable_solution(Q({1}), Q({1}), h, s, 0.05).rel() <= 1e-8);
    CHECK(verify_separable_solution(Q({}), Q({}), [](cx, cx) { return cx{}; }, s, 0.05).abs == 0.0);
    auto bad = [](cx u, cx x) { return 0.7 * u * x + std::exp(0.3 * u) - x * x; };
    CHECK(verify_separable_solution(Q({1}), Q({1}), bad, s, 0.05).rel() > 1e-3);
}
