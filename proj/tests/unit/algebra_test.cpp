#include <doctest.h>

#include "yb/algebra.hpp"

using namespace yb;

namespace {
Algebra A(3, 1);
FreeElement E(int i, const char* t) { return A.letter(i, t); }
}  // namespace

TEST_CASE("product of words") {
    FreeElement w = E(0, "u") * E(2, "w");
    CHECK(A.unit() * w == w);
    CHECK(w * A.unit() == w);
    FreeElement p = E(0, "u") * E(1, "v");
    REQUIRE(p.size() == 1);
    CHECK(p.coeff(Word{A.gen(0, "u"), A.gen(1, "v")}) == cx{1.0});
    FreeElement s = (E(0, "u") + E(1, "u")) * E(0, "v");
    CHECK(s == E(0, "u") * E(0, "v") + E(1, "u") * E(0, "v"));
}

TEST_CASE("cancellation leaves no stored zeros") {
    FreeElement a = E(0, "u") - E(0, "u");
    CHECK(a.empty());
}

TEST_CASE("flip, cyclic shift, P13 and mu") {
    FreeElement a = E(0, "u"), b = E(1, "v"), c = E(2, "w"), d = E(0, "w");
    CHECK(tensor_flip(tensor(a, b)) == tensor(b, a));
    Tensor2<cx> t = tensor(a, b) + tensor(c, d).scaled(cx{2.0, 1.0});
    CHECK(tensor_flip(tensor_flip(t)) == t);
    CHECK(tensor_flip(t) == tensor(b, a) + tensor(d, c).scaled(cx{2.0, 1.0}));

    Tensor3<cx> t3 = tensor(a, b, c);
    CHECK(cyclic_shift(t3) == tensor(c, a, b));
    Tensor3<cx> mix = t3 + tensor(b, d, a).scaled(cx{0.0, 3.0});
    CHECK(cyclic_shift(cyclic_shift(cyclic_shift(mix))) == mix);
    CHECK(cyclic_shift(Tensor3<cx>{}).empty());
    CHECK(permute13(t3) == tensor(c, b, a));
    CHECK(permute13(permute13(mix)) == mix);
    CHECK_FALSE(permute13(cyclic_shift(mix)) == cyclic_shift(permute13(mix)));

    CHECK(mu(tensor(a, b)) == a * b);
    CHECK(mu(tensor(a, A.unit()) + tensor(A.unit(), a)) == a.scaled(2.0));
    CHECK(mu(tensor_flip(tensor(a, b))) == b * a);
}

TEST_CASE("trace classes") {
    FreeElement a = E(0, "u"), b = E(1, "v"), c = E(2, "w");
    CHECK(trace_project(a * b - b * a).empty());
    CHECK(trace_project(b * a * c) == trace_project(a * c * b));
    CHECK(trace_project(a * b).size() == 1);
    CHECK(min_rotation(reversed(Word{A.gen(1, "v"), A.gen(0, "u")})) == Word{A.gen(0, "u"), A.gen(1, "v")});
}

TEST_CASE("algebra checks") {
    CHECK_THROWS_AS(A.gen(3, "u"), AlgebraError);
    CHECK_THROWS_AS(A.gen(0), AlgebraError);
    CHECK_THROWS_AS(Algebra(0, 1), AlgebraError);
    Algebra B(2, 2);
    CHECK_THROWS_AS(B.check(A.gen(0, "u")), AlgebraError);
    Assignment asg{{"u", 1.0}};
    CHECK(asg.at("u") == cx{1.0});
    CHECK_THROWS_AS(asg.at("w"), MissingTag);
}

TEST_CASE("symbolic coefficients evaluate") {
    Atom x{0, {0, 0, 0, 0}, {Tag("u"), Tag("v"), {}, {}}, 2};
    Atom y{1, {0, 0, 0, 0}, {Tag("u"), Tag("v"), {}, {}}, 2};
    Sym s = Sym::atom(x) * Sym::atom(y) + Sym(cx{2.0});
    cx v = evaluate(s, [](const Atom& a) { return a.fn == 0 ? cx{3.0} : cx{0.0, 1.0}; });
    CHECK(std::abs(v - cx{2.0, 3.0}) < 1e-15);
    CHECK((Sym::atom(x) - Sym::atom(x)).empty());
}
