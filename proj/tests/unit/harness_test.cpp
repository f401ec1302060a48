#include <doctest.h>

#include "yb/harness.hpp"

using namespace yb;

TEST_CASE("defaults") {
    RunConfig c = parse_config(R"({"suite":"aybe4","solution":{"family":"rational"}})");
    CHECK(c.samples == 200);
    CHECK(c.seed == 42);
    CHECK(c.tolerance == 1e-9);
    CHECK(c.pole_margin == 0.05);
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(parse_config(R"({"suite":"aybe4","solution":"rational","samples":0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"suite":"aybe4","solution":"rational","tolerance":-1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"suite":"nope","solution":"rational"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"suite":"aybe4","solution":"quantum"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"suite":"aybe4","solution":"rational","bogus":1})"), ConfigError);
    try {
        parse_config(R"({"suite":"aybe4","solution":{"family":"elliptic"}})");
        FAIL("accepted elliptic without tau");
    } catch (const ConfigError& e) {
        CHECK(e.path.find("tau") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(R"({"suite":"aybe4","solution":{"family":"elliptic","tau":[0,1,2]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"suite":"aybe4","solution":{"family":"elliptic","tau":"i"}})"), ConfigError);
    CHECK_THROWS(parse_config("{not json"));
}

TEST_CASE("complex literals") {
    CHECK(complex_from_json(json::array({0.5, -2.0}), "z") == cx{0.5, -2.0});
    CHECK(complex_from_json(json(3.0), "z") == cx{3.0});
    CHECK(complex_json(cx{1.0, 2.0}) == json::array({1.0, 2.0}));
    CHECK_THROWS_AS(complex_from_json(json::array({1.0}), "z"), ConfigError);
}

TEST_CASE("rational aybe4 run") {
    RunReport r = run_suite(parse_config(R"({"suite":"aybe4","solution":"rational","samples":200,"seed":42})"));
    CHECK(r.pass);
    for (const auto& x : r.results) CHECK(x.max_abs_residual <= 1e-9);
}

TEST_CASE("classify run") {
    RunReport r = run_suite(parse_config(R"({"suite":"classify","P":[1,0,0,0,0],"Q":[1,0,0,0,0]})"));
    CHECK(r.pass);
    CHECK(r.details["type"] == "Rational");
    CHECK(r.details["verdict"] == "sol1");
    RunReport mixed = run_suite(parse_config(R"({"suite":"classify","P":[0,0,1,0,0],"Q":[1,0,0,0,0]})"));
    CHECK_FALSE(mixed.pass);
    CHECK_FALSE(mixed.error.empty());
}

TEST_CASE("theta run") {
    RunReport r = run_suite(parse_config(R"({"suite":"theta","tau":[0,1],"samples":50})"));
    CHECK(r.pass);
}

TEST_CASE("failing run carries an argmax") {
    RunReport r = run_suite(parse_config(
        R"({"suite":"aybe4","solution":{"family":"uniform","p":[[1,0],[0,0],[0,0]]},"samples":10,"tolerance":1e-30})"));
    bool any_fail = false;
    for (const auto& x : r.results)
        if (!x.pass) {
            any_fail = true;
            CHECK_FALSE(x.argmax.empty());
        }
    CHECK(any_fail == !r.pass);
}

TEST_CASE("report round trip") {
    RunReport r = run_suite(parse_config(R"({"suite":"aybe4","solution":"trigonometric","samples":20})"));
    json a = to_json(r);
    RunReport back = report_from_json(a);
    CHECK(to_json(back).dump() == a.dump());
    RunConfig c = parse_config(to_json(r.config));
    CHECK(to_json(c).dump() == to_json(r.config).dump());
}
