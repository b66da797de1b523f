#include <sstream>

#include "doctest.h"
#include "monomap/config.hpp"
#include "monomap/error.hpp"

using namespace monomap;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

ErrorCode error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::NonFiniteValue;  // no error
}

}  // namespace

TEST_CASE("built-in family with run settings") {
    const RunConfig c = parse(
        "# comment\n[map]\nfamily = rational_pqrh\np = 1\nh = 0.3\n\n[tolerances]\ntol_fp = 1e-8\n\n"
        "[run]\nseed = 42\nn_orbits = 7\nnice = false\nfault = chains\n");
    CHECK(c.map.family == "rational_pqrh");
    CHECK(c.map.params.at("p") == 1.0);
    CHECK(c.map.params.at("h") == 0.3);
    CHECK(c.tol.tol_fp == 1e-8);
    CHECK(c.seed == 42);
    CHECK(c.n_orbits == 7);
    CHECK_FALSE(c.nice);
    CHECK(c.fault == Fault::Chains);
    const Problem pb = build_problem(c);
    CHECK(pb.known_equilibrium == doctest::Approx(0.7));
    CHECK(pb.domain.polygon.size() == 5);
    const CertifyConfig cc = certify_config(c);
    CHECK(cc.seed == 42);
    CHECK(cc.fixed_points.tol_fp == 1e-8);
    CHECK(cc.chains.tol_fp == 1e-8);
    CHECK(cc.fault == Fault::Chains);
}

TEST_CASE("expression maps with named parameters") {
    const RunConfig c = parse(
        "[map]\nfamily = expr\nexpr = (p + q*x)/(1 + x + r*y)\nsignature = up, down\nbox = [0,2]x[0,2]\n"
        "[params]\np = 1\nq = 2\nr = 0.5\n");
    const Problem pb = build_problem(c);
    CHECK(pb.map(1.0, 1.0) == doctest::Approx(3.0 / 2.5));
    CHECK(pb.map.signature.is_up_down());
    CHECK(pb.map.param("q") == 2.0);
    CHECK(pb.domain.shape_class == ShapeClass::Rectangle);
    CHECK(pb.domain.bbox == Rectangle{0, 2, 0, 2});
}

TEST_CASE("x f(y) with an expression for f") {
    const RunConfig c = parse("[map]\nfamily = xfy\nf = 2/(1+y)\nlo = 0.01\nhi = 3\n");
    const Problem pb = build_problem(c);
    CHECK(pb.map(1.5, 0.5) == doctest::Approx(2.0));
    CHECK(pb.known_equilibrium == doctest::Approx(1.0));
}

TEST_CASE("explicit domains") {
    const std::string map = "[map]\nfamily = rational_pqr\np = 1\nq = 1\nr = 1\n";
    const Problem poly =
        build_problem(parse(map + "[domain]\ntype = polygon\nvertices = (0,0) (1,0) (1,0.5) (0.5,0.5) (0.5,1) (0,1)\n"));
    CHECK(poly.domain.shape_class == ShapeClass::SemiConvex);
    const Problem rect = build_problem(parse(map + "[domain]\ntype = rectangle\nrect = [0,1]x[0,0.5]\n"));
    CHECK(rect.domain.bbox == Rectangle{0, 1, 0, 0.5});
    const Problem disc = build_problem(
        parse(map + "[domain]\ntype = curve\nx = 0.5 + 0.4*cos(t)\ny = 0.5 + 0.4*sin(t)\nt0 = 0\nt1 = 6.283185307179586\n"));
    CHECK(disc.domain.shape_class == ShapeClass::Convex);
    CHECK(disc.domain.bbox.x1 == doctest::Approx(0.9));
    try {
        build_problem(parse(map + "[domain]\ntype = curve\nx = t\ny = t^2\nt0 = 0\nt1 = 1\n"));
        FAIL("open curve accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OpenCurve);
    }
}

TEST_CASE("list parsing") {
    const auto pts = parse_points("(1, 2) (3,4)\t(-0.5,1e-3)");
    REQUIRE(pts.size() == 3);
    CHECK(pts[2] == Point2{-0.5, 1e-3});
    CHECK(parse_box("[0, 6.3] x [1,2]") == Rectangle{0, 6.3, 1, 2});
    CHECK_THROWS_AS(parse_box("[0,1]"), Error);
    CHECK_THROWS_AS(parse_points("(1,2"), Error);
}

TEST_CASE("rejected configs") {
    const std::string pqrh = "[map]\nfamily = rational_pqrh\np = 1\nh = 0.3\n";
    CHECK(error_of(pqrh + "[run]\nbogus = 1\n") == ErrorCode::ConfigError);
    CHECK(error_of(pqrh + "[weird]\na = 1\n") == ErrorCode::ConfigError);
    CHECK(error_of(pqrh + "[tolerances]\ntol_fp = -1\n") == ErrorCode::ConfigError);
    CHECK(error_of(pqrh + "[tolerances]\ntol_fp = 0\n") == ErrorCode::ConfigError);
    CHECK(error_of(pqrh + "[tolerances]\ntol_zz = 1\n") == ErrorCode::ConfigError);
    CHECK(error_of(pqrh + "[run]\nseed = -3\n") == ErrorCode::ConfigError);
    CHECK(error_of(pqrh + "[run]\nn_grid = 0\n") == ErrorCode::ConfigError);
    CHECK(error_of("[map]\nfamily = rational_pqrh\np = 1\n") == ErrorCode::ConfigError);
    CHECK(error_of("[map]\nfamily = rational_pqrh\np = 1\nh = 0.3\nq = 2\n") == ErrorCode::ConfigError);
    CHECK(error_of("[map]\nfamily = rational_pqrh\np = 1\np = 2\nh = 0.3\n") == ErrorCode::ConfigError);
    CHECK(error_of("[map]\nfamily = nope\n") == ErrorCode::ConfigError);
    CHECK(error_of("[map]\nfamily = rational_pqrh\np = one\nh = 0.3\n") == ErrorCode::ConfigError);
    CHECK(error_of(pqrh + "[domain]\nrect = [0,1]x[0,1]\n") == ErrorCode::ConfigError);
    CHECK(error_of("p = 1\n") == ErrorCode::ConfigError);
    CHECK(error_of("[map]\nfamily = expr\nexpr = x\nsignature = up,sideways\nbox = [0,1]x[0,1]\n") == ErrorCode::ConfigError);
    CHECK(error_of("[map]\nfamily = expr\nexpr = x\nsignature = up\nbox = [0,1]x[0,1]\n") == ErrorCode::ConfigError);
}

TEST_CASE("instantiation errors surface with their own codes") {
    try {
        build_problem(parse("[map]\nfamily = rational_pqrh\np = 1\nh = 0.5\n"));
        FAIL("degenerate accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateCase);
    }
    try {
        build_problem(parse("[map]\nfamily = expr\nexpr = x + w\nsignature = up,down\nbox = [0,1]x[0,1]\n"));
        FAIL("unknown name accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
    }
}

TEST_CASE("tolerance overrides") {
    RunConfig c = parse("[map]\nfamily = rational_pqrh\np = 1\nh = 0.3\n");
    for (const auto& k : tolerance_keys()) set_tolerance(c, k, 1e-7);
    CHECK(c.tol.sep_min == 1e-7);
    CHECK(c.tol.tol_geom == 1e-7);
    CHECK_THROWS_AS(set_tolerance(c, "tol_fp", -1.0), Error);
    CHECK_THROWS_AS(set_tolerance(c, "nope", 1.0), Error);
}
