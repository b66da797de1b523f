#include <cmath>

#include "doctest.h"
#include "monomap/embedding.hpp"
#include "monomap/error.hpp"
#include "monomap/families.hpp"

using namespace monomap;

namespace {

ExtendedMap pqrh_ext(double p, double h) {
    const FamilyInstance fi = make_eq8(p, h);
    return extend(fi.map, fi.domain);
}

ExtendedMap xfy_ext() {
    const FamilyInstance fi = make_xfy([](double y) { return 2.0 / (1.0 + y); }, "2/(1+y)", 0.01, 3.0);
    return extend(fi.map, fi.domain);
}

}  // namespace

TEST_CASE("state layout and corners") {
    const ExtendedMap ext = pqrh_ext(1.0, 0.3);
    const EmbeddedSystem s2 = build_embedding(ext, Variant::Sym2);
    const EmbeddedSystem s4 = build_embedding(ext, Variant::Sym4);
    const EmbeddedSystem s8 = build_embedding(ext, Variant::Sym8);
    CHECK(s2.state_dim == 2);
    CHECK(s4.state_dim == 4);
    CHECK(s8.state_dim == 8);
    CHECK(s4.a == 0.0);
    CHECK(s4.b == doctest::Approx(6.3));
    for (const auto* s : {&s2, &s4, &s8}) {
        CHECK(s->leq(s->min_corner(), s->max_corner()));
        CHECK_FALSE(s->leq(s->max_corner(), s->min_corner()));
        CHECK(s->order_margin(s->min_corner(), s->max_corner()) == doctest::Approx(6.3));
    }
}

TEST_CASE("Sym2 and Sym4 steps follow their formulas") {
    const ExtendedMap ext = pqrh_ext(1.0, 0.3);
    auto F = [&](double x, double y) { return std::clamp(eval_extended(ext, x, y), 0.0, 6.3); };
    const EmbeddedSystem s2 = build_embedding(ext, Variant::Sym2);
    const State g2 = step(s2, {1.0, 2.0});
    CHECK(g2[0] == F(1.0, 2.0));
    CHECK(g2[1] == F(2.0, 1.0));
    const EmbeddedSystem s4 = build_embedding(ext, Variant::Sym4);
    const State g4 = step(s4, {1.0, 2.0, 3.0, 0.5});
    CHECK(g4[0] == F(1.0, 2.0));
    CHECK(g4[1] == 3.0);
    CHECK(g4[2] == F(3.0, 0.5));
    CHECK(g4[3] == 1.0);
    const Point2 r = reduce_state(s4, {1.0, 2.0, 3.0, 0.5});
    CHECK(r == Point2{1.0, 2.0});
}

TEST_CASE("embeddings need an (up, down) map on a square") {
    const FamilyInstance fi = make_eq7(1.0, 1.0, 1.0);
    MapSpec du = fi.map.swapped();
    const ExtendedMap ext = extend(du, make_rectangle_domain(du.domain_box));
    try {
        build_embedding(ext, Variant::Sym4);
        FAIL("(down, up) map embedded");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotMixedMonotone);
    }
    MapSpec wide = fi.map;
    wide.domain_box = {0, 1, 0, 2};
    const ExtendedMap e2 = extend(wide, make_rectangle_domain(wide.domain_box));
    CHECK_THROWS_AS(build_embedding(e2, Variant::Sym2), Error);
}

TEST_CASE("order preservation over random comparable pairs") {
    for (const ExtendedMap& ext : {pqrh_ext(1.0, 0.3), xfy_ext()}) {
        for (Variant v : {Variant::Sym2, Variant::Sym4, Variant::Sym8}) {
            const OrderAudit o = check_order_preserving(build_embedding(ext, v), 2000, 17);
            CHECK(o.pairs == 2000);
            CHECK(o.violations == 0);
        }
    }
}

TEST_CASE("pqrh corner chains meet at x*") {
    for (auto [p, h] : {std::pair{1.0, 0.3}, {0.6, 0.2}, {1.0, 0.45}, {0.4, 0.3}}) {
        const EmbeddedSystem sys = build_embedding(pqrh_ext(p, h), Variant::Sym4);
        const ChainPair ch = run_corner_chains(sys);
        CHECK(ch.lower.status == ChainStatus::Converged);
        CHECK(ch.upper.status == ChainStatus::Converged);
        CHECK(ch.ordered);
        CHECK(ch.lower.monotone_verified);
        REQUIRE(ch.common_diagonal_limit.has_value());
        CHECK(*ch.common_diagonal_limit == doctest::Approx(p - h).epsilon(1e-9));
        // consecutive states climb (resp. descend) in the order
        for (std::size_t i = 1; i < ch.lower.states.size(); ++i) {
            CHECK(sys.order_margin(ch.lower.states[i - 1], ch.lower.states[i]) >= -1e-12);
        }
    }
}

TEST_CASE("x f(y): eigenvalues 1 -+ x* f'(x*) and split chains") {
    const EmbeddedSystem sys = build_embedding(xfy_ext(), Variant::Sym2);
    const Mat2 j = sym2_jacobian(sys, {1.0, 1.0});
    CHECK(j.a == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(j.b == doctest::Approx(-0.5).epsilon(1e-6));
    const Eigen2 e = eigenvalues(j);
    CHECK(e.re1 == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(e.re2 == doctest::Approx(0.5).epsilon(1e-6));
    const ChainPair ch = run_corner_chains(sys);
    CHECK_FALSE(ch.common_diagonal_limit.has_value());
    REQUIRE(ch.lower.limit.has_value());
    REQUIRE(ch.upper.limit.has_value());
    const Point2 lo = reduce_state(sys, *ch.lower.limit), hi = reduce_state(sys, *ch.upper.limit);
    CHECK(lo.x == doctest::Approx(0.01));
    CHECK(lo.y == doctest::Approx(3.0));
    CHECK(hi.x == doctest::Approx(3.0));
    CHECK(hi.y == doctest::Approx(0.01));
}

TEST_CASE("bracketing by the corner orbits") {
    for (Variant v : {Variant::Sym2, Variant::Sym4, Variant::Sym8}) {
        const BracketAudit b = check_bracketing(build_embedding(pqrh_ext(1.0, 0.3), v), 100, {1, 10, 100}, 9);
        CHECK(b.samples == 300);
        CHECK(b.passed());
    }
}

TEST_CASE("a step cap ends the chain without a limit") {
    const EmbeddedSystem sys = build_embedding(pqrh_ext(1.0, 0.3), Variant::Sym4);
    ChainOptions o;
    o.max_iter = 3;
    const ChainPair ch = run_corner_chains(sys, o);
    CHECK(ch.lower.status == ChainStatus::MaxIterations);
    CHECK_FALSE(ch.lower.limit.has_value());
    CHECK(ch.lower.iterations == 3);
}

TEST_CASE("squeeze inequalities") {
    const EmbeddedSystem sys = build_embedding(pqrh_ext(1.0, 0.3), Variant::Sym4);
    // case (ii): v <= x <= u <= y with F(u,v) <= u and x <= F(x,y); F(0.8,0.6) = 0.783, F(0.6,0.8) = 0.617
    const SqueezeReport r = squeeze_bounds(sys, {0.6, 0.8}, {0.8, 0.6});
    CHECK(r.applied == SqueezeCase::CaseII);
    CHECK(r.holds);
    for (double m : r.hypothesis_margins) CHECK(m >= 0.0);
    for (double m : r.chain_margins) CHECK(m >= -1e-12);
    const SqueezeReport none = squeeze_bounds(sys, {5.0, 0.1}, {0.1, 5.0});
    CHECK(none.applied == SqueezeCase::None);
}
