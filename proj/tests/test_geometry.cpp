#include <cmath>
#include <numbers>

#include "doctest.h"
#include "monomap/error.hpp"
#include "monomap/families.hpp"
#include "monomap/geometry.hpp"

using namespace monomap;

namespace {

std::vector<Point2> square() { return {{0, 0}, {1, 0}, {1, 1}, {0, 1}}; }

}  // namespace

TEST_CASE("shape classes") {
    CHECK(make_polygon_domain(square()).shape_class == ShapeClass::Rectangle);
    CHECK(make_polygon_domain({{0, 0}, {2, 0}, {3, 1}, {1, 2}}).shape_class == ShapeClass::Convex);
    // notch cut into the upper right: rays from it leave without re-entry
    CHECK(make_polygon_domain({{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}}).shape_class ==
          ShapeClass::SemiConvex);
    // a deep slot from the top: a horizontal ray from the slot wall crosses the domain again
    CHECK(make_polygon_domain({{0, 0}, {3, 0}, {3, 2}, {2, 2}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}).shape_class ==
          ShapeClass::Unsupported);
}

TEST_CASE("the pqrh pentagon is convex") {
    const FamilyInstance fi = make_eq8(1.0, 0.3);
    CHECK(fi.domain.shape_class == ShapeClass::Convex);
    CHECK(fi.domain.bbox == Rectangle{0.0, 6.3, 0.0, 6.3});
    CHECK(std::abs(signed_area(fi.domain.polygon)) == doctest::Approx(6.3 * 6.3 - 0.5 * 0.7 * (6.3 - 0.7)));
}

TEST_CASE("polygons are normalized counterclockwise") {
    const DomainSpec d = make_polygon_domain({{0, 1}, {1, 1}, {1, 0}, {0, 0}});
    CHECK(signed_area(d.polygon) > 0.0);
    const auto sw = swap_polygon(d.polygon);
    CHECK(signed_area(sw) > 0.0);
}

TEST_CASE("point location with a boundary band") {
    const DomainSpec d = make_polygon_domain(square());
    CHECK(contains(d, {0.5, 0.5}) == Containment::Inside);
    CHECK(contains(d, {1.0, 0.5}) == Containment::OnBoundary);
    CHECK(contains(d, {1.0 + 0.5 * d.tol_geom, 0.5}) == Containment::OnBoundary);
    CHECK(contains(d, {1.1, 0.5}) == Containment::Outside);
    CHECK(contains(d, {0.0, 0.0}) == Containment::OnBoundary);
    CHECK(distance_to_polygon(d.polygon, {2.0, 0.5}) == doctest::Approx(1.0));
}

TEST_CASE("axis projections onto the boundary") {
    const DomainSpec d = make_polygon_domain({{0, 0}, {2, 0}, {0, 2}});
    const auto right = project(d, {0.5, 0.5}, AxisDirection::XPlus);
    REQUIRE(right.has_value());
    CHECK(right->x == doctest::Approx(1.5));
    const auto up = project(d, {0.5, 0.5}, AxisDirection::YPlus);
    REQUIRE(up.has_value());
    CHECK(up->y == doctest::Approx(1.5));
    const auto left = project(d, {0.5, 0.5}, AxisDirection::XMinus);
    REQUIRE(left.has_value());
    CHECK(left->x == doctest::Approx(0.0));
    CHECK_FALSE(project(d, {5.0, 5.0}, AxisDirection::XPlus).has_value());
}

TEST_CASE("curved boundaries are discretized within the chord tolerance") {
    BoundaryCurve bc;
    bc.segments.push_back(ParamSegment::curve(
        [](double t) { return Point2{1.0 + std::cos(t), 1.0 + std::sin(t)}; }, 0.0, 2.0 * std::numbers::pi));
    const DomainSpec d = make_domain(bc);
    CHECK(d.shape_class == ShapeClass::Convex);
    CHECK(std::abs(signed_area(d.polygon)) == doctest::Approx(std::numbers::pi).epsilon(1e-4));
    for (const auto& p : d.polygon) CHECK(norm(p - Point2{1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("invalid boundaries are rejected") {
    BoundaryCurve open;
    open.segments.push_back(ParamSegment::line({0, 0}, {1, 0}));
    open.segments.push_back(ParamSegment::line({1, 0}, {1, 1}));
    CHECK_THROWS_AS(make_domain(open), Error);
    try {
        make_domain(open);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OpenCurve);
    }
    try {
        make_polygon_domain({{0, 0}, {1, 1}, {1, 0}, {0, 1}});
        FAIL("bow tie accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SelfIntersection);
    }
}

TEST_CASE("boundary segmentation splits where F o r turns") {
    // F(x,y) = -(x - 0.5)^2 - y restricted to the bottom edge rises then falls
    MapSpec m;
    m.eval = [](double x, double y, std::span<const double>) { return -(x - 0.5) * (x - 0.5) - y; };
    m.signature = {Monotone::NonIncreasing, Monotone::NonIncreasing};
    m.domain_box = {0, 1, 0, 1};
    const auto arcs = segment_boundary(m, BoundaryCurve::from_polygon(square()), 32);
    int bottom = 0;
    double split = -1.0;
    for (const auto& a : arcs) {
        if (a.segment == 0) {
            ++bottom;
            if (a.f_direction == FDirection::Increasing) split = a.b;
        }
    }
    CHECK(bottom == 2);
    CHECK(split == doctest::Approx(0.5).epsilon(1e-8));
}
