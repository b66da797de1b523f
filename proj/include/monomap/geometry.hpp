#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "monomap/map_model.hpp"
#include "monomap/types.hpp"

namespace monomap {

enum class SegmentKind { Line, PolylineApprox, AnalyticCurve };

/// One piece of a boundary: r(t), t in [t0, t1].
struct ParamSegment {
    SegmentKind kind = SegmentKind::Line;
    std::function<Point2(double)> r;
    double t0 = 0.0;
    double t1 = 1.0;
    std::vector<Point2> vertices;  ///< Line: the two endpoints; PolylineApprox: the vertex chain

    Point2 at(double t) const { return r(t); }
    Point2 start() const { return r(t0); }
    Point2 end() const { return r(t1); }

    static ParamSegment line(Point2 a, Point2 b);
    static ParamSegment polyline(std::vector<Point2> pts);
    static ParamSegment curve(std::function<Point2(double)> r, double t0, double t1);

    ParamSegment reversed() const;
    /// Vertices approximating the segment with chord error below chord_tol,
    /// including both endpoints.
    std::vector<Point2> discretize(double chord_tol) const;
};

struct BoundaryCurve {
    std::vector<ParamSegment> segments;

    static BoundaryCurve from_polygon(const std::vector<Point2>& vertices);
    BoundaryCurve reversed() const;
};

enum class ShapeClass { Rectangle, Convex, SemiConvex, Unsupported };
std::string to_string(ShapeClass s);

/// A compact planar region. Immutable after make_domain; the normalized
/// polygon is counterclockwise without a repeated closing vertex.
struct DomainSpec {
    BoundaryCurve boundary;
    std::vector<Point2> polygon;
    ShapeClass shape_class = ShapeClass::Unsupported;
    Rectangle bbox;
    double tol_geom = 0.0;
};

inline constexpr double kDefaultRelTolGeom = 1e-8;
/// Chord error allowed when curved segments are replaced by polylines, relative to diam(bbox).
inline constexpr double kChordRelTol = 1e-5;

/// Validates closure and simplicity, discretizes, orients counterclockwise and classifies.
/// tol_geom <= 0 selects 1e-8 * diam(bbox).
DomainSpec make_domain(const BoundaryCurve& boundary, double tol_geom = 0.0);
DomainSpec make_polygon_domain(const std::vector<Point2>& vertices, double tol_geom = 0.0);
DomainSpec make_rectangle_domain(const Rectangle& rect, double tol_geom = 0.0);

ShapeClass classify_domain(const BoundaryCurve& boundary);
ShapeClass classify_polygon(const std::vector<Point2>& ccw_polygon, double tol);

double signed_area(const std::vector<Point2>& polygon);
/// Swaps coordinates of every vertex and restores counterclockwise order.
std::vector<Point2> swap_polygon(const std::vector<Point2>& polygon);

enum class Containment { Inside, OnBoundary, Outside };
std::string to_string(Containment c);

double distance_to_segment(const Point2& p, const Point2& a, const Point2& b);
double distance_to_polygon(const std::vector<Point2>& polygon, const Point2& p);
/// Ray casting with an OnBoundary band of width tol.
Containment locate_in_polygon(const std::vector<Point2>& polygon, const Point2& p, double tol);
Containment contains(const DomainSpec& domain, const Point2& p);

enum class AxisDirection { XMinus, XPlus, YMinus, YPlus };
std::string to_string(AxisDirection d);

std::optional<Point2> project_to_polygon(const std::vector<Point2>& polygon, const Point2& p,
                                         AxisDirection dir, double tol);
/// Nearest intersection of the axis ray from p with the boundary.
std::optional<Point2> project(const DomainSpec& domain, const Point2& p, AxisDirection dir);

enum class FDirection { Increasing, Decreasing, Constant };
enum class GeometricCase { RightUp, LeftUp, LeftDown, RightDown, Horizontal, Vertical };
std::string to_string(FDirection d);
std::string to_string(GeometricCase g);

/// A sub-interval [a, b] of boundary segment `segment` on which F o r is monotone.
struct MonotoneArc {
    int segment = 0;
    double a = 0.0;
    double b = 0.0;
    FDirection f_direction = FDirection::Constant;
    GeometricCase geometric_case = GeometricCase::Horizontal;
};

inline constexpr int kDefaultMaxArcs = 64;

/// Splits each boundary segment where the sampled derivative of F o r changes sign,
/// refining every split point by bisection.
std::vector<MonotoneArc> segment_boundary(const MapSpec& map, const BoundaryCurve& boundary,
                                          int samples_per_segment, int max_arcs = kDefaultMaxArcs,
                                          double tol_t = 1e-10);

/// Location of the extremum of g on [lo, hi] when g rises then falls (is_max)
/// or falls then rises. Shared by the boundary segmentation and the extension builder.
double refine_extremum(const std::function<double(double)>& g, double lo, double hi, bool is_max,
                       double tol_t);

}  // namespace monomap
