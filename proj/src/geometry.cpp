#include "monomap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "monomap/error.hpp"

namespace monomap {

std::string to_string(ShapeClass s) {
    switch (s) {
        case ShapeClass::Rectangle: return "Rectangle";
        case ShapeClass::Convex: return "Convex";
        case ShapeClass::SemiConvex: return "SemiConvex";
        case ShapeClass::Unsupported: return "Unsupported";
    }
    return "?";
}

std::string to_string(Containment c) {
    switch (c) {
        case Containment::Inside: return "Inside";
        case Containment::OnBoundary: return "OnBoundary";
        case Containment::Outside: return "Outside";
    }
    return "?";
}

std::string to_string(AxisDirection d) {
    switch (d) {
        case AxisDirection::XMinus: return "XMinus";
        case AxisDirection::XPlus: return "XPlus";
        case AxisDirection::YMinus: return "YMinus";
        case AxisDirection::YPlus: return "YPlus";
    }
    return "?";
}

std::string to_string(FDirection d) {
    switch (d) {
        case FDirection::Increasing: return "Increasing";
        case FDirection::Decreasing: return "Decreasing";
        case FDirection::Constant: return "Constant";
    }
    return "?";
}

std::string to_string(GeometricCase g) {
    switch (g) {
        case GeometricCase::RightUp: return "RightUp";
        case GeometricCase::LeftUp: return "LeftUp";
        case GeometricCase::LeftDown: return "LeftDown";
        case GeometricCase::RightDown: return "RightDown";
        case GeometricCase::Horizontal: return "Horizontal";
        case GeometricCase::Vertical: return "Vertical";
    }
    return "?";
}

// ---------------------------------------------------------------- segments

ParamSegment ParamSegment::line(Point2 a, Point2 b) {
    ParamSegment s;
    s.kind = SegmentKind::Line;
    s.t0 = 0.0;
    s.t1 = 1.0;
    s.vertices = {a, b};
    s.r = [a, b](double t) { return t == 1.0 ? b : a + (b - a) * t; };
    return s;
}

ParamSegment ParamSegment::polyline(std::vector<Point2> pts) {
    ParamSegment s;
    s.kind = SegmentKind::PolylineApprox;
    s.t0 = 0.0;
    s.t1 = static_cast<double>(pts.size() - 1);
    s.vertices = pts;
    s.r = [pts = std::move(pts)](double t) {
        const double tc = std::clamp(t, 0.0, static_cast<double>(pts.size() - 1));
        auto i = static_cast<std::size_t>(std::floor(tc));
        if (i + 1 >= pts.size()) i = pts.size() - 2;
        const double u = tc - static_cast<double>(i);
        return pts[i] + (pts[i + 1] - pts[i]) * u;
    };
    return s;
}

ParamSegment ParamSegment::curve(std::function<Point2(double)> r, double t0, double t1) {
    ParamSegment s;
    s.kind = SegmentKind::AnalyticCurve;
    s.r = std::move(r);
    s.t0 = t0;
    s.t1 = t1;
    return s;
}

ParamSegment ParamSegment::reversed() const {
    if (kind == SegmentKind::Line) return line(vertices[1], vertices[0]);
    if (kind == SegmentKind::PolylineApprox) {
        std::vector<Point2> rev(vertices.rbegin(), vertices.rend());
        return polyline(std::move(rev));
    }
    const double a = t0, b = t1;
    auto inner = r;
    return curve([inner, a, b](double t) { return inner(a + b - t); }, a, b);
}

std::vector<Point2> ParamSegment::discretize(double chord_tol) const {
    if (kind != SegmentKind::AnalyticCurve) return vertices;
    constexpr int kMaxPieces = 1 << 16;
    int n = 16;
    for (;;) {
        double worst = 0.0;
        for (int i = 0; i < n && worst <= chord_tol; ++i) {
            const double ta = t0 + (t1 - t0) * i / n;
            const double tb = t0 + (t1 - t0) * (i + 1) / n;
            worst = std::max(worst, distance_to_segment(r(0.5 * (ta + tb)), r(ta), r(tb)));
        }
        if (worst <= chord_tol || n >= kMaxPieces) break;
        n *= 2;
    }
    std::vector<Point2> pts(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) pts[i] = r(t0 + (t1 - t0) * i / n);
    pts.back() = r(t1);
    return pts;
}

BoundaryCurve BoundaryCurve::from_polygon(const std::vector<Point2>& vertices) {
    BoundaryCurve b;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        b.segments.push_back(ParamSegment::line(vertices[i], vertices[(i + 1) % vertices.size()]));
    }
    return b;
}

BoundaryCurve BoundaryCurve::reversed() const {
    BoundaryCurve b;
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) b.segments.push_back(it->reversed());
    return b;
}

// ---------------------------------------------------------------- polygons

double signed_area(const std::vector<Point2>& polygon) {
    double a = 0.0;
    for (std::size_t i = 0, n = polygon.size(); i < n; ++i) {
        a += cross(polygon[i], polygon[(i + 1) % n]);
    }
    return 0.5 * a;
}

std::vector<Point2> swap_polygon(const std::vector<Point2>& polygon) {
    std::vector<Point2> out;
    out.reserve(polygon.size());
    for (auto it = polygon.rbegin(); it != polygon.rend(); ++it) out.push_back(it->swapped());
    return out;
}

double distance_to_segment(const Point2& p, const Point2& a, const Point2& b) {
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

double distance_to_polygon(const std::vector<Point2>& polygon, const Point2& p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = polygon.size(); i < n; ++i) {
        best = std::min(best, distance_to_segment(p, polygon[i], polygon[(i + 1) % n]));
    }
    return best;
}

Containment locate_in_polygon(const std::vector<Point2>& polygon, const Point2& p, double tol) {
    bool inside = false;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, n = polygon.size(), j = n - 1; i < n; j = i++) {
        const Point2& a = polygon[i];
        const Point2& b = polygon[j];
        best = std::min(best, distance_to_segment(p, a, b));
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xint) inside = !inside;
        }
    }
    if (best <= tol) return Containment::OnBoundary;
    return inside ? Containment::Inside : Containment::Outside;
}

Containment contains(const DomainSpec& domain, const Point2& p) {
    if (!domain.bbox.contains(p, domain.tol_geom)) return Containment::Outside;
    return locate_in_polygon(domain.polygon, p, domain.tol_geom);
}

namespace {

// Parameter s >= 0 at which the ray p + s*dir meets segment [a, b], if any.
std::optional<double> ray_hit(const Point2& p, const Point2& dir, const Point2& a, const Point2& b,
                              double tol) {
    const Point2 e = b - a;
    const double denom = cross(dir, e);
    const Point2 ap = a - p;
    if (std::abs(denom) <= 1e-300) {
        // parallel: count collinear overlap by its nearest point
        if (std::abs(cross(ap, dir)) > tol * norm(dir)) return std::nullopt;
        const double sa = dot(ap, dir) / dot(dir, dir);
        const double sb = dot(b - p, dir) / dot(dir, dir);
        const double lo = std::min(sa, sb), hi = std::max(sa, sb);
        if (hi < 0.0) return std::nullopt;
        return std::max(lo, 0.0);
    }
    const double s = cross(ap, e) / denom;
    const double u = cross(ap, dir) / denom;
    const double len = norm(e);
    const double utol = len > 0.0 ? tol / len : 0.0;
    if (u < -utol || u > 1.0 + utol || s < -tol) return std::nullopt;
    return std::max(s, 0.0);
}

Point2 axis_vector(AxisDirection dir) {
    switch (dir) {
        case AxisDirection::XMinus: return {-1.0, 0.0};
        case AxisDirection::XPlus: return {1.0, 0.0};
        case AxisDirection::YMinus: return {0.0, -1.0};
        case AxisDirection::YPlus: return {0.0, 1.0};
    }
    return {};
}

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    auto orient = [](const Point2& p, const Point2& q, const Point2& r) { return cross(q - p, r - p); };
    const double o1 = orient(a, b, c), o2 = orient(a, b, d);
    const double o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
        return true;
    }
    auto on_seg = [](const Point2& p, const Point2& q, const Point2& r) {
        return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
               r.y <= std::max(p.y, q.y);
    };
    if (o1 == 0 && on_seg(a, b, c)) return true;
    if (o2 == 0 && on_seg(a, b, d)) return true;
    if (o3 == 0 && on_seg(c, d, a)) return true;
    if (o4 == 0 && on_seg(c, d, b)) return true;
    return false;
}

std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(
    const std::vector<Point2>& poly) {
    const std::size_t n = poly.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto xmin = [&](std::size_t i) { return std::min(poly[i].x, poly[(i + 1) % n].x); };
    auto xmax = [&](std::size_t i) { return std::max(poly[i].x, poly[(i + 1) % n].x); };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xmin(a) < xmin(b); });
    for (std::size_t oi = 0; oi < n; ++oi) {
        const std::size_t i = order[oi];
        for (std::size_t oj = oi + 1; oj < n && xmin(order[oj]) <= xmax(i); ++oj) {
            const std::size_t j = order[oj];
            const bool adjacent = (j == (i + 1) % n) || (i == (j + 1) % n);
            if (adjacent) continue;
            if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
                return std::make_pair(i, j);
            }
        }
    }
    return std::nullopt;
}

std::vector<Point2> drop_collinear(const std::vector<Point2>& poly, double tol) {
    std::vector<Point2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& prev = poly[(i + n - 1) % n];
        const Point2& next = poly[(i + 1) % n];
        if (distance_to_segment(poly[i], prev, next) > tol) out.push_back(poly[i]);
    }
    return out;
}

bool passes_semiconvex_rays(const std::vector<Point2>& poly, double tol, double diam) {
    const std::size_t n = poly.size();
    const double eps = 1e-6 * diam;
    std::vector<Point2> samples;
    samples.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        samples.push_back(poly[i]);
        samples.push_back((poly[i] + poly[(i + 1) % n]) * 0.5);
    }
    const AxisDirection dirs[4] = {AxisDirection::XMinus, AxisDirection::XPlus, AxisDirection::YMinus,
                                   AxisDirection::YPlus};
    for (const auto& p : samples) {
        for (auto d : dirs) {
            const Point2 v = axis_vector(d);
            if (locate_in_polygon(poly, p + v * eps, 0.25 * eps) != Containment::Outside) continue;
            for (std::size_t i = 0; i < n; ++i) {
                auto s = ray_hit(p, v, poly[i], poly[(i + 1) % n], tol);
                if (s && *s > 2.0 * eps) return false;
            }
        }
    }
    return true;
}

}  // namespace

ShapeClass classify_polygon(const std::vector<Point2>& ccw_polygon, double tol) {
    const auto poly = drop_collinear(ccw_polygon, tol);
    if (poly.size() < 3) return ShapeClass::Unsupported;
    const std::size_t n = poly.size();
    if (n == 4) {
        bool axis = true;
        for (std::size_t i = 0; i < n && axis; ++i) {
            const Point2 e = poly[(i + 1) % n] - poly[i];
            axis = std::abs(e.x) <= tol || std::abs(e.y) <= tol;
        }
        if (axis) return ShapeClass::Rectangle;
    }
    bool convex = true;
    for (std::size_t i = 0; i < n && convex; ++i) {
        const Point2 e1 = poly[(i + 1) % n] - poly[i];
        const Point2 e2 = poly[(i + 2) % n] - poly[(i + 1) % n];
        convex = cross(e1, e2) >= -tol * (norm(e1) + norm(e2));
    }
    if (convex) return ShapeClass::Convex;
    const Rectangle bb = Rectangle::bounding(poly);
    if (passes_semiconvex_rays(poly, tol, bb.diameter())) return ShapeClass::SemiConvex;
    return ShapeClass::Unsupported;
}

DomainSpec make_domain(const BoundaryCurve& boundary, double tol_geom) {
    if (boundary.segments.empty()) throw Error(ErrorCode::OpenCurve, "boundary has no segments");

    // coarse pass fixes the scale for the default tolerance
    std::vector<Point2> coarse;
    for (const auto& s : boundary.segments) {
        for (int i = 0; i <= 64; ++i) coarse.push_back(s.at(s.t0 + (s.t1 - s.t0) * i / 64.0));
    }
    const double diam = Rectangle::bounding(coarse).diameter();
    const double tol = tol_geom > 0.0 ? tol_geom : kDefaultRelTolGeom * std::max(diam, 1e-300);
    const double close_tol = std::max(tol, 1e-9 * diam);

    const std::size_t m = boundary.segments.size();
    for (std::size_t j = 0; j < m; ++j) {
        const Point2 e = boundary.segments[j].end();
        const Point2 s = boundary.segments[(j + 1) % m].start();
        if (norm(e - s) > close_tol) {
            std::ostringstream os;
            os << "segment " << j << " ends at (" << e.x << ", " << e.y << ") but segment "
               << (j + 1) % m << " starts at (" << s.x << ", " << s.y << ")";
            throw Error(ErrorCode::OpenCurve, os.str());
        }
    }

    std::vector<Point2> poly;
    for (const auto& s : boundary.segments) {
        auto pts = s.discretize(std::max(tol, kChordRelTol * diam));
        pts.pop_back();
        for (const auto& p : pts) {
            if (poly.empty() || norm(poly.back() - p) > tol) poly.push_back(p);
        }
    }
    while (poly.size() > 1 && norm(poly.back() - poly.front()) <= tol) poly.pop_back();
    if (poly.size() < 3) throw Error(ErrorCode::OpenCurve, "boundary encloses no area");

    DomainSpec d;
    d.boundary = boundary;
    if (signed_area(poly) < 0.0) {
        std::reverse(poly.begin(), poly.end());
        d.boundary = boundary.reversed();
    }
    if (auto hit = find_self_intersection(poly)) {
        std::ostringstream os;
        os << "polygon edges " << hit->first << " and " << hit->second << " intersect";
        throw Error(ErrorCode::SelfIntersection, os.str());
    }
    d.polygon = std::move(poly);
    d.bbox = Rectangle::bounding(d.polygon);
    d.tol_geom = tol;
    d.shape_class = classify_polygon(d.polygon, tol);
    return d;
}

DomainSpec make_polygon_domain(const std::vector<Point2>& vertices, double tol_geom) {
    return make_domain(BoundaryCurve::from_polygon(vertices), tol_geom);
}

DomainSpec make_rectangle_domain(const Rectangle& r, double tol_geom) {
    return make_polygon_domain({{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}}, tol_geom);
}

ShapeClass classify_domain(const BoundaryCurve& boundary) { return make_domain(boundary).shape_class; }

std::optional<Point2> project_to_polygon(const std::vector<Point2>& polygon, const Point2& p,
                                         AxisDirection dir, double tol) {
    const Point2 v = axis_vector(dir);
    std::optional<double> best;
    for (std::size_t i = 0, n = polygon.size(); i < n; ++i) {
        auto s = ray_hit(p, v, polygon[i], polygon[(i + 1) % n], tol);
        if (s && (!best || *s < *best)) best = s;
    }
    if (!best) return std::nullopt;
    return p + v * *best;
}

std::optional<Point2> project(const DomainSpec& domain, const Point2& p, AxisDirection dir) {
    return project_to_polygon(domain.polygon, p, dir, domain.tol_geom);
}

// ---------------------------------------------------------------- monotone arcs

double refine_extremum(const std::function<double(double)>& g, double lo, double hi, bool is_max,
                       double tol_t) {
    const double sign = is_max ? 1.0 : -1.0;
    const double delta = std::max(1e-7 * (hi - lo), 1e-13);
    auto slope = [&](double t) { return sign * (g(t + delta) - g(t - delta)); };
    double a = lo, b = hi;
    if (slope(a) > 0.0 && slope(b) < 0.0) {
        while (b - a > tol_t) {
            const double mid = 0.5 * (a + b);
            if (slope(mid) > 0.0) a = mid;
            else b = mid;
        }
        return 0.5 * (a + b);
    }
    // golden section when the derivative bracket is not clean
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = sign * g(c), fd = sign * g(d);
    while (b - a > tol_t) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - phi * (b - a);
            fc = sign * g(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + phi * (b - a);
            fd = sign * g(d);
        }
    }
    return 0.5 * (a + b);
}

std::vector<MonotoneArc> segment_boundary(const MapSpec& map, const BoundaryCurve& boundary,
                                          int samples_per_segment, int max_arcs, double tol_t) {
    if (samples_per_segment < 2) throw Error(ErrorCode::ConfigError, "samples_per_segment must be >= 2");

    // value scale for the "constant" band
    double vscale = 0.0;
    for (const auto& s : boundary.segments) {
        for (int i = 0; i <= 8; ++i) vscale = std::max(vscale, std::abs(map(s.at(s.t0 + (s.t1 - s.t0) * i / 8.0))));
    }
    const double ftol = 1e-12 * std::max(vscale, 1.0);

    auto classify = [&](double fa, double fb) {
        if (fb - fa > ftol) return FDirection::Increasing;
        if (fa - fb > ftol) return FDirection::Decreasing;
        return FDirection::Constant;
    };

    std::vector<MonotoneArc> arcs;
    for (std::size_t si = 0; si < boundary.segments.size(); ++si) {
        const auto& seg = boundary.segments[si];
        auto f = [&](double t) { return map(seg.at(std::clamp(t, seg.t0, seg.t1))); };
        const int n = samples_per_segment;
        std::vector<double> ts(n + 1), fs(n + 1);
        for (int i = 0; i <= n; ++i) {
            ts[i] = seg.t0 + (seg.t1 - seg.t0) * i / n;
            fs[i] = f(ts[i]);
            if (!std::isfinite(fs[i])) throw Error(ErrorCode::NonFiniteValue, "F o r is not finite on the boundary");
        }
        std::vector<double> cuts{seg.t0};
        auto sign_of = [&](double d) { return d > ftol ? 1 : (d < -ftol ? -1 : 0); };
        // a turning point inside the first or last sample interval leaves no
        // trace in the sampled differences; compare with the slope at the ends
        const double delta = 1e-7 * (seg.t1 - seg.t0);
        const int s_start = sign_of(f(seg.t0 + delta) - fs[0]);
        const int s_end = sign_of(fs[n] - f(seg.t1 - delta));
        int first_sign = 0, final_sign = 0;
        for (int i = 0; i < n && first_sign == 0; ++i) first_sign = sign_of(fs[i + 1] - fs[i]);
        for (int i = n - 1; i >= 0 && final_sign == 0; --i) final_sign = sign_of(fs[i + 1] - fs[i]);
        if (s_start != 0 && first_sign != 0 && s_start != first_sign) {
            const double t = refine_extremum(f, ts[0], ts[1], s_start > 0, tol_t * (seg.t1 - seg.t0));
            if (t > seg.t0) cuts.push_back(t);
        }
        std::optional<double> tail_cut;
        if (s_end != 0 && final_sign != 0 && s_end != final_sign) {
            tail_cut = refine_extremum(f, ts[n - 1], ts[n], final_sign > 0, tol_t * (seg.t1 - seg.t0));
        }
        int last_sign = 0;
        int last_idx = 0;
        for (int i = 0; i < n; ++i) {
            const double d = fs[i + 1] - fs[i];
            const int sgn = d > ftol ? 1 : (d < -ftol ? -1 : 0);
            if (sgn == 0) continue;
            if (last_sign != 0 && sgn != last_sign) {
                // extremum between ts[last_idx] and ts[i+1]
                const double t = refine_extremum(f, ts[last_idx], ts[i + 1], last_sign > 0,
                                                 tol_t * (seg.t1 - seg.t0));
                if (t > cuts.back()) cuts.push_back(t);
            }
            last_sign = sgn;
            last_idx = i;
        }
        if (tail_cut && *tail_cut > cuts.back() && *tail_cut < seg.t1) cuts.push_back(*tail_cut);
        cuts.push_back(seg.t1);

        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            MonotoneArc arc;
            arc.segment = static_cast<int>(si);
            arc.a = cuts[k];
            arc.b = cuts[k + 1];
            arc.f_direction = classify(f(arc.a), f(arc.b));
            const Point2 pa = seg.at(arc.a), pb = seg.at(arc.b);
            const double gt = 1e-12 * std::max(1.0, norm(pa) + norm(pb));
            const double dx = pb.x - pa.x, dy = pb.y - pa.y;
            if (std::abs(dy) <= gt) arc.geometric_case = GeometricCase::Horizontal;
            else if (std::abs(dx) <= gt) arc.geometric_case = GeometricCase::Vertical;
            else if (dx > 0 && dy > 0) arc.geometric_case = GeometricCase::RightUp;
            else if (dx < 0 && dy > 0) arc.geometric_case = GeometricCase::LeftUp;
            else if (dx < 0) arc.geometric_case = GeometricCase::LeftDown;
            else arc.geometric_case = GeometricCase::RightDown;
            arcs.push_back(arc);
        }
    }

    // a single closed curve starts mid-arc; glue the wrap-around pieces
    if (boundary.segments.size() == 1 && arcs.size() >= 2) {
        const auto& first = arcs.front();
        const auto& last = arcs.back();
        if (first.f_direction == last.f_direction) {
            MonotoneArc merged = last;
            merged.b = last.b + (first.b - first.a);  // continues past t1 into the next lap
            arcs.back() = merged;
            arcs.erase(arcs.begin());
        }
    }

    if (static_cast<int>(arcs.size()) > max_arcs) {
        std::ostringstream os;
        os << arcs.size() << " monotone pieces exceed max_arcs = " << max_arcs;
        throw Error(ErrorCode::TooManyOscillations, os.str());
    }
    return arcs;
}

}  // namespace monomap
