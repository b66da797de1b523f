#include "monomap/extension.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <limits>
#include <sstream>

#include "monomap/error.hpp"

namespace monomap {

std::string to_string(RuleKind r) {
    switch (r) {
        case RuleKind::BaseMap: return "BaseMap";
        case RuleKind::RayConstXMinus: return "RayConstX-";
        case RuleKind::RayConstXPlus: return "RayConstX+";
        case RuleKind::RayConstYMinus: return "RayConstY-";
        case RuleKind::RayConstYPlus: return "RayConstY+";
        case RuleKind::MinOfTwo: return "MinOfTwo";
        case RuleKind::MaxOfTwo: return "MaxOfTwo";
        case RuleKind::Graft: return "Graft";
        case RuleKind::ReverseGraft: return "ReverseGraft";
        case RuleKind::LinearSector: return "LinearSector";
    }
    return "?";
}

std::string to_string(Corner c) {
    switch (c) {
        case Corner::LowerRight: return "LowerRight";
        case Corner::UpperRight: return "UpperRight";
        case Corner::UpperLeft: return "UpperLeft";
        case Corner::LowerLeft: return "LowerLeft";
    }
    return "?";
}

namespace detail {

// A ray box under one monotone arc of a boundary chain.
struct Box {
    RuleKind rule = RuleKind::RayConstXMinus;
    FDirection dir = FDirection::Constant;
    std::vector<Point2> arc;        // working frame
    std::vector<Point2> arc_canon;  // canonical frame, x and y non-decreasing
};

// One corner of bbox \ Ω in its canonical frame: the chain P_0..P_k runs with
// x and y non-decreasing and the region lies below and to the right of it.
// Box j spans [x_{j-1},x_j] x [y_{j-1},y_j]; cell (i,j) spans
// [x_i,x_{i+1}] x [y_{j-1},y_j] for 1 <= j <= i <= k-1.
struct CornerGrid {
    Corner corner = Corner::LowerRight;
    std::vector<Point2> P;
    std::vector<Box> boxes;    // boxes[j-1] is box j
    std::vector<double> node;  // value at (x_i, y_j), i >= j, stored at i*(k+1)+j
    RuleKind cell_rule = RuleKind::MinOfTwo;
    std::vector<int> box_piece;   // piece index per box, -1 if degenerate
    std::vector<int> cell_piece;  // piece index per cell (i*(k+1)+j), -1 if absent

    int k() const { return static_cast<int>(P.size()) - 1; }
    double x(int i) const { return P[i].x; }
    double y(int j) const { return P[j].y; }
    double N(int i, int j) const { return node[static_cast<std::size_t>(i) * (k() + 1) + j]; }
};

struct PieceRef {
    int grid = 0;
    bool box = true;
    int i = 0;  // column for cells, box index j for boxes
    int j = 0;
};

struct ExtensionImpl {
    MapSpec work;  // (down, up)
    std::vector<Point2> poly;
    Rectangle bbox;  // working frame
    double tol = 0.0;
    bool swapped = false;
    std::vector<CornerGrid> grids;
    std::vector<PieceRef> refs;
    std::vector<double> offsets;
};

}  // namespace detail

namespace {

using detail::Box;
using detail::CornerGrid;
using detail::ExtensionImpl;

Point2 to_canon(Corner c, const Point2& p) {
    switch (c) {
        case Corner::LowerRight: return p;
        case Corner::UpperRight: return {p.x, -p.y};
        case Corner::UpperLeft: return {-p.x, -p.y};
        case Corner::LowerLeft: return {-p.x, p.y};
    }
    return p;
}
// every canonical transform is an involution
Point2 from_canon(Corner c, const Point2& q) { return to_canon(c, q); }

bool chain_reversed(Corner c) { return c == Corner::UpperRight || c == Corner::LowerLeft; }

double combine(RuleKind rule, double a, double b, double anchor) {
    switch (rule) {
        case RuleKind::MinOfTwo: return std::min(a, b);
        case RuleKind::MaxOfTwo: return std::max(a, b);
        default: return a + b - anchor;
    }
}

// Along a polyline monotone in one coordinate, the other coordinate at `v`.
// by_y selects interpolation in y (returns x).
double interp_arc(const std::vector<Point2>& arc, double v, bool by_y) {
    auto key = [by_y](const Point2& p) { return by_y ? p.y : p.x; };
    auto other = [by_y](const Point2& p) { return by_y ? p.x : p.y; };
    const bool inc = key(arc.back()) >= key(arc.front());
    const double lo = std::min(key(arc.front()), key(arc.back()));
    const double hi = std::max(key(arc.front()), key(arc.back()));
    v = std::clamp(v, lo, hi);
    std::size_t a = 0, b = arc.size() - 1;
    while (b - a > 1) {
        const std::size_t m = (a + b) / 2;
        const bool left = inc ? key(arc[m]) >= v : key(arc[m]) <= v;
        if (left) b = m;
        else a = m;
    }
    const double ka = key(arc[a]), kb = key(arc[b]);
    if (kb == ka) return other(arc[a]);
    const double s = std::clamp((v - ka) / (kb - ka), 0.0, 1.0);
    return other(arc[a]) + (other(arc[b]) - other(arc[a])) * s;
}

double box_value(const ExtensionImpl& im, const Box& box, const Point2& p) {
    switch (box.rule) {
        case RuleKind::RayConstXMinus:
        case RuleKind::RayConstXPlus: return im.work(interp_arc(box.arc, p.y, true), p.y);
        default: return im.work(p.x, interp_arc(box.arc, p.x, false));
    }
}

double box_value_canon(const ExtensionImpl& im, const CornerGrid& g, int j, const Point2& q) {
    return box_value(im, g.boxes[j - 1], from_canon(g.corner, q));
}

// V(x_i, y) for y in [y_{j-1}, y_j]
double left_value(const ExtensionImpl& im, const CornerGrid& g, int i, int j, double y) {
    double v = box_value_canon(im, g, j, {g.x(j), y});
    for (int m = j + 1; m <= i; ++m) v = combine(g.cell_rule, v, g.N(m, j), g.N(m - 1, j));
    return v;
}

// V(x, y_j) for x in [x_i, x_{i+1}]
double top_value(const ExtensionImpl& im, const CornerGrid& g, int i, int j, double x) {
    double v = box_value_canon(im, g, i + 1, {x, g.y(i)});
    for (int m = i - 1; m >= j; --m) v = combine(g.cell_rule, g.N(i, m), v, g.N(i, m + 1));
    return v;
}

double cell_value(const ExtensionImpl& im, const CornerGrid& g, int i, int j, const Point2& q) {
    return combine(g.cell_rule, left_value(im, g, i, j, q.y), top_value(im, g, i, j, q.x), g.N(i, j));
}

double piece_offset(const ExtensionImpl& im, int piece) {
    return piece >= 0 && !im.offsets.empty() ? im.offsets[piece] : 0.0;
}

// Evaluation in the working frame. p is located after clamping to the bbox;
// unclaimed points (Ω and its tolerance band) get F at the unclamped point.
double eval_work(const ExtensionImpl& im, const Point2& raw) {
    const Point2 p = im.bbox.clamp(raw);
    for (const auto& g : im.grids) {
        const int k = g.k();
        if (k <= 0) continue;
        const Point2 q = to_canon(g.corner, p);
        if (q.x < g.x(0) - im.tol || q.x > g.x(k) + im.tol || q.y < g.y(0) - im.tol || q.y > g.y(k) + im.tol) {
            continue;
        }
        // row: first j with y_j >= q.y
        int j = 1;
        {
            int lo = 1, hi = k;
            while (lo < hi) {
                const int mid = (lo + hi) / 2;
                if (g.y(mid) >= q.y) hi = mid;
                else lo = mid + 1;
            }
            j = lo;
        }
        if (q.x <= g.x(j) || j == k) {
            const Box& box = g.boxes[j - 1];
            const double xa = box.arc_canon.size() >= 2 && box.arc_canon.front().y != box.arc_canon.back().y
                                  ? interp_arc(box.arc_canon, q.y, true)
                                  : g.x(j);
            if (q.x <= xa + im.tol) continue;  // not in this corner; the corner boxes overlap
            return box_value(im, box, p) + piece_offset(im, g.box_piece[j - 1]);
        }
        // column: last i in [j, k-1] with x_i <= q.x
        int lo = j, hi = k - 1;
        while (lo < hi) {
            const int mid = (lo + hi + 1) / 2;
            if (g.x(mid) <= q.x) lo = mid;
            else hi = mid - 1;
        }
        const int i = lo;
        if (i == j) {
            // the cell's top or left edge can be a flat boundary edge
            const bool flat_above = g.y(j + 1) == g.y(j);
            const bool flat_left = g.x(j - 1) == g.x(j);
            if ((flat_above && q.y >= g.y(j) - im.tol) || (flat_left && q.x <= g.x(j) + im.tol)) continue;
        }
        return cell_value(im, g, i, j, q) + piece_offset(im, g.cell_piece[static_cast<std::size_t>(i) * (k + 1) + j]);
    }
    return im.work(im.bbox.contains(raw, im.tol) ? raw : p);
}

struct ChainArc {
    std::vector<Point2> pts;
    FDirection dir = FDirection::Constant;
    bool flat = false;  // horizontal or vertical
    bool horizontal = false;
};

FDirection join(FDirection a, FDirection b) { return a == FDirection::Constant ? b : a; }

bool compatible(FDirection a, FDirection b) {
    return a == b || a == FDirection::Constant || b == FDirection::Constant;
}

// Monotone arcs along the vertex path poly[s] -> poly[e] (counterclockwise).
std::vector<ChainArc> chain_arcs(const MapSpec& work, const std::vector<Point2>& poly, std::size_t s,
                                 std::size_t e, const ExtensionOptions& opts, double ftol) {
    const std::size_t n = poly.size();
    BoundaryCurve path;
    for (std::size_t m = s; m != e; m = (m + 1) % n) {
        path.segments.push_back(ParamSegment::line(poly[m], poly[(m + 1) % n]));
    }
    if (path.segments.empty()) return {};
    const auto arcs = segment_boundary(work, path, opts.samples_per_edge, INT_MAX, opts.tol_t);

    std::vector<ChainArc> out;
    for (const auto& a : arcs) {
        const auto& seg = path.segments[a.segment];
        ChainArc c;
        c.pts = {seg.at(a.a), seg.at(a.b)};
        const double df = work(c.pts[1]) - work(c.pts[0]);
        c.dir = df > ftol ? FDirection::Increasing : (df < -ftol ? FDirection::Decreasing : FDirection::Constant);
        c.flat = a.geometric_case == GeometricCase::Horizontal || a.geometric_case == GeometricCase::Vertical;
        c.horizontal = a.geometric_case == GeometricCase::Horizontal;
        if (!out.empty() && !out.back().flat && !c.flat && compatible(out.back().dir, c.dir)) {
            out.back().pts.push_back(c.pts[1]);
            out.back().dir = join(out.back().dir, c.dir);
        } else {
            out.push_back(std::move(c));
        }
    }
    if (static_cast<int>(out.size()) > opts.max_arcs) {
        std::ostringstream os;
        os << out.size() << " monotone arcs on one boundary chain exceed max_arcs = " << opts.max_arcs;
        throw Error(ErrorCode::TooManyOscillations, os.str());
    }
    return out;
}

RuleKind box_rule(Corner c, const ChainArc& arc) {
    if (arc.flat) {
        const bool below = c == Corner::LowerRight || c == Corner::LowerLeft;
        const bool right = c == Corner::LowerRight || c == Corner::UpperRight;
        if (arc.horizontal) return below ? RuleKind::RayConstYPlus : RuleKind::RayConstYMinus;
        return right ? RuleKind::RayConstXMinus : RuleKind::RayConstXPlus;
    }
    auto conflict = [&]() {
        std::ostringstream os;
        os << "f is " << to_string(arc.dir) << " along the " << to_string(c) << " boundary arc from ("
           << arc.pts.front().x << ", " << arc.pts.front().y << ") to (" << arc.pts.back().x << ", "
           << arc.pts.back().y << "), impossible for the declared signature";
        throw Error(ErrorCode::MonotonicityConflict, os.str());
    };
    switch (c) {
        case Corner::LowerRight:
            return arc.dir == FDirection::Decreasing ? RuleKind::RayConstYPlus : RuleKind::RayConstXMinus;
        case Corner::UpperLeft:
            return arc.dir == FDirection::Increasing ? RuleKind::RayConstYMinus : RuleKind::RayConstXPlus;
        case Corner::UpperRight:
            if (arc.dir == FDirection::Decreasing) conflict();
            return RuleKind::RayConstXMinus;
        case Corner::LowerLeft:
            if (arc.dir == FDirection::Increasing) conflict();
            return RuleKind::RayConstXPlus;
    }
    return RuleKind::RayConstXMinus;
}

std::vector<Point2> ccw(std::vector<Point2> pts) {
    if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());
    return pts;
}

Corner unswap(Corner c) {
    if (c == Corner::LowerRight) return Corner::UpperLeft;
    if (c == Corner::UpperLeft) return Corner::LowerRight;
    return c;
}

RuleKind unswap(RuleKind r) {
    switch (r) {
        case RuleKind::RayConstXMinus: return RuleKind::RayConstYMinus;
        case RuleKind::RayConstXPlus: return RuleKind::RayConstYPlus;
        case RuleKind::RayConstYMinus: return RuleKind::RayConstXMinus;
        case RuleKind::RayConstYPlus: return RuleKind::RayConstXPlus;
        default: return r;
    }
}

std::vector<Point2> unswap(const std::vector<Point2>& pts) { return swap_polygon(pts); }

void require_mixed(const MapSpec& map) {
    if (!map.signature.is_mixed()) {
        throw Error(ErrorCode::NotMixedMonotone,
                    "extension needs a mixed-monotone map, got " + to_string(map.signature));
    }
}

Rectangle target_rect(const DomainSpec& domain, const ExtensionOptions& opts) {
    if (!opts.rect) return domain.bbox;
    const Rectangle& r = *opts.rect;
    const double t = domain.tol_geom;
    if (r.x0 > domain.bbox.x0 + t || r.x1 < domain.bbox.x1 - t || r.y0 > domain.bbox.y0 + t ||
        r.y1 < domain.bbox.y1 - t) {
        throw Error(ErrorCode::ConfigError, "extension rectangle must contain the bounding box of the domain");
    }
    return r;
}

ExtendedMap build(const MapSpec& map, const DomainSpec& domain, const ExtensionOptions& opts) {
    require_mixed(map);
    auto im = std::make_shared<ExtensionImpl>();
    im->swapped = map.signature.is_up_down();
    im->work = im->swapped ? map.swapped() : map;
    im->poly = im->swapped ? swap_polygon(domain.polygon) : domain.polygon;
    im->bbox = im->swapped ? domain.bbox.swapped() : domain.bbox;
    im->tol = domain.tol_geom;

    ExtendedMap ext;
    ext.base = map;
    ext.domain = domain;
    ext.rect = target_rect(domain, opts);
    ext.nice = opts.nice;
    ext.swapped = im->swapped;

    const auto& poly = im->poly;
    const std::size_t n = poly.size();
    const Rectangle& bb = im->bbox;
    const double tol = im->tol;

    double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
    for (const auto& v : poly) {
        const double f = im->work(v);
        if (!std::isfinite(f)) throw Error(ErrorCode::NonFiniteValue, "map is not finite at a boundary vertex");
        fmin = std::min(fmin, f);
        fmax = std::max(fmax, f);
    }
    const double ftol = 1e-9 * std::max(fmax - fmin, 1e-300);

    // extreme vertices, picked so each chain runs between them counterclockwise
    auto pick = [&](auto on_side, auto better) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!on_side(poly[i])) continue;
            if (best == n || better(poly[i], poly[best])) best = i;
        }
        return best;
    };
    auto bottom = [&](const Point2& p) { return p.y <= bb.y0 + tol; };
    auto top = [&](const Point2& p) { return p.y >= bb.y1 - tol; };
    auto left = [&](const Point2& p) { return p.x <= bb.x0 + tol; };
    auto right = [&](const Point2& p) { return p.x >= bb.x1 - tol; };
    auto more_x = [](const Point2& a, const Point2& b) { return a.x > b.x; };
    auto less_x = [](const Point2& a, const Point2& b) { return a.x < b.x; };
    auto more_y = [](const Point2& a, const Point2& b) { return a.y > b.y; };
    auto less_y = [](const Point2& a, const Point2& b) { return a.y < b.y; };

    const std::size_t bottom_right = pick(bottom, more_x), bottom_left = pick(bottom, less_x);
    const std::size_t right_bottom = pick(right, less_y), right_top = pick(right, more_y);
    const std::size_t top_right = pick(top, more_x), top_left = pick(top, less_x);
    const std::size_t left_top = pick(left, more_y), left_bottom = pick(left, less_y);

    struct ChainDef {
        Corner corner;
        std::size_t s, e;
    };
    const ChainDef chains[4] = {{Corner::LowerRight, bottom_right, right_bottom},
                                {Corner::UpperRight, right_top, top_right},
                                {Corner::UpperLeft, top_left, left_top},
                                {Corner::LowerLeft, left_bottom, bottom_left}};

    for (const auto& cd : chains) {
        CornerGrid g;
        g.corner = cd.corner;
        auto arcs = chain_arcs(im->work, poly, cd.s, cd.e, opts, ftol);
        if (arcs.empty()) continue;

        std::vector<Box> boxes;
        for (const auto& a : arcs) {
            Box b;
            b.rule = box_rule(cd.corner, a);
            b.dir = a.dir;
            b.arc = a.pts;
            for (const auto& p : a.pts) b.arc_canon.push_back(to_canon(cd.corner, p));
            if (chain_reversed(cd.corner)) std::reverse(b.arc_canon.begin(), b.arc_canon.end());
            boxes.push_back(std::move(b));
        }
        if (chain_reversed(cd.corner)) std::reverse(boxes.begin(), boxes.end());
        g.P.push_back(boxes.front().arc_canon.front());
        for (const auto& b : boxes) g.P.push_back(b.arc_canon.back());
        g.boxes = std::move(boxes);

        if (!opts.nice) g.cell_rule = RuleKind::Graft;
        else if (cd.corner == Corner::LowerRight) g.cell_rule = RuleKind::MinOfTwo;
        else if (cd.corner == Corner::UpperLeft) g.cell_rule = RuleKind::MaxOfTwo;
        else if (cd.corner == Corner::UpperRight) g.cell_rule = RuleKind::Graft;
        else g.cell_rule = RuleKind::ReverseGraft;

        const int k = g.k();
        g.node.assign(static_cast<std::size_t>(k + 1) * (k + 1), 0.0);
        auto N = [&](int i, int j) -> double& { return g.node[static_cast<std::size_t>(i) * (k + 1) + j]; };
        for (int i = 0; i <= k; ++i) N(i, i) = im->work(from_canon(g.corner, g.P[i]));
        for (int j = 0; j + 1 <= k; ++j) N(j + 1, j) = box_value_canon(*im, g, j + 1, {g.x(j + 1), g.y(j)});
        for (int j = k - 2; j >= 0; --j) {
            for (int i = j + 2; i <= k; ++i) N(i, j) = combine(g.cell_rule, N(i - 1, j), N(i, j + 1), N(i - 1, j + 1));
        }
        im->grids.push_back(std::move(g));
    }

    // piece list in the caller's frame
    auto out_pts = [&](std::vector<Point2> pts) { return im->swapped ? unswap(pts) : ccw(std::move(pts)); };
    auto out_pt = [&](const Point2& p) { return im->swapped ? p.swapped() : p; };
    for (std::size_t gi = 0; gi < im->grids.size(); ++gi) {
        auto& g = im->grids[gi];
        const int k = g.k();
        g.box_piece.assign(k, -1);
        g.cell_piece.assign(static_cast<std::size_t>(k + 1) * (k + 1), -1);
        const double area_tol = 1e-14 * std::max(1.0, bb.area());
        for (int j = 1; j <= k; ++j) {
            const Box& b = g.boxes[j - 1];
            std::vector<Point2> region;
            for (const auto& q : b.arc_canon) region.push_back(from_canon(g.corner, q));
            region.push_back(from_canon(g.corner, {g.x(j), g.y(j - 1)}));
            region = ccw(region);
            if (std::abs(signed_area(region)) <= area_tol) continue;
            ExtensionPiece piece;
            piece.rule = im->swapped ? unswap(b.rule) : b.rule;
            piece.region = out_pts(region);
            piece.corner = im->swapped ? unswap(g.corner) : g.corner;
            piece.is_box = true;
            piece.arc = b.arc;
            if (im->swapped) {
                for (auto& p : piece.arc) p = p.swapped();
            }
            piece.f_direction = b.dir;
            g.box_piece[j - 1] = static_cast<int>(ext.pieces.size());
            im->refs.push_back({static_cast<int>(gi), true, j, j});
            ext.pieces.push_back(std::move(piece));
        }
        for (int j = k - 1; j >= 1; --j) {
            for (int i = j; i <= k - 1; ++i) {
                if (g.x(i + 1) - g.x(i) <= 0.0 || g.y(j) - g.y(j - 1) <= 0.0) continue;
                std::vector<Point2> region = {from_canon(g.corner, {g.x(i), g.y(j - 1)}),
                                              from_canon(g.corner, {g.x(i + 1), g.y(j - 1)}),
                                              from_canon(g.corner, {g.x(i + 1), g.y(j)}),
                                              from_canon(g.corner, {g.x(i), g.y(j)})};
                region = ccw(region);
                ExtensionPiece piece;
                piece.rule = g.cell_rule;
                piece.region = out_pts(region);
                piece.corner = im->swapped ? unswap(g.corner) : g.corner;
                piece.is_box = false;
                piece.anchor = out_pt(from_canon(g.corner, {g.x(i), g.y(j)}));
                piece.anchor_value = g.N(i, j);
                g.cell_piece[static_cast<std::size_t>(i) * (k + 1) + j] = static_cast<int>(ext.pieces.size());
                im->refs.push_back({static_cast<int>(gi), false, i, j});
                ext.pieces.push_back(std::move(piece));
            }
        }
    }
    ext.impl = std::move(im);
    return ext;
}

}  // namespace

ExtendedMap extend_rectangle(const MapSpec& map, const Rectangle& rect) {
    const Rectangle& box = map.domain_box;
    const double t = 1e-12 * std::max(1.0, rect.diameter());
    if (box.width() > 0.0 && (rect.x0 < box.x0 - t || rect.x1 > box.x1 + t || rect.y0 < box.y0 - t ||
                              rect.y1 > box.y1 + t)) {
        throw Error(ErrorCode::ConfigError, "rectangle exceeds the map's domain box");
    }
    auto im = std::make_shared<ExtensionImpl>();
    im->work = map;
    im->poly = {{rect.x0, rect.y0}, {rect.x1, rect.y0}, {rect.x1, rect.y1}, {rect.x0, rect.y1}};
    im->bbox = rect;
    im->tol = kDefaultRelTolGeom * rect.diameter();
    ExtendedMap ext;
    ext.base = map;
    ext.domain = make_rectangle_domain(rect);
    ext.rect = rect;
    ext.impl = std::move(im);
    return ext;
}

ExtendedMap extend_convex(const MapSpec& map, const DomainSpec& domain, const ExtensionOptions& opts) {
    if (domain.shape_class != ShapeClass::Convex && domain.shape_class != ShapeClass::Rectangle) {
        throw Error(ErrorCode::UnsupportedDomain, "extend_convex needs a convex domain, got " +
                                                      to_string(domain.shape_class));
    }
    return build(map, domain, opts);
}

ExtendedMap extend_semiconvex(const MapSpec& map, const DomainSpec& domain, const ExtensionOptions& opts) {
    if (domain.shape_class == ShapeClass::Unsupported) {
        throw Error(ErrorCode::UnsupportedDomain, "domain is not semi-convex");
    }
    return build(map, domain, opts);
}

ExtendedMap extend(const MapSpec& map, const DomainSpec& domain, const ExtensionOptions& opts) {
    switch (domain.shape_class) {
        case ShapeClass::Rectangle:
            if (!opts.rect || *opts.rect == domain.bbox) return extend_rectangle(map, domain.bbox);
            return extend_convex(map, domain, opts);
        case ShapeClass::Convex: return extend_convex(map, domain, opts);
        case ShapeClass::SemiConvex: return extend_semiconvex(map, domain, opts);
        case ShapeClass::Unsupported: break;
    }
    throw Error(ErrorCode::UnsupportedDomain, "domain is neither convex nor semi-convex");
}

Rectangle square_hull(const Rectangle& r) {
    const double a = std::min(r.x0, r.y0), b = std::max(r.x1, r.y1);
    return {a, b, a, b};
}

double eval_extended(const ExtendedMap& ext, const Point2& p) {
    const auto& im = *ext.impl;
    if (!ext.rect.contains(p, im.tol)) {
        std::ostringstream os;
        os << "(" << p.x << ", " << p.y << ") lies outside the extension rectangle";
        throw Error(ErrorCode::OutsideRect, os.str());
    }
    const Point2 w = im.swapped ? p.swapped() : p;
    return eval_work(im, w);
}

double eval_piece(const ExtendedMap& ext, std::size_t index, const Point2& p) {
    const auto& im = *ext.impl;
    if (index >= im.refs.size()) throw Error(ErrorCode::ConfigError, "piece index out of range");
    const auto& ref = im.refs[index];
    const auto& g = im.grids[ref.grid];
    const Point2 w = im.bbox.clamp(im.swapped ? p.swapped() : p);
    const double off = piece_offset(im, static_cast<int>(index));
    if (ref.box) return box_value(im, g.boxes[ref.j - 1], w) + off;
    return cell_value(im, g, ref.i, ref.j, to_canon(g.corner, w)) + off;
}

MapSpec as_map(const ExtendedMap& ext) {
    MapSpec m;
    m.name = ext.base.name + "[extended]";
    m.signature = ext.base.signature;
    m.params = ext.base.params;
    m.param_names = ext.base.param_names;
    m.domain_box = ext.rect;
    auto keep = std::make_shared<ExtendedMap>(ext);
    m.eval = [keep](double x, double y, std::span<const double>) { return eval_extended(*keep, {x, y}); };
    return m;
}

ExtendedMap with_piece_offset(const ExtendedMap& ext, std::size_t index, double offset) {
    auto im = std::make_shared<ExtensionImpl>(*ext.impl);
    if (index >= im->refs.size()) throw Error(ErrorCode::ConfigError, "piece index out of range");
    im->offsets.assign(im->refs.size(), 0.0);
    im->offsets[index] = offset;
    ExtendedMap out = ext;
    out.impl = std::move(im);
    return out;
}

ExtensionAudit audit_extension(const ExtendedMap& ext, int grid_n) {
    if (grid_n < 3) throw Error(ErrorCode::ConfigError, "audit grid must be at least 3");
    ExtensionAudit a;
    a.nice_mode = ext.nice;
    const auto& poly = ext.domain.polygon;
    const double tol = ext.domain.tol_geom;
    const Rectangle& bb = ext.domain.bbox;

    // F over Ω: grid points of the bbox inside Ω, boundary samples and arc ends. Grid points in the
    // tolerance band just outside the polygon may take a neighbouring rule, so they are held to tol_cont
    // instead of exact agreement.
    std::vector<Point2> omega, band;
    for (int j = 0; j < grid_n; ++j) {
        for (int i = 0; i < grid_n; ++i) {
            const Point2 p{bb.x0 + bb.width() * i / (grid_n - 1), bb.y0 + bb.height() * j / (grid_n - 1)};
            const Containment where = locate_in_polygon(poly, p, tol);
            if (where == Containment::Inside) omega.push_back(p);
            else if (where == Containment::OnBoundary) band.push_back(p);
        }
    }
    for (std::size_t e = 0; e < poly.size(); ++e) {
        const Point2 p0 = poly[e], p1 = poly[(e + 1) % poly.size()];
        for (int s = 0; s < 16; ++s) omega.push_back(p0 + (p1 - p0) * (s / 16.0));
    }
    for (const auto& pc : ext.pieces) {
        for (const auto& p : pc.arc) omega.push_back(p);
    }
    a.f_min = std::numeric_limits<double>::infinity();
    a.f_max = -a.f_min;
    for (const auto& p : omega) {
        const double f = ext.base(p);
        const double g = eval_extended(ext, p);
        a.f_min = std::min(a.f_min, f);
        a.f_max = std::max(a.f_max, f);
        const double d = std::abs(g - f);
        if (d > a.c2_worst || (!a.c2_witness && d > 0.0)) {
            a.c2_worst = d;
            a.c2_witness = Witness{p, f, g, -1};
        }
    }
    bool exact = a.c2_worst == 0.0;
    const double f_lo = a.f_min, f_hi = a.f_max;
    const double band_tol = f_hi > f_lo ? 1e-7 * (f_hi - f_lo) : 1e-12;
    for (const auto& p : band) {
        const double f = ext.base(p);
        const double d = std::abs(eval_extended(ext, p) - f);
        a.f_min = std::min(a.f_min, f);
        a.f_max = std::max(a.f_max, f);
        if (d > band_tol) exact = false;
        if (d > a.c2_worst) {
            a.c2_worst = d;
            a.c2_witness = Witness{p, f, eval_extended(ext, p), -1};
        }
    }
    a.samples_c2 = static_cast<int>(omega.size() + band.size());
    a.c2 = exact;
    if (a.c2) a.c2_witness.reset();

    const double range = a.f_max - a.f_min;
    a.tol_cont = range > 0.0 ? 1e-7 * range : 1e-12;
    a.tol_range = range > 0.0 ? 1e-6 * range : 1e-12;

    // continuity: each piece's own rule on its boundary versus the located value
    for (std::size_t pi = 0; pi < ext.pieces.size(); ++pi) {
        const auto& reg = ext.pieces[pi].region;
        for (std::size_t e = 0; e < reg.size(); ++e) {
            const Point2 p0 = reg[e], p1 = reg[(e + 1) % reg.size()];
            for (int s = 0; s <= 8; ++s) {
                const Point2 p = p0 + (p1 - p0) * (s / 8.0);
                const double own = eval_piece(ext, pi, p);
                const double glob = eval_extended(ext, p);
                const double d = std::abs(own - glob);
                ++a.samples_c1;
                if (d > a.c1_worst) {
                    a.c1_worst = d;
                    a.c1_witness = Witness{p, glob, own, static_cast<int>(pi)};
                }
            }
        }
    }
    a.c1 = a.c1_worst <= a.tol_cont;
    if (a.c1_worst == 0.0) a.c1_witness.reset();

    a.monotonicity = check_monotonicity([&ext](double x, double y) { return eval_extended(ext, {x, y}); },
                                        ext.base.signature, ext.rect, grid_n);
    a.c3 = a.monotonicity.consistent();

    a.ext_min = a.monotonicity.value_min;
    a.ext_max = a.monotonicity.value_max;
    for (const auto& pc : ext.pieces) {
        for (const auto& p : pc.region) {
            const double v = eval_extended(ext, p);
            a.ext_min = std::min(a.ext_min, v);
            a.ext_max = std::max(a.ext_max, v);
        }
    }
    a.nice = ext.nice && a.ext_min >= a.f_min - a.tol_range && a.ext_max <= a.f_max + a.tol_range;

    double covered = std::abs(signed_area(poly));
    for (const auto& pc : ext.pieces) covered += std::abs(signed_area(pc.region));
    a.tiling_error = std::abs(covered - bb.area()) / bb.area();
    a.tiling = a.tiling_error <= 1e-6;
    return a;
}

double SectorFill::operator()(const Point2& p) const {
    const double x = std::clamp(p.x, x0, x1);
    const double lo = y_lower(x), hi = y_upper(x);
    if (hi - lo <= 0.0) return f_lower(x);
    const double s = std::clamp((p.y - lo) / (hi - lo), 0.0, 1.0);
    return (1.0 - s) * f_lower(x) + s * f_upper(x);
}

SectorFill make_linear_sector(double x0, double x1, std::function<double(double)> y_lower,
                              std::function<double(double)> y_upper, std::function<double(double)> f_lower,
                              std::function<double(double)> f_upper, const MonotoneSignature& signature, int n) {
    SectorFill fill{x0, x1, std::move(y_lower), std::move(y_upper), std::move(f_lower), std::move(f_upper)};
    if (n < 3) n = 3;
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    double vmin = ymin, vmax = -ymin;
    for (int i = 0; i < n; ++i) {
        const double x = x0 + (x1 - x0) * i / (n - 1);
        ymin = std::min(ymin, fill.y_lower(x));
        ymax = std::max(ymax, fill.y_upper(x));
        for (double v : {fill.f_lower(x), fill.f_upper(x)}) {
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    const double tol = 1e-9 * std::max(vmax - vmin, 1e-300);
    auto inside = [&](const Point2& p) {
        return p.y >= fill.y_lower(p.x) - 1e-12 && p.y <= fill.y_upper(p.x) + 1e-12;
    };
    auto violation = [&](const Point2& a, const Point2& b, bool along_x) {
        const double fa = fill(a), fb = fill(b);
        const Monotone m = along_x ? signature.first_arg : signature.second_arg;
        const double d = fb - fa;
        if ((m == Monotone::NonDecreasing && d < -tol) || (m == Monotone::NonIncreasing && d > tol)) {
            std::ostringstream os;
            os << "linear sector breaks the ordering between (" << a.x << ", " << a.y << ") -> " << fa << " and ("
               << b.x << ", " << b.y << ") -> " << fb;
            throw Error(ErrorCode::SectorOrderViolation, os.str());
        }
    };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Point2 p{x0 + (x1 - x0) * i / (n - 1), ymin + (ymax - ymin) * j / (n - 1)};
            if (!inside(p)) continue;
            if (i + 1 < n) {
                const Point2 q{x0 + (x1 - x0) * (i + 1) / (n - 1), p.y};
                if (inside(q)) violation(p, q, true);
            }
            if (j + 1 < n) {
                const Point2 q{p.x, ymin + (ymax - ymin) * (j + 1) / (n - 1)};
                if (inside(q)) violation(p, q, false);
            }
        }
    }
    return fill;
}

}  // namespace monomap
