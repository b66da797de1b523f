#include "monomap/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "monomap/error.hpp"

namespace monomap {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::StencilOutOfDomain: return "StencilOutOfDomain";
        case ErrorCode::OpenCurve: return "OpenCurve";
        case ErrorCode::SelfIntersection: return "SelfIntersection";
        case ErrorCode::TooManyOscillations: return "TooManyOscillations";
        case ErrorCode::UnsupportedDomain: return "UnsupportedDomain";
        case ErrorCode::MonotonicityConflict: return "MonotonicityConflict";
        case ErrorCode::SectorOrderViolation: return "SectorOrderViolation";
        case ErrorCode::NonMonotoneInducedEdge: return "NonMonotoneInducedEdge";
        case ErrorCode::OutsideRect: return "OutsideRect";
        case ErrorCode::NotMixedMonotone: return "NotMixedMonotone";
        case ErrorCode::ChainMonotonicityBroken: return "ChainMonotonicityBroken";
        case ErrorCode::NotAFixedPoint: return "NotAFixedPoint";
        case ErrorCode::DegenerateCase: return "DegenerateCase";
        case ErrorCode::ParamConstraint: return "ParamConstraint";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

std::string to_string(Monotone m) {
    return m == Monotone::NonDecreasing ? "NonDecreasing" : "NonIncreasing";
}

std::string to_string(const MonotoneSignature& s) {
    auto arrow = [](Monotone m) { return m == Monotone::NonDecreasing ? "up" : "down"; };
    return std::string("(") + arrow(s.first_arg) + "," + arrow(s.second_arg) + ")";
}

std::string to_string(Comparison c) {
    switch (c) {
        case Comparison::LessEq: return "LessEq";
        case Comparison::GreaterEq: return "GreaterEq";
        case Comparison::Equal: return "Equal";
        case Comparison::Incomparable: return "Incomparable";
    }
    return "?";
}

std::string to_string(ArgVerdict v) {
    switch (v) {
        case ArgVerdict::NonDecreasing: return "NonDecreasing";
        case ArgVerdict::NonIncreasing: return "NonIncreasing";
        case ArgVerdict::Constant: return "Constant";
        case ArgVerdict::Mixed: return "Mixed";
    }
    return "?";
}

MapSpec MapSpec::swapped() const {
    MapSpec out = *this;
    out.name = name + "[swapped]";
    out.signature = signature.swapped();
    out.domain_box = domain_box.swapped();
    auto inner = eval;
    out.eval = [inner](double x, double y, std::span<const double> p) { return inner(y, x, p); };
    return out;
}

std::optional<double> MapSpec::param(const std::string& key) const {
    for (std::size_t i = 0; i < param_names.size() && i < params.size(); ++i) {
        if (param_names[i] == key) return params[i];
    }
    return std::nullopt;
}

bool OrderRelation::leq(const Point2& a, const Point2& b) const {
    if (kind == OrderKind::SouthEast) return a.x <= b.x && b.y <= a.y;
    return a.x <= b.x && a.y <= b.y;
}

Comparison compare(const OrderRelation& order, const Point2& a, const Point2& b) {
    if (a == b) return Comparison::Equal;
    if (order.leq(a, b)) return Comparison::LessEq;
    if (order.leq(b, a)) return Comparison::GreaterEq;
    return Comparison::Incomparable;
}

namespace {

struct DirectionScan {
    double max_increase = 0.0;  // largest positive step
    double max_decrease = 0.0;  // largest negative step (as a positive number)
    std::optional<MonotonicityViolation> first_increase;
    std::optional<MonotonicityViolation> first_decrease;
};

ArgumentAudit finish(const DirectionScan& s, Monotone declared, double tol) {
    ArgumentAudit a;
    const bool inc = s.max_increase > tol;
    const bool dec = s.max_decrease > tol;
    if (inc && dec) a.observed = ArgVerdict::Mixed;
    else if (inc) a.observed = ArgVerdict::NonDecreasing;
    else if (dec) a.observed = ArgVerdict::NonIncreasing;
    else a.observed = ArgVerdict::Constant;

    if (declared == Monotone::NonDecreasing) {
        a.consistent = !dec;
        a.worst_violation = s.max_decrease;
        a.first_violation = s.first_decrease;
    } else {
        a.consistent = !inc;
        a.worst_violation = s.max_increase;
        a.first_violation = s.first_increase;
    }
    if (a.consistent) a.first_violation.reset();
    return a;
}

void record(DirectionScan& s, const Point2& p0, const Point2& p1, double v0, double v1,
            double tol) {
    const double d = v1 - v0;
    if (d > 0.0) {
        s.max_increase = std::max(s.max_increase, d);
        if (d > tol && !s.first_increase) s.first_increase = MonotonicityViolation{p0, p1, v0, v1};
    } else if (d < 0.0) {
        s.max_decrease = std::max(s.max_decrease, -d);
        if (-d > tol && !s.first_decrease) s.first_decrease = MonotonicityViolation{p0, p1, v0, v1};
    }
}

}  // namespace

MonotonicityAudit check_monotonicity(const std::function<double(double, double)>& f,
                                     const MonotoneSignature& declared, const Rectangle& box,
                                     int grid_n, double rel_tol) {
    if (grid_n < 3) throw Error(ErrorCode::ConfigError, "check_monotonicity needs grid_n >= 3");
    const int n = grid_n;
    std::vector<double> xs(n), ys(n), vals(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        xs[i] = box.x0 + box.width() * i / (n - 1);
        ys[i] = box.y0 + box.height() * i / (n - 1);
    }
    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -vmin;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double v = f(xs[i], ys[j]);
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << "map returned " << v << " at (" << xs[i] << ", " << ys[j] << ")";
                throw Error(ErrorCode::NonFiniteValue, os.str());
            }
            vals[static_cast<std::size_t>(j) * n + i] = v;
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    const double range = vmax - vmin;
    const double tol = range > 0.0 ? rel_tol * range : 1e-12;

    DirectionScan sx, sy;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            const auto k = static_cast<std::size_t>(j) * n + i;
            record(sx, {xs[i], ys[j]}, {xs[i + 1], ys[j]}, vals[k], vals[k + 1], tol);
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j + 1 < n; ++j) {
            const auto k0 = static_cast<std::size_t>(j) * n + i;
            const auto k1 = k0 + n;
            record(sy, {xs[i], ys[j]}, {xs[i], ys[j + 1]}, vals[k0], vals[k1], tol);
        }
    }

    MonotonicityAudit audit;
    audit.first = finish(sx, declared.first_arg, tol);
    audit.second = finish(sy, declared.second_arg, tol);
    audit.tol_mono = tol;
    audit.value_min = vmin;
    audit.value_max = vmax;
    return audit;
}

MonotonicityAudit check_monotonicity(const MapSpec& map, const Rectangle& box, int grid_n,
                                     double rel_tol) {
    return check_monotonicity([&map](double x, double y) { return map(x, y); }, map.signature,
                              box, grid_n, rel_tol);
}

Mat2 jacobian_fd(const MapSpec& map, const Point2& at, double h) {
    const double hx = h > 0.0 ? h : 1e-6 * std::max(1.0, std::abs(at.x));
    const double hy = h > 0.0 ? h : 1e-6 * std::max(1.0, std::abs(at.y));
    const Rectangle& box = map.domain_box;
    const Point2 stencil[4] = {{at.x - hx, at.y}, {at.x + hx, at.y}, {at.x, at.y - hy}, {at.x, at.y + hy}};
    for (const auto& s : stencil) {
        if (!box.contains(s)) {
            std::ostringstream os;
            os << "stencil point (" << s.x << ", " << s.y << ") outside the map's domain box";
            throw Error(ErrorCode::StencilOutOfDomain, os.str());
        }
    }
    Mat2 j;
    j.a = (map(stencil[1]) - map(stencil[0])) / (2.0 * hx);
    j.b = (map(stencil[3]) - map(stencil[2])) / (2.0 * hy);
    j.c = 1.0;
    j.d = 0.0;
    return j;
}

}  // namespace monomap
