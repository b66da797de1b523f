#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace monomap {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    Point2 swapped() const { return {y, x}; }
};

inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rectangle {
    double x0 = 0.0;
    double x1 = 0.0;
    double y0 = 0.0;
    double y1 = 0.0;

    friend bool operator==(const Rectangle&, const Rectangle&) = default;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    double diameter() const { return std::hypot(width(), height()); }
    bool is_square(double tol = 0.0) const {
        return std::abs(x0 - y0) <= tol && std::abs(x1 - y1) <= tol;
    }
    bool contains(const Point2& p, double tol = 0.0) const {
        return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
    }
    Point2 clamp(const Point2& p) const {
        return {std::clamp(p.x, x0, x1), std::clamp(p.y, y0, y1)};
    }
    Rectangle swapped() const { return {y0, y1, x0, x1}; }

    static Rectangle bounding(const std::vector<Point2>& pts);
};

inline Rectangle Rectangle::bounding(const std::vector<Point2>& pts) {
    Rectangle r{pts.front().x, pts.front().x, pts.front().y, pts.front().y};
    for (const auto& p : pts) {
        r.x0 = std::min(r.x0, p.x);
        r.x1 = std::max(r.x1, p.x);
        r.y0 = std::min(r.y0, p.y);
        r.y1 = std::max(r.y1, p.y);
    }
    return r;
}

/// 2x2 real matrix, row-major.
struct Mat2 {
    double a = 0.0, b = 0.0;
    double c = 0.0, d = 0.0;

    double trace() const { return a + d; }
    double det() const { return a * d - b * c; }
};

/// Eigenvalues of a 2x2 matrix. Complex pairs are returned as (re, im) and (re, -im).
struct Eigen2 {
    double re1 = 0.0, im1 = 0.0;
    double re2 = 0.0, im2 = 0.0;

    double modulus1() const { return std::hypot(re1, im1); }
    double modulus2() const { return std::hypot(re2, im2); }
    double spectral_radius() const { return std::max(modulus1(), modulus2()); }
};

inline Eigen2 eigenvalues(const Mat2& m) {
    const double half_tr = 0.5 * m.trace();
    const double disc = half_tr * half_tr - m.det();
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        // larger real eigenvalue first
        return {half_tr + s, 0.0, half_tr - s, 0.0};
    }
    const double s = std::sqrt(-disc);
    return {half_tr, s, half_tr, -s};
}

}  // namespace monomap
