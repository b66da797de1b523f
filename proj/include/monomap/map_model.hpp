#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monomap/types.hpp"

namespace monomap {

enum class Monotone { NonDecreasing, NonIncreasing };

/// Declared monotonicity of F in each argument.
struct MonotoneSignature {
    Monotone first_arg = Monotone::NonDecreasing;
    Monotone second_arg = Monotone::NonIncreasing;

    friend bool operator==(const MonotoneSignature&, const MonotoneSignature&) = default;

    bool is_mixed() const { return first_arg != second_arg; }
    /// F(up, down): the orientation the embedding works with.
    bool is_up_down() const {
        return first_arg == Monotone::NonDecreasing && second_arg == Monotone::NonIncreasing;
    }
    /// F(down, up): the orientation the extension builder works with.
    bool is_down_up() const {
        return first_arg == Monotone::NonIncreasing && second_arg == Monotone::NonDecreasing;
    }
    MonotoneSignature swapped() const { return {second_arg, first_arg}; }
};

std::string to_string(Monotone m);
std::string to_string(const MonotoneSignature& s);

using MapFunction = std::function<double(double x, double y, std::span<const double> params)>;

/// An evaluable two-argument map with its declared signature and parameter vector.
/// eval must be pure; MapSpec is immutable once built and safe to share across threads.
struct MapSpec {
    std::string name;
    MapFunction eval;
    MonotoneSignature signature;
    std::vector<double> params;
    std::vector<std::string> param_names;
    /// Box on which eval is declared total and finite.
    Rectangle domain_box;

    double operator()(double x, double y) const { return eval(x, y, params); }
    double operator()(const Point2& p) const { return eval(p.x, p.y, params); }

    /// G(x, y) = F(y, x), the coordinate swap used to move between the
    /// (up, down) and (down, up) orientations.
    MapSpec swapped() const;
    std::optional<double> param(const std::string& key) const;
};

enum class OrderKind { SouthEast, NorthEast };
enum class Comparison { LessEq, GreaterEq, Equal, Incomparable };

std::string to_string(Comparison c);

struct OrderRelation {
    OrderKind kind = OrderKind::SouthEast;
    bool leq(const Point2& a, const Point2& b) const;
};

Comparison compare(const OrderRelation& order, const Point2& a, const Point2& b);

enum class ArgVerdict { NonDecreasing, NonIncreasing, Constant, Mixed };
std::string to_string(ArgVerdict v);

struct MonotonicityViolation {
    Point2 from;
    Point2 to;
    double value_from = 0.0;
    double value_to = 0.0;
};

struct ArgumentAudit {
    ArgVerdict observed = ArgVerdict::Constant;
    bool consistent = true;  ///< observed behaviour agrees with the declared direction
    double worst_violation = 0.0;
    std::optional<MonotonicityViolation> first_violation;
};

struct MonotonicityAudit {
    ArgumentAudit first;
    ArgumentAudit second;
    double tol_mono = 0.0;
    double value_min = 0.0;
    double value_max = 0.0;

    bool consistent() const { return first.consistent && second.consistent; }
};

inline constexpr double kDefaultRelTolMono = 1e-9;

/// Grid audit of the declared signature. tol_mono is relative to the sampled range.
MonotonicityAudit check_monotonicity(const std::function<double(double, double)>& f,
                                     const MonotoneSignature& declared, const Rectangle& box,
                                     int grid_n, double rel_tol = kDefaultRelTolMono);
MonotonicityAudit check_monotonicity(const MapSpec& map, const Rectangle& box, int grid_n,
                                     double rel_tol = kDefaultRelTolMono);

/// Central-difference Jacobian of the companion map T(x,y) = (F(x,y), x).
/// h <= 0 selects the default step 1e-6 * max(1, |coordinate|).
Mat2 jacobian_fd(const MapSpec& map, const Point2& at, double h = 0.0);

}  // namespace monomap
