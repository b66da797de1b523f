#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "monomap/geometry.hpp"
#include "monomap/map_model.hpp"
#include "monomap/types.hpp"

namespace monomap {

enum class RuleKind {
    BaseMap,
    RayConstXMinus,  // F(x⁻(y), y)
    RayConstXPlus,   // F(x⁺(y), y)
    RayConstYMinus,  // F(x, y⁻(x))
    RayConstYPlus,   // F(x, y⁺(x))
    MinOfTwo,
    MaxOfTwo,
    Graft,         // anchored on the lower-left corner of its cell
    ReverseGraft,  // anchored on the upper-right corner
    LinearSector,
};
std::string to_string(RuleKind r);

/// The four corner regions of bbox(Ω) \ Ω, named by where they sit.
enum class Corner { LowerRight, UpperRight, UpperLeft, LowerLeft };
std::string to_string(Corner c);

/// One tile of rect \ Ω. Coordinates are in the caller's frame.
struct ExtensionPiece {
    RuleKind rule = RuleKind::BaseMap;
    std::vector<Point2> region;  // counterclockwise
    Corner corner = Corner::LowerRight;
    bool is_box = true;          // ray box under a boundary arc, otherwise a notch cell
    std::vector<Point2> arc;     // boundary arc the rays project onto (boxes only)
    FDirection f_direction = FDirection::Constant;
    std::optional<Point2> anchor;  // cells only
    double anchor_value = 0.0;
};

struct ExtensionOptions {
    /// Nice mode fills lower-right and upper-left notches by min/max; fast mode grafts everywhere.
    bool nice = true;
    /// Target rectangle; must contain bbox(Ω). Outside the bbox the extension is F̃ ∘ clamp.
    std::optional<Rectangle> rect;
    int samples_per_edge = 16;
    int max_arcs = 4 * kDefaultMaxArcs;
    double tol_t = 1e-10;
};

namespace detail {
struct ExtensionImpl;
}

/// Continuous extension of a mixed-monotone map from Ω to a rectangle.
/// Immutable after construction; eval_extended is safe to call concurrently.
struct ExtendedMap {
    MapSpec base;
    DomainSpec domain;
    Rectangle rect;
    std::vector<ExtensionPiece> pieces;
    bool nice = true;
    /// True when the base map is (up, down) and the builder ran on the swapped map.
    bool swapped = false;

    std::shared_ptr<const detail::ExtensionImpl> impl;
};

ExtendedMap extend_rectangle(const MapSpec& map, const Rectangle& rect);
ExtendedMap extend_convex(const MapSpec& map, const DomainSpec& domain, const ExtensionOptions& opts = {});
ExtendedMap extend_semiconvex(const MapSpec& map, const DomainSpec& domain,
                              const ExtensionOptions& opts = {});
/// Dispatches on domain.shape_class; Unsupported raises UnsupportedDomain.
ExtendedMap extend(const MapSpec& map, const DomainSpec& domain, const ExtensionOptions& opts = {});
/// Smallest square [a,b]^2 holding r; the embeddings need a square rectangle.
Rectangle square_hull(const Rectangle& r);

double eval_extended(const ExtendedMap& ext, const Point2& p);
inline double eval_extended(const ExtendedMap& ext, double x, double y) { return eval_extended(ext, {x, y}); }

/// The rule of piece `index` applied at p, without locating p first.
double eval_piece(const ExtendedMap& ext, std::size_t index, const Point2& p);

/// The extension wrapped as a MapSpec over rect (same signature as the base map).
MapSpec as_map(const ExtendedMap& ext);

/// Copy of ext whose piece `index` returns its rule value plus offset.
/// Used as a negative control for the audit.
ExtendedMap with_piece_offset(const ExtendedMap& ext, std::size_t index, double offset);

struct Witness {
    Point2 at;
    double expected = 0.0;
    double got = 0.0;
    int piece = -1;
};

struct ExtensionAudit {
    bool c1 = false;  // continuity across piece edges
    double c1_worst = 0.0;
    std::optional<Witness> c1_witness;
    bool c2 = false;  // agreement with F on Ω
    double c2_worst = 0.0;
    std::optional<Witness> c2_witness;
    bool c3 = false;  // monotonicity on rect
    MonotonicityAudit monotonicity;
    bool nice = false;  // range preserved
    bool nice_mode = true;
    double f_min = 0.0, f_max = 0.0;      // F over Ω
    double ext_min = 0.0, ext_max = 0.0;  // F̃ over rect
    double tiling_error = 0.0;            // relative area mismatch
    bool tiling = false;
    double tol_cont = 0.0;
    double tol_range = 0.0;
    int samples_c1 = 0;
    int samples_c2 = 0;

    bool passed() const { return c1 && c2 && c3 && nice && tiling; }
};

ExtensionAudit audit_extension(const ExtendedMap& ext, int grid_n);

/// Vertical linear interpolation between two graphs over [x0, x1]:
/// F̃(x,y) = (1-s) f_lower(x) + s f_upper(x), s = (y - y_lower(x)) / (y_upper(x) - y_lower(x)).
struct SectorFill {
    double x0 = 0.0;
    double x1 = 0.0;
    std::function<double(double)> y_lower, y_upper;
    std::function<double(double)> f_lower, f_upper;

    double operator()(const Point2& p) const;
};

/// Builds a sector fill and checks on an n x n sample that it has the declared
/// signature. Raises SectorOrderViolation with the offending pair otherwise.
SectorFill make_linear_sector(double x0, double x1, std::function<double(double)> y_lower,
                              std::function<double(double)> y_upper, std::function<double(double)> f_lower,
                              std::function<double(double)> f_upper, const MonotoneSignature& signature,
                              int n = 33);

}  // namespace monomap
