#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "monomap/fixed_points.hpp"
#include "monomap/geometry.hpp"
#include "monomap/map_model.hpp"
#include "monomap/stability.hpp"

namespace monomap {

// Config files are INI-like:
//
//   [map]         family = rational_pqr | rational_pqrh | xfy | expr, with p q r h / f lo hi / expr signature box
//   [params]      named constants for family = expr
//   [domain]      type = rectangle | polygon | curve, with rect / vertices / x y t0 t1
//   [tolerances]  tol_fp tol_chain sep_min tol_orbit tol_eig tol_geom
//   [run]         seed n_grid n_dense n_boundary audit_grid mono_grid n_orbits orbit_steps
//                 trace_steps max_iter nice boundary_only fault
//   [simulate]    starts = (x0,x-1) (x0,x-1) ..., steps
//
// Unknown sections or keys are rejected with ConfigError.

struct MapSource {
    std::string family;  // rational_pqr, rational_pqrh, xfy, expr
    std::map<std::string, double> params;
    std::string expr;
    std::optional<MonotoneSignature> signature;
    std::optional<Rectangle> box;
    std::string f;  // xfy: f(y)
    std::optional<double> lo, hi;
};

struct DomainSource {
    std::string type;  // empty: the family's own domain
    std::optional<Rectangle> rect;
    std::vector<Point2> vertices;
    std::string x_t, y_t;
    double t0 = 0.0;
    double t1 = 1.0;
};

struct ToleranceOverrides {
    std::optional<double> tol_fp, tol_chain, sep_min, tol_orbit, tol_eig, tol_geom;
};

struct RunConfig {
    MapSource map;
    DomainSource domain;
    ToleranceOverrides tol;
    std::uint64_t seed = 1;
    int n_grid = 256;
    int n_dense = 1024;
    int n_boundary = 500;
    int audit_grid = 200;
    int mono_grid = 200;
    int n_orbits = 100;
    int orbit_steps = 10000;
    int trace_steps = 200;
    int max_iter = 100000;
    bool nice = true;
    bool boundary_only = false;
    Fault fault = Fault::None;
    std::vector<Point2> starts;
    std::optional<int> steps;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// Tolerance names accepted by set_tolerance and the [tolerances] section.
const std::vector<std::string>& tolerance_keys();
/// ConfigError for unknown keys and non-positive or non-finite values.
void set_tolerance(RunConfig& cfg, const std::string& key, double value);

struct Problem {
    MapSpec map;
    DomainSpec domain;
    std::string family;
    std::optional<double> known_equilibrium;
};

/// Instantiates the map and the domain. Propagates ParamConstraint, DegenerateCase,
/// ParseError and geometry errors.
Problem build_problem(const RunConfig& cfg);

FixedPointOptions fixed_point_options(const RunConfig& cfg);
CertifyConfig certify_config(const RunConfig& cfg);

Rectangle parse_box(const std::string& text);
std::vector<Point2> parse_points(const std::string& text);

}  // namespace monomap
