#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "monomap/extension.hpp"
#include "monomap/families.hpp"
#include "monomap/map_model.hpp"
#include "monomap/types.hpp"

namespace monomap {

using ScalarMap = std::function<double(double, double)>;

struct FixedPointOptions {
    int n_grid = 256;
    int n_dense = 1024;
    double tol_fp = 0.0;   // <= 0: 1e-9 (b-a)
    double sep_min = 0.0;  // <= 0: 1e-6 (b-a)
    int newton_max_steps = 50;
    int max_subdivision = 4;
};

struct Equilibrium {
    double x = 0.0;
    double residual = 0.0;
};

struct EquilibriumSearch {
    std::vector<Equilibrium> roots;
    int n_grid = 0;
    int degenerate_nodes = 0;  // nodes where g vanishes exactly
    bool continuum = false;    // ContinuumOfFixedPoints
};

/// Roots of g(x) = F(x,x) - x on [a,b]: sign sweep on n_grid cells, then bisection.
EquilibriumSearch find_equilibria(const ScalarMap& f, double a, double b, const FixedPointOptions& opts = {});
EquilibriumSearch find_equilibria(const MapSpec& map, double a, double b, const FixedPointOptions& opts = {});
EquilibriumSearch find_equilibria(const ExtendedMap& ext, double a, double b, const FixedPointOptions& opts = {});

/// Solution of (F(x,y), F(y,x)) = (x,y) with x < y.
struct ArtificialRoot {
    double x = 0.0;
    double y = 0.0;
    double residual = 0.0;         // ||H(x,y)||_inf
    double mirror_residual = 0.0;  // ||H(y,x)||_inf
};

/// A flagged cell where Newton never settled, even after subdivision.
/// It may hide a tangential root, so certification treats it as a failure.
struct SuspiciousCell {
    Rectangle cell;
    double best_residual = 0.0;
    std::string reason;
};

struct OracleCluster {
    int cells = 0;
    Rectangle bbox;
    std::string explained_by;  // "root", "suspicious", "cleared", or "" when unexplained
};

struct OracleReport {
    int n_dense = 0;
    int flagged_cells = 0;
    std::vector<OracleCluster> clusters;
    int roots_checked = 0;
    int roots_outside = 0;  // roots not inside any flagged cell
    bool consistent = true;
};

enum class FixedPointMethod { NumericSweep, ClosedFormEq7, ClosedFormEq8 };
std::string to_string(FixedPointMethod m);

struct SweepInfo {
    int n_grid = 0;
    int cells_swept = 0;
    int cells_flagged = 0;
    int newton_runs = 0;
    int cells_cleared = 0;  // flagged cells whose subdivision lost the sign change
    double tol_fp = 0.0;
    double sep_min = 0.0;
    double a = 0.0;
    double b = 0.0;
};

struct FixedPointReport {
    FixedPointMethod method = FixedPointMethod::NumericSweep;
    std::vector<Equilibrium> equilibria;
    std::vector<ArtificialRoot> artificial;
    std::vector<SuspiciousCell> suspicious;
    SweepInfo sweep;
    bool continuum = false;
    std::optional<OracleReport> oracle;

    bool clean() const { return artificial.empty() && suspicious.empty() && !continuum; }
};

/// H(x,y) = (F(x,y) - x, F(y,x) - y) swept over the cells of [a,b]^2 with y >= x.
/// Cells where both components change sign seed damped Newton. F values are
/// clamped to [a,b], the same self-map the embedding iterates.
FixedPointReport find_artificial(const ScalarMap& f, double a, double b, const FixedPointOptions& opts = {});
/// Uses the square extension rectangle; ConfigError when it is not square.
FixedPointReport find_artificial(const ExtendedMap& ext, const FixedPointOptions& opts = {});

struct OracleCell {
    int i = 0;
    int j = 0;
};

/// Brute-force: every cell of the n_dense grid (y >= x half) where both components of H change sign.
std::vector<OracleCell> oracle_sweep(const ScalarMap& f, double a, double b, int n_dense);

/// Compares a report against the dense oracle and stores the result in report.oracle.
/// Unexplained clusters are re-gridded locally; a cluster whose sign changes vanish is "cleared".
OracleReport check_against_oracle(const ScalarMap& f, FixedPointReport& report, const FixedPointOptions& opts = {});
OracleReport check_against_oracle(const ExtendedMap& ext, FixedPointReport& report,
                                  const FixedPointOptions& opts = {});

/// Evaluates H componentwise with the clamp used by find_artificial.
Point2 fixed_point_residual(const ScalarMap& f, double a, double b, const Point2& p);

struct Eq7Root {
    double x = 0.0;
    double y = 0.0;   // q - 1 - x
    int quadrant = 0;  // 1..4, 0 on an axis
    bool in_box = false;
};

struct Eq7Report {
    std::vector<Eq7Regime> regimes;
    std::vector<Eq7Root> factor_roots;  // real roots of the artificial factor, empty when none
    double equilibrium = 0.0;
    bool no_artificial() const;
};

Eq7Report closed_form_eq7(double p, double q, double r);

struct Eq8LineFamily {
    double x_star = 0.0;
    double c = 0.0;
    double b3 = 0.0;
    double m = 0.0;
    double M = 0.0;  // m - (c - x*)/x*
    double x = 0.0;  // positive root of F(y,x) = y on y = m x + x*
    double y = 0.0;
    double residual = 0.0;  // F(x+, y) - x with x+ on the edge from (0,x*) to (x*,c)
    int samples = 0;
    double residual_min = 0.0;
    double residual_max = 0.0;
    bool sign_constant = false;  // over sampled M > 0 with the point inside [0,c]^2
};

/// Along y = m x + x* the extension is the horizontal ray from the edge (0,x*)-(x*,c),
/// so an artificial point there would make the residual vanish.
Eq8LineFamily closed_form_eq8_line_family(double p, double h, double m_probe, int samples = 2000);

}  // namespace monomap
