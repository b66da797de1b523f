#include "monomap/fixed_points.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "monomap/error.hpp"
#include "monomap/parallel.hpp"

namespace monomap {

std::string to_string(FixedPointMethod m) {
    switch (m) {
        case FixedPointMethod::NumericSweep: return "NumericSweep";
        case FixedPointMethod::ClosedFormEq7: return "ClosedFormEq7";
        case FixedPointMethod::ClosedFormEq8: return "ClosedFormEq8";
    }
    return "?";
}

namespace {

struct Tolerances {
    double w, tol_fp, sep_min;
};

Tolerances tolerances(double a, double b, const FixedPointOptions& o) {
    if (!(b > a)) throw Error(ErrorCode::ConfigError, "fixed point search needs a < b");
    if (o.n_grid < 2) throw Error(ErrorCode::ConfigError, "n_grid must be at least 2");
    const double w = b - a;
    return {w, o.tol_fp > 0.0 ? o.tol_fp : 1e-9 * w, o.sep_min > 0.0 ? o.sep_min : 1e-6 * w};
}

double node(double a, double b, int k, int n) { return k == n ? b : a + (b - a) * k / n; }

bool straddles(double v0, double v1, double v2, double v3) {
    return std::min({v0, v1, v2, v3}) <= 0.0 && std::max({v0, v1, v2, v3}) >= 0.0;
}

// H with F clamped into [a,b]
struct Residual {
    const ScalarMap& f;
    double a, b;
    double F(double x, double y) const {
        const double v = f(x, y);
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "map is not finite during fixed point search");
        return std::clamp(v, a, b);
    }
    Point2 operator()(const Point2& p) const { return {F(p.x, p.y) - p.x, F(p.y, p.x) - p.y}; }
};

double inf_norm(const Point2& v) { return std::max(std::abs(v.x), std::abs(v.y)); }

// A(k,l) = F(t_k, t_l) - t_k on the full (n+1)^2 grid; H at node (k,l) is (A(k,l), A(l,k)).
std::vector<double> node_table(const Residual& H, int n) {
    std::vector<double> A(static_cast<std::size_t>(n + 1) * (n + 1));
    parallel_for(n + 1, [&](int k) {
        const double x = node(H.a, H.b, k, n);
        for (int l = 0; l <= n; ++l) A[static_cast<std::size_t>(k) * (n + 1) + l] = H.F(x, node(H.a, H.b, l, n)) - x;
    });
    return A;
}

bool cell_flagged(const std::vector<double>& A, int n, int i, int j) {
    auto at = [&](int k, int l) { return A[static_cast<std::size_t>(k) * (n + 1) + l]; };
    return straddles(at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)) &&
           straddles(at(j, i), at(j, i + 1), at(j + 1, i), at(j + 1, i + 1));
}

bool rect_flagged(const Residual& H, const Rectangle& c) {
    const Point2 h00 = H({c.x0, c.y0}), h10 = H({c.x1, c.y0}), h01 = H({c.x0, c.y1}), h11 = H({c.x1, c.y1});
    return straddles(h00.x, h10.x, h01.x, h11.x) && straddles(h00.y, h10.y, h01.y, h11.y);
}

std::array<Rectangle, 4> quarters(const Rectangle& c) {
    const double mx = 0.5 * (c.x0 + c.x1), my = 0.5 * (c.y0 + c.y1);
    return {Rectangle{c.x0, mx, c.y0, my}, Rectangle{mx, c.x1, c.y0, my}, Rectangle{c.x0, mx, my, c.y1},
            Rectangle{mx, c.x1, my, c.y1}};
}

// Artificial roots as zeros of (u, v) = (H1 + H2, (H2 - H1)/(y - x)) off the diagonal.
// Simple equilibria are not zeros of this pair, so Newton is not dragged onto them.
struct Split {
    const Residual& H;
    double delta;  // below this gap v is taken from a one-sided difference along the diagonal
    Point2 operator()(const Point2& p) const {
        const double d = p.y - p.x;
        if (std::abs(d) >= delta) {
            const Point2 h = H(p);
            return {h.x + h.y, (h.y - h.x) / d};
        }
        const double s = 0.5 * (p.x + p.y);
        const double lo = std::min(s, H.b - delta);
        const Point2 h = H({lo, lo + delta});
        return {h.x + h.y, (h.y - h.x) / delta};
    }
};

template <class G>
Mat2 jacobian(const G& g, double a, double b, const Point2& p, double h) {
    auto partial = [&](bool along_x) {
        const double v = along_x ? p.x : p.y;
        const double lo = std::max(a, v - h), hi = std::min(b, v + h);
        Point2 q0 = p, q1 = p;
        (along_x ? q0.x : q0.y) = lo;
        (along_x ? q1.x : q1.y) = hi;
        return (g(q1) - g(q0)) * (1.0 / (hi - lo));
    };
    const Point2 dx = partial(true), dy = partial(false);
    return {dx.x, dy.x, dx.y, dy.y};
}

bool nearly_singular(const Mat2& J, double rel) {
    const double scale = std::max({1e-300, std::abs(J.a), std::abs(J.b), std::abs(J.c), std::abs(J.d)});
    return !(std::abs(J.det()) > rel * scale * scale);
}

struct NewtonResult {
    Point2 p;
    double residual = 0.0;  // ||H||_inf at p
    bool converged = false;
};

// Damped Newton on the split system inside the half y >= x + gap.
NewtonResult newton(const Split& S, Point2 p, const Tolerances& t, int max_steps) {
    const Residual& H = S.H;
    const double a = H.a, b = H.b, h = 1e-7 * t.w, gap = 1e-3 * t.sep_min;
    auto keep = [&](Point2 q) {
        q = Rectangle{a, b, a, b}.clamp(q);
        if (q.y - q.x < gap) {
            const double m = std::clamp(0.5 * (q.x + q.y), a + 0.5 * gap, b - 0.5 * gap);
            q = {m - 0.5 * gap, m + 0.5 * gap};
        }
        return q;
    };
    p = keep(p);
    Point2 s = S(p);
    double r = inf_norm(s);
    for (int it = 0; it < max_steps && inf_norm(H(p)) > 1e-3 * t.tol_fp; ++it) {
        const Mat2 J = jacobian(S, a, b, p, h);
        if (nearly_singular(J, 1e-14)) break;
        const double det = J.det();
        const Point2 d{-(J.d * s.x - J.b * s.y) / det, -(-J.c * s.x + J.a * s.y) / det};
        bool improved = false;
        double lambda = 1.0;
        for (int k = 0; k < 30; ++k, lambda *= 0.5) {
            const Point2 q = keep(p + d * lambda);
            const Point2 sq = S(q);
            if (inf_norm(sq) < r) {
                p = q;
                s = sq;
                r = inf_norm(sq);
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    const double res = inf_norm(H(p));
    return {p, res, res < t.tol_fp};
}

// Corner signs of (u, v) straddle zero in both components.
bool split_flagged(const Split& S, const Rectangle& c) {
    const Point2 s00 = S({c.x0, c.y0}), s10 = S({c.x1, c.y0}), s01 = S({c.x0, c.y1}), s11 = S({c.x1, c.y1});
    return straddles(s00.x, s10.x, s01.x, s11.x) && straddles(s00.y, s10.y, s01.y, s11.y);
}

struct CellOutcome {
    std::vector<NewtonResult> roots;
    std::vector<SuspiciousCell> suspicious;
    int newton_runs = 0;
    int cleared = 0;
};

void solve_cell(const Split& S, const Rectangle& cell, int depth, const Tolerances& t, const FixedPointOptions& o,
                CellOutcome& out) {
    const Point2 centre{0.5 * (cell.x0 + cell.x1), 0.5 * (cell.y0 + cell.y1)};
    ++out.newton_runs;
    const NewtonResult nr = newton(S, centre, t, o.newton_max_steps);
    const Rectangle reach{cell.x0 - cell.width(), cell.x1 + cell.width(), cell.y0 - cell.height(),
                          cell.y1 + cell.height()};
    if (nr.converged && reach.contains(nr.p)) {
        out.roots.push_back(nr);
        return;
    }
    if (depth < o.max_subdivision) {
        bool any = false;
        for (const Rectangle& q : quarters(cell)) {
            if (!split_flagged(S, q)) continue;
            any = true;
            solve_cell(S, q, depth + 1, t, o, out);
        }
        if (!any) ++out.cleared;
        return;
    }
    out.suspicious.push_back({cell, nr.residual, nr.converged ? "root outside cell" : "newton stall"});
}

}  // namespace

EquilibriumSearch find_equilibria(const ScalarMap& f, double a, double b, const FixedPointOptions& opts) {
    const Tolerances t = tolerances(a, b, opts);
    const int n = opts.n_grid;
    auto g = [&](double x) {
        const double v = f(x, x) - x;
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "F(x,x) is not finite");
        return v;
    };
    EquilibriumSearch out;
    out.n_grid = n;
    std::vector<double> xs(n + 1), gs(n + 1);
    for (int k = 0; k <= n; ++k) {
        xs[k] = node(a, b, k, n);
        gs[k] = g(xs[k]);
    }
    std::vector<double> roots;
    for (int k = 0; k <= n; ++k) {
        if (gs[k] == 0.0) {
            ++out.degenerate_nodes;
            roots.push_back(xs[k]);
            continue;
        }
        if (k == n || gs[k + 1] == 0.0 || (gs[k] > 0.0) == (gs[k + 1] > 0.0)) continue;
        double lo = xs[k], hi = xs[k + 1];
        const bool lo_pos = gs[k] > 0.0;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (lo + hi);
            if (m <= lo || m >= hi) break;
            if ((g(m) > 0.0) == lo_pos) lo = m;
            else hi = m;
        }
        roots.push_back(std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi);
    }
    out.continuum = out.degenerate_nodes > n / 2;
    for (double r : roots) {
        if (!out.roots.empty() && std::abs(r - out.roots.back().x) <= t.sep_min) continue;
        out.roots.push_back({r, std::abs(g(r))});
    }
    return out;
}

EquilibriumSearch find_equilibria(const MapSpec& map, double a, double b, const FixedPointOptions& opts) {
    return find_equilibria([&](double x, double y) { return map(x, y); }, a, b, opts);
}

EquilibriumSearch find_equilibria(const ExtendedMap& ext, double a, double b, const FixedPointOptions& opts) {
    return find_equilibria([&](double x, double y) { return eval_extended(ext, {x, y}); }, a, b, opts);
}

Point2 fixed_point_residual(const ScalarMap& f, double a, double b, const Point2& p) {
    return Residual{f, a, b}(p);
}

FixedPointReport find_artificial(const ScalarMap& f, double a, double b, const FixedPointOptions& opts) {
    const Tolerances t = tolerances(a, b, opts);
    const Residual H{f, a, b};
    const Split S{H, 1e-7 * t.w};
    const int n = opts.n_grid;

    FixedPointReport rep;
    rep.sweep = {n, 0, 0, 0, 0, t.tol_fp, t.sep_min, a, b};

    const EquilibriumSearch eq = find_equilibria(f, a, b, opts);
    rep.equilibria = eq.roots;
    rep.continuum = eq.continuum;

    // u and v at the nodes with l >= k; the diagonal needs its own difference quotient
    const std::vector<double> A = node_table(H, n);
    const auto idx = [&](int k, int l) { return static_cast<std::size_t>(k) * (n + 1) + l; };
    std::vector<double> U(A.size()), V(A.size());
    for (int k = 0; k <= n; ++k) {
        for (int l = k + 1; l <= n; ++l) {
            U[idx(k, l)] = A[idx(k, l)] + A[idx(l, k)];
            V[idx(k, l)] = (A[idx(l, k)] - A[idx(k, l)]) / (node(a, b, l, n) - node(a, b, k, n));
        }
    }
    parallel_for(n + 1, [&](int k) {
        const double x = node(a, b, k, n);
        const Point2 s = S({x, x});
        U[idx(k, k)] = s.x;
        V[idx(k, k)] = s.y;
    });
    auto at = [&](const std::vector<double>& M, int k, int l) { return k <= l ? M[idx(k, l)] : M[idx(l, k)]; };
    auto flagged_cell = [&](int i, int j) {
        return straddles(at(U, i, j), at(U, i + 1, j), at(U, i, j + 1), at(U, i + 1, j + 1)) &&
               straddles(at(V, i, j), at(V, i + 1, j), at(V, i, j + 1), at(V, i + 1, j + 1));
    };

    std::vector<OracleCell> flagged;
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            ++rep.sweep.cells_swept;
            if (flagged_cell(i, j)) flagged.push_back({i, j});
        }
    }
    rep.sweep.cells_flagged = static_cast<int>(flagged.size());
    if (2 * flagged.size() > static_cast<std::size_t>(rep.sweep.cells_swept)) {
        // H vanishes on a region; point roots are meaningless here
        rep.continuum = true;
        return rep;
    }

    std::vector<CellOutcome> outcomes(flagged.size());
    parallel_for(static_cast<int>(flagged.size()), [&](int k) {
        const auto [i, j] = flagged[k];
        const Rectangle cell{node(a, b, i, n), node(a, b, i + 1, n), node(a, b, j, n), node(a, b, j + 1, n)};
        solve_cell(S, cell, 0, t, opts, outcomes[k]);
    });

    for (const auto& oc : outcomes) {
        rep.sweep.newton_runs += oc.newton_runs;
        rep.sweep.cells_cleared += oc.cleared;
        rep.suspicious.insert(rep.suspicious.end(), oc.suspicious.begin(), oc.suspicious.end());
        for (const auto& nr : oc.roots) {
            const Point2 p = nr.p;
            if (p.y - p.x <= t.sep_min) {
                // both u and v vanish next to the diagonal: a degenerate equilibrium or a pitchfork
                const double e = t.sep_min;
                rep.suspicious.push_back({{p.x - e, p.x + e, p.y - e, p.y + e}, nr.residual, "degenerate diagonal root"});
                continue;
            }
            const bool dup = std::any_of(rep.artificial.begin(), rep.artificial.end(), [&](const ArtificialRoot& r) {
                return std::max(std::abs(r.x - p.x), std::abs(r.y - p.y)) <= t.sep_min;
            });
            if (dup) continue;
            rep.artificial.push_back({p.x, p.y, inf_norm(H(p)), inf_norm(H(p.swapped()))});
            if (nearly_singular(jacobian(H, a, b, p, 1e-7 * t.w), 1e-8)) {
                const double e = 1e-6 * t.w;
                rep.suspicious.push_back({{p.x - e, p.x + e, p.y - e, p.y + e}, nr.residual, "tangential root"});
            }
        }
    }
    auto by_xy = [](const auto& u, const auto& v) { return u.x != v.x ? u.x < v.x : u.y < v.y; };
    std::sort(rep.artificial.begin(), rep.artificial.end(), by_xy);
    std::sort(rep.suspicious.begin(), rep.suspicious.end(), [](const SuspiciousCell& u, const SuspiciousCell& v) {
        return u.cell.x0 != v.cell.x0 ? u.cell.x0 < v.cell.x0 : u.cell.y0 < v.cell.y0;
    });
    // dedupe suspicious cells reported by neighbouring seeds
    rep.suspicious.erase(std::unique(rep.suspicious.begin(), rep.suspicious.end(),
                                     [](const SuspiciousCell& u, const SuspiciousCell& v) { return u.cell == v.cell; }),
                         rep.suspicious.end());
    return rep;
}

namespace {

Rectangle square_of(const ExtendedMap& ext) {
    const Rectangle& r = ext.rect;
    if (!r.is_square(1e-12 * std::max(1.0, r.diameter()))) {
        throw Error(ErrorCode::ConfigError, "artificial fixed points need a square rectangle [a,b]^2");
    }
    return r;
}

ScalarMap extended_fn(const ExtendedMap& ext) {
    return [&ext](double x, double y) { return eval_extended(ext, {x, y}); };
}

}  // namespace

FixedPointReport find_artificial(const ExtendedMap& ext, const FixedPointOptions& opts) {
    const Rectangle r = square_of(ext);
    return find_artificial(extended_fn(ext), r.x0, r.x1, opts);
}

std::vector<OracleCell> oracle_sweep(const ScalarMap& f, double a, double b, int n_dense) {
    if (n_dense < 2) throw Error(ErrorCode::ConfigError, "n_dense must be at least 2");
    const Residual H{f, a, b};
    const std::vector<double> A = node_table(H, n_dense);
    std::vector<OracleCell> out;
    for (int i = 0; i < n_dense; ++i) {
        for (int j = i; j < n_dense; ++j) {
            if (cell_flagged(A, n_dense, i, j)) out.push_back({i, j});
        }
    }
    return out;
}

namespace {

// True when some sign change survives subdivision to the given depth.
bool survives(const Residual& H, const Rectangle& c, int depth) {
    if (!rect_flagged(H, c)) return false;
    if (depth == 0) return true;
    for (const Rectangle& q : quarters(c)) {
        if (survives(H, q, depth - 1)) return true;
    }
    return false;
}

}  // namespace

OracleReport check_against_oracle(const ScalarMap& f, FixedPointReport& report, const FixedPointOptions& opts) {
    const double a = report.sweep.a, b = report.sweep.b;
    const int n = opts.n_dense;
    if (n < 4 * report.sweep.n_grid) throw Error(ErrorCode::ConfigError, "n_dense must be at least 4 n_grid");
    const Residual H{f, a, b};
    const double hd = (b - a) / n;

    const std::vector<OracleCell> cells = oracle_sweep(f, a, b, n);
    OracleReport out;
    out.n_dense = n;
    out.flagged_cells = static_cast<int>(cells.size());

    std::set<std::pair<int, int>> flagged;
    for (const auto& c : cells) flagged.insert({c.i, c.j});

    std::vector<Point2> roots;
    for (const auto& e : report.equilibria) roots.push_back({e.x, e.x});
    for (const auto& r : report.artificial) roots.push_back({r.x, r.y});

    auto index = [&](double v) { return std::clamp(static_cast<int>(std::floor((v - a) / hd)), 0, n - 1); };
    for (const Point2& p : roots) {
        ++out.roots_checked;
        const int i = index(p.x), j = index(p.y);
        bool found = false;
        for (int di = -1; di <= 1 && !found; ++di) {
            for (int dj = -1; dj <= 1 && !found; ++dj) {
                int ci = i + di, cj = j + dj;
                if (ci > cj) std::swap(ci, cj);
                found = flagged.count({ci, cj}) > 0;
            }
        }
        if (!found) ++out.roots_outside;
    }

    // 8-connected clusters
    std::set<std::pair<int, int>> seen;
    for (const auto& c : cells) {
        if (seen.count({c.i, c.j})) continue;
        OracleCluster cl;
        std::vector<std::pair<int, int>> members;
        std::deque<std::pair<int, int>> queue{{c.i, c.j}};
        seen.insert({c.i, c.j});
        while (!queue.empty()) {
            const auto cur = queue.front();
            queue.pop_front();
            members.push_back(cur);
            for (int di = -1; di <= 1; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    const std::pair<int, int> nb{cur.first + di, cur.second + dj};
                    if (flagged.count(nb) && !seen.count(nb)) {
                        seen.insert(nb);
                        queue.push_back(nb);
                    }
                }
            }
        }
        int i0 = n, i1 = 0, j0 = n, j1 = 0;
        for (const auto& [i, j] : members) {
            i0 = std::min(i0, i);
            i1 = std::max(i1, i + 1);
            j0 = std::min(j0, j);
            j1 = std::max(j1, j + 1);
        }
        cl.cells = static_cast<int>(members.size());
        cl.bbox = {node(a, b, i0, n), node(a, b, i1, n), node(a, b, j0, n), node(a, b, j1, n)};
        const Rectangle grown{cl.bbox.x0 - hd, cl.bbox.x1 + hd, cl.bbox.y0 - hd, cl.bbox.y1 + hd};

        const bool by_root = std::any_of(roots.begin(), roots.end(), [&](const Point2& p) {
            return grown.contains(p) || grown.contains(p.swapped());
        });
        const bool by_suspicious =
            std::any_of(report.suspicious.begin(), report.suspicious.end(), [&](const SuspiciousCell& s) {
                return s.cell.x0 <= grown.x1 && s.cell.x1 >= grown.x0 && s.cell.y0 <= grown.y1 &&
                       s.cell.y1 >= grown.y0;
            });
        if (by_root) cl.explained_by = "root";
        else if (by_suspicious) cl.explained_by = "suspicious";
        else {
            const bool real = std::any_of(members.begin(), members.end(), [&](const auto& m) {
                const Rectangle c{node(a, b, m.first, n), node(a, b, m.first + 1, n), node(a, b, m.second, n),
                                  node(a, b, m.second + 1, n)};
                return survives(H, c, 3);
            });
            if (!real) cl.explained_by = "cleared";
        }
        out.clusters.push_back(cl);
    }

    out.consistent = out.roots_outside == 0 &&
                     std::all_of(out.clusters.begin(), out.clusters.end(),
                                 [](const OracleCluster& c) { return !c.explained_by.empty(); });
    report.oracle = out;
    return out;
}

OracleReport check_against_oracle(const ExtendedMap& ext, FixedPointReport& report, const FixedPointOptions& opts) {
    square_of(ext);
    return check_against_oracle(extended_fn(ext), report, opts);
}

bool Eq7Report::no_artificial() const {
    return std::none_of(factor_roots.begin(), factor_roots.end(),
                        [](const Eq7Root& r) { return r.in_box && r.x != r.y; });
}

Eq7Report closed_form_eq7(double p, double q, double r) {
    if (!(p > 0.0 && p <= q && r > 0.0)) throw Error(ErrorCode::ParamConstraint, "need 0 < p <= q and r > 0");
    Eq7Report rep;
    rep.regimes = eq7_regimes(p, q, r);
    rep.equilibrium = eq7_equilibrium(p, q, r);
    if (r == 1.0) return rep;  // the factor reduces to the constant p
    const double A = r - 1.0, B = -(r - 1.0) * (q - 1.0), C = p;
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return rep;
    const double s = std::sqrt(disc);
    // cancellation-free pair of roots
    const double u = -0.5 * (B + std::copysign(s, B));
    std::vector<double> xs = {u / A, C / u};
    std::sort(xs.begin(), xs.end());
    if (disc == 0.0) xs.resize(1);
    for (double x : xs) {
        Eq7Root root;
        root.x = x;
        root.y = q - 1.0 - x;
        if (root.x > 0.0 && root.y > 0.0) root.quadrant = 1;
        else if (root.x < 0.0 && root.y > 0.0) root.quadrant = 2;
        else if (root.x < 0.0 && root.y < 0.0) root.quadrant = 3;
        else if (root.x > 0.0 && root.y < 0.0) root.quadrant = 4;
        root.in_box = root.x >= 0.0 && root.y >= 0.0 && root.x <= q && root.y <= q;
        rep.factor_roots.push_back(root);
    }
    return rep;
}

Eq8LineFamily closed_form_eq8_line_family(double p, double h, double m_probe, int samples) {
    if (!(std::isfinite(p) && std::isfinite(h))) throw Error(ErrorCode::ParamConstraint, "parameters must be finite");
    if (std::abs(h - 0.5) <= 1e-12) {
        throw Error(ErrorCode::DegenerateCase, "h = 1/2: artificial fixed points fill the line x + y = 2p - 1");
    }
    if (!(p > 0.0 && h > 0.0 && h < p && h < 0.5)) throw Error(ErrorCode::ParamConstraint, "need 0 < h < min(p, 1/2)");
    if (!(m_probe > 0.0)) throw Error(ErrorCode::ParamConstraint, "m_probe must be positive");
    if (samples < 2) throw Error(ErrorCode::ConfigError, "need at least two samples");

    const Eq8Facts facts = eq8_facts(p, h);
    const double xs = facts.x_star, c = facts.c;
    const double m0 = (c - xs) / xs;

    Eq8LineFamily out;
    out.x_star = xs;
    out.c = c;
    out.b3 = facts.b3;

    auto eval = [&](double m, double& x, double& y) {
        const double qa = m * (1.0 + m), qb = m * (1.0 + xs) + p - p * m, qc = p * xs;
        const double s = std::sqrt(qb * qb + 4.0 * qa * qc);
        x = qb >= 0.0 ? 2.0 * qc / (qb + s) : (s - qb) / (2.0 * qa);
        y = m * x + xs;
        const double xp = m * x * xs / (c - xs);
        return (p + 2.0 * p * xp) / (1.0 + xp + y) - h - x;
    };

    out.m = m_probe;
    out.M = m_probe - m0;
    out.residual = eval(m_probe, out.x, out.y);

    out.residual_min = std::numeric_limits<double>::infinity();
    out.residual_max = -std::numeric_limits<double>::infinity();
    const double lo = std::log(1e-6 * m0), hi = std::log(1e6 * m0);
    for (int k = 0; k < samples; ++k) {
        const double M = std::exp(lo + (hi - lo) * k / (samples - 1));
        double x = 0.0, y = 0.0;
        const double R = eval(m0 + M, x, y);
        if (y > c) continue;
        ++out.samples;
        out.residual_min = std::min(out.residual_min, R);
        out.residual_max = std::max(out.residual_max, R);
    }
    out.sign_constant = out.samples > 0 && (out.residual_min > 0.0 || out.residual_max < 0.0);
    return out;
}

}  // namespace monomap
