#include "monomap/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "monomap/error.hpp"
#include "monomap/parallel.hpp"
#include "monomap/rng.hpp"

namespace monomap {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Sym2: return "Sym2";
        case Variant::Sym4: return "Sym4";
        case Variant::Sym8: return "Sym8";
    }
    return "?";
}

std::string to_string(ChainStart s) { return s == ChainStart::MinCorner ? "MinCorner" : "MaxCorner"; }

std::string to_string(ChainStatus s) {
    switch (s) {
        case ChainStatus::Converged: return "Converged";
        case ChainStatus::MaxIterations: return "MaxIterations";
        case ChainStatus::SlowConvergence: return "SlowConvergence";
    }
    return "?";
}

std::string to_string(SqueezeCase c) {
    switch (c) {
        case SqueezeCase::None: return "none";
        case SqueezeCase::CaseI: return "i";
        case SqueezeCase::CaseII: return "ii";
    }
    return "?";
}

State EmbeddedSystem::min_corner() const {
    State s(state_dim);
    for (int i = 0; i < state_dim; ++i) s[i] = signs[i] > 0 ? a : b;
    return s;
}

State EmbeddedSystem::max_corner() const {
    State s(state_dim);
    for (int i = 0; i < state_dim; ++i) s[i] = signs[i] > 0 ? b : a;
    return s;
}

double EmbeddedSystem::order_margin(const State& s, const State& t) const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < state_dim; ++i) m = std::min(m, signs[i] * (t[i] - s[i]));
    return m;
}

bool EmbeddedSystem::leq(const State& s, const State& t, double tol) const { return order_margin(s, t) >= -tol; }

EmbeddedSystem build_embedding(const ExtendedMap& ext, Variant variant) {
    if (!ext.base.signature.is_up_down()) {
        throw Error(ErrorCode::NotMixedMonotone, "the symmetric embedding needs F(up, down), got " +
                                                     to_string(ext.base.signature));
    }
    const Rectangle& r = ext.rect;
    if (!r.is_square(1e-12 * std::max(1.0, r.diameter()))) {
        throw Error(ErrorCode::ConfigError, "the embedding needs a square rectangle [a,b]^2");
    }
    EmbeddedSystem sys;
    sys.variant = variant;
    sys.source = ext;
    sys.a = r.x0;
    sys.b = r.x1;
    switch (variant) {
        case Variant::Sym2: sys.signs = {+1, -1}; break;
        case Variant::Sym4: sys.signs = {+1, -1, -1, +1}; break;
        case Variant::Sym8: sys.signs = {+1, -1, +1, -1, -1, +1, -1, +1}; break;
    }
    sys.state_dim = static_cast<int>(sys.signs.size());
    return sys;
}

namespace {

double Fc(const EmbeddedSystem& sys, double x, double y) {
    return std::clamp(eval_extended(sys.source, {x, y}), sys.a, sys.b);
}

void check_state(const EmbeddedSystem& sys, const State& s) {
    if (static_cast<int>(s.size()) != sys.state_dim) {
        throw Error(ErrorCode::ConfigError, "state has the wrong dimension");
    }
    const double tol = 1e-12 * std::max(1.0, sys.b - sys.a);
    for (double v : s) {
        if (!(v >= sys.a - tol && v <= sys.b + tol)) {
            std::ostringstream os;
            os << "state component " << v << " outside [" << sys.a << ", " << sys.b << "]";
            throw Error(ErrorCode::OutsideRect, os.str());
        }
    }
}

double inf_dist(const State& s, const State& t) {
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) d = std::max(d, std::abs(s[i] - t[i]));
    return d;
}

State random_state(const EmbeddedSystem& sys, Rng& rng) {
    State s(sys.state_dim);
    for (auto& v : s) v = rng.uniform(sys.a, sys.b);
    return s;
}

}  // namespace

State step(const EmbeddedSystem& sys, const State& s) {
    check_state(sys, s);
    switch (sys.variant) {
        case Variant::Sym2: return {Fc(sys, s[0], s[1]), Fc(sys, s[1], s[0])};
        case Variant::Sym4: return {Fc(sys, s[0], s[1]), s[2], Fc(sys, s[2], s[3]), s[0]};
        case Variant::Sym8: {
            // (x1,x2, y1,y2, u1,u2, v1,v2)
            return {Fc(sys, s[0], s[1]), Fc(sys, s[6], s[7]), s[0], s[1],
                    Fc(sys, s[4], s[5]), Fc(sys, s[2], s[3]), s[4], s[5]};
        }
    }
    return s;
}

Point2 reduce_state(const EmbeddedSystem& sys, const State& s) {
    switch (sys.variant) {
        case Variant::Sym2: return {s[0], s[1]};
        case Variant::Sym4: return {s[0], s[1]};
        case Variant::Sym8: return {s[0], s[1]};
    }
    return {};
}

Mat2 sym2_jacobian(const EmbeddedSystem& sys, const Point2& p, double h) {
    auto G = [&](double x, double y) {
        return Point2{eval_extended(sys.source, {x, y}), eval_extended(sys.source, {y, x})};
    };
    auto diff = [&](double lo, double hi) { return std::pair{std::max(sys.a, lo), std::min(sys.b, hi)}; };
    const auto [x0, x1] = diff(p.x - h, p.x + h);
    const auto [y0, y1] = diff(p.y - h, p.y + h);
    const Point2 gx = (G(x1, p.y) - G(x0, p.y)) * (1.0 / (x1 - x0));
    const Point2 gy = (G(p.x, y1) - G(p.x, y0)) * (1.0 / (y1 - y0));
    return {gx.x, gy.x, gx.y, gy.y};
}

OrderAudit check_order_preserving(const EmbeddedSystem& sys, int n_pairs, std::uint64_t seed, double rel_tol) {
    OrderAudit audit;
    const double tol = rel_tol * (sys.b - sys.a);
    Rng rng(seed);
    for (int k = 0; k < n_pairs; ++k) {
        State s = random_state(sys, rng);
        State t = s;
        const double scale = rng.uniform() < 0.5 ? 1e-3 : 1.0;
        for (int i = 0; i < sys.state_dim; ++i) {
            t[i] = std::clamp(s[i] + sys.signs[i] * scale * rng.uniform() * (sys.b - sys.a), sys.a, sys.b);
        }
        const double m = sys.order_margin(step(sys, s), step(sys, t));
        ++audit.pairs;
        if (m < audit.worst_margin) audit.worst_margin = m;
        if (m < -tol) {
            if (!audit.witness) audit.witness = std::make_pair(s, t);
            ++audit.violations;
        }
    }
    return audit;
}

namespace {

CornerChain run_chain(const EmbeddedSystem& sys, ChainStart start, const ChainOptions& opts, double tol_chain,
                      double tol_fp) {
    CornerChain c;
    c.start = start;
    const int dir = start == ChainStart::MinCorner ? 1 : -1;
    State s = start == ChainStart::MinCorner ? sys.min_corner() : sys.max_corner();
    if (opts.keep_states) c.states.push_back(s);
    double prev_step = -1.0;
    double checkpoint = -1.0;
    for (int n = 1; n <= opts.max_iter; ++n) {
        State t = step(sys, s);
        const double m = dir > 0 ? sys.order_margin(s, t) : sys.order_margin(t, s);
        if (m < -tol_chain) {
            c.monotone_verified = false;
            std::ostringstream os;
            os << to_string(start) << " chain leaves its order cone at step " << n << " (margin " << m << ")";
            throw Error(ErrorCode::ChainMonotonicityBroken, os.str());
        }
        const double st = inf_dist(s, t);
        s = std::move(t);
        c.iterations = n;
        c.step_norms.push_back(st);
        if (opts.keep_states) c.states.push_back(s);

        // a-posteriori bound on the distance to the limit, from the contraction ratio
        bool done = st == 0.0 || st < 1e-3 * tol_chain;
        if (!done && prev_step > 0.0) {
            const double rho = st / prev_step;
            done = rho < 1.0 && st * rho / (1.0 - rho) < tol_chain && st < tol_chain;
        }
        prev_step = st;
        if (done) {
            c.status = ChainStatus::Converged;
            break;
        }
        if (n % 1000 == 0) {
            if (checkpoint > 0.0 && st > 0.999 * checkpoint) {
                c.status = ChainStatus::SlowConvergence;
                break;
            }
            checkpoint = st;
        }
    }
    if (!opts.keep_states) c.states.push_back(s);
    c.residual = inf_dist(step(sys, s), s);
    if (c.status == ChainStatus::Converged && c.residual <= tol_fp) c.limit = s;
    return c;
}

}  // namespace

ChainPair run_corner_chains(const EmbeddedSystem& sys, const ChainOptions& opts) {
    if (opts.max_iter < 1) throw Error(ErrorCode::ConfigError, "max_iter must be at least 1");
    const double w = sys.b - sys.a;
    const double tol_chain = opts.tol_chain > 0.0 ? opts.tol_chain : 1e-10 * w;
    const double tol_fp = opts.tol_fp > 0.0 ? opts.tol_fp : 1e-9 * w;

    ChainPair out;
    parallel_for(2, [&](int i) {
        if (i == 0) out.lower = run_chain(sys, ChainStart::MinCorner, opts, tol_chain, tol_fp);
        else out.upper = run_chain(sys, ChainStart::MaxCorner, opts, tol_chain, tol_fp);
    });
    if (out.lower.limit && out.upper.limit) {
        out.ordered = sys.leq(*out.lower.limit, *out.upper.limit, tol_fp);
        const Point2 lo = reduce_state(sys, *out.lower.limit);
        const Point2 hi = reduce_state(sys, *out.upper.limit);
        const double spread = std::max({std::abs(lo.x - lo.y), std::abs(hi.x - hi.y), std::abs(lo.x - hi.x)});
        if (spread <= tol_fp) out.common_diagonal_limit = 0.25 * (lo.x + lo.y + hi.x + hi.y);
    }
    return out;
}

BracketAudit check_bracketing(const EmbeddedSystem& sys, int n_samples, const std::vector<int>& ns,
                              std::uint64_t seed, double rel_tol) {
    BracketAudit audit;
    const double tol = rel_tol * (sys.b - sys.a);
    int n_max = 0;
    for (int n : ns) n_max = std::max(n_max, n);
    // corner orbits once, then each sample
    std::vector<State> lo(n_max + 1), hi(n_max + 1);
    lo[0] = sys.min_corner();
    hi[0] = sys.max_corner();
    for (int n = 1; n <= n_max; ++n) {
        lo[n] = step(sys, lo[n - 1]);
        hi[n] = step(sys, hi[n - 1]);
    }
    Rng rng(seed);
    for (int k = 0; k < n_samples; ++k) {
        State s = random_state(sys, rng);
        for (int n = 1; n <= n_max; ++n) {
            s = step(sys, s);
            if (std::find(ns.begin(), ns.end(), n) == ns.end()) continue;
            const double m = std::min(sys.order_margin(lo[n], s), sys.order_margin(s, hi[n]));
            ++audit.samples;
            audit.worst_margin = std::min(audit.worst_margin, m);
            if (m < -tol) ++audit.violations;
        }
    }
    return audit;
}

SqueezeReport squeeze_bounds(const EmbeddedSystem& sys, const Point2& X, const Point2& Y, double rel_tol) {
    if (sys.variant != Variant::Sym4) throw Error(ErrorCode::ConfigError, "squeeze bounds apply to Sym4");
    SqueezeReport r;
    const double tol = rel_tol * std::max(1.0, sys.b - sys.a);
    const double x = X.x, y = X.y, u = Y.x, v = Y.y;
    auto F = [&](double p, double q) { return eval_extended(sys.source, {p, q}); };
    auto pair = [](const Point2& P, const Point2& Q) { return State{P.x, P.y, Q.x, Q.y}; };

    const std::vector<double> h1 = {v - x, y - v, u - y, F(u, v) - u, x - F(x, y)};
    const std::vector<double> h2 = {x - v, u - x, y - u, u - F(u, v), F(x, y) - x};
    auto ok = [&](const std::vector<double>& h) {
        return std::all_of(h.begin(), h.end(), [&](double m) { return m >= -tol; });
    };

    const State XY = pair(X, Y), XX = pair(X, X), YX = pair(Y, X);
    std::vector<State> links;
    if (ok(h1)) {
        r.applied = SqueezeCase::CaseI;
        r.hypothesis_margins = h1;
        links = {step(sys, XY), XY, XX, YX, step(sys, YX)};
    } else if (ok(h2)) {
        r.applied = SqueezeCase::CaseII;
        r.hypothesis_margins = h2;
        links = {XY, step(sys, XY), step(sys, XX), step(sys, YX), YX};
    } else {
        return r;
    }
    r.holds = true;
    for (std::size_t i = 0; i + 1 < links.size(); ++i) {
        const double m = sys.order_margin(links[i], links[i + 1]);
        r.chain_margins.push_back(m);
        if (m < -tol) r.holds = false;
    }
    return r;
}

}  // namespace monomap
