#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monomap/extension.hpp"
#include "monomap/types.hpp"

namespace monomap {

enum class Variant { Sym2, Sym4, Sym8 };
std::string to_string(Variant v);

using State = std::vector<double>;

/// Symmetric monotone embedding of an extended (up, down) map on [a,b]^2.
///   Sym2: G(x,y) = (F(x,y), F(y,x))
///   Sym4: G((x,y),(u,v)) = ((F(x,y), u), (F(u,v), x))
///   Sym8: G((X,Y),(U,V)) = (((F(X), F(V)), X), ((F(U), F(Y)), U))
/// The order is componentwise with the sign pattern in `signs`: s <= t iff signs[i]*(t[i]-s[i]) >= 0.
struct EmbeddedSystem {
    Variant variant = Variant::Sym4;
    ExtendedMap source;
    int state_dim = 4;
    std::vector<int> signs;
    double a = 0.0;
    double b = 1.0;

    State min_corner() const;
    State max_corner() const;
    bool leq(const State& s, const State& t, double tol = 0.0) const;
    /// Smallest signed gap signs[i]*(t[i]-s[i]); non-negative iff s <= t.
    double order_margin(const State& s, const State& t) const;
};

/// Requires an (up, down) signature and a square extension rectangle.
/// F̃ values leaving [a,b] are clamped back, which changes nothing when the
/// rectangle is invariant and keeps G a self-map otherwise.
EmbeddedSystem build_embedding(const ExtendedMap& ext, Variant variant);

State step(const EmbeddedSystem& sys, const State& s);

/// The (x, y) pair a state of G stands for; fixed points of G reduce to
/// solutions of (F̃(x,y), F̃(y,x)) = (x, y).
Point2 reduce_state(const EmbeddedSystem& sys, const State& s);

/// Finite-difference Jacobian of the Sym2 map at p.
Mat2 sym2_jacobian(const EmbeddedSystem& sys, const Point2& p, double h = 1e-6);

struct OrderAudit {
    int pairs = 0;
    int violations = 0;
    double worst_margin = 0.0;  // most negative order margin of (G(s), G(t)); >= -tol when passing
    std::optional<std::pair<State, State>> witness;
    bool passed() const { return violations == 0; }
};

OrderAudit check_order_preserving(const EmbeddedSystem& sys, int n_pairs, std::uint64_t seed = 1,
                                  double rel_tol = 1e-9);

enum class ChainStart { MinCorner, MaxCorner };
std::string to_string(ChainStart s);

enum class ChainStatus { Converged, MaxIterations, SlowConvergence };
std::string to_string(ChainStatus s);

struct CornerChain {
    ChainStart start = ChainStart::MinCorner;
    std::vector<State> states;
    std::vector<double> step_norms;  // ||s_{n+1} - s_n||_inf, one per recorded step
    std::optional<State> limit;
    bool monotone_verified = true;
    ChainStatus status = ChainStatus::MaxIterations;
    double residual = 0.0;  // ||G(limit) - limit||_inf
    int iterations = 0;
};

struct ChainOptions {
    int max_iter = 100000;
    double tol_chain = 0.0;  // <= 0: 1e-10 (b-a)
    double tol_fp = 0.0;     // <= 0: 1e-9 (b-a)
    bool keep_states = true;
};

struct ChainPair {
    CornerChain lower;
    CornerChain upper;
    bool ordered = true;  // lower.limit <= upper.limit
    /// Both limits reduce to the same diagonal point (within tol_fp).
    std::optional<double> common_diagonal_limit;
};

/// Iterates G from both corners. Each step must move up (resp. down) in the
/// order; a violation raises ChainMonotonicityBroken naming the step.
ChainPair run_corner_chains(const EmbeddedSystem& sys, const ChainOptions& opts = {});

struct BracketAudit {
    int samples = 0;
    int violations = 0;
    double worst_margin = 0.0;
    bool passed() const { return violations == 0; }
};

/// G^n(min) <= G^n(s) <= G^n(max) for random s and each n in ns.
BracketAudit check_bracketing(const EmbeddedSystem& sys, int n_samples, const std::vector<int>& ns,
                              std::uint64_t seed = 1, double rel_tol = 1e-9);

enum class SqueezeCase { None, CaseI, CaseII };
std::string to_string(SqueezeCase c);

struct SqueezeReport {
    SqueezeCase applied = SqueezeCase::None;
    std::vector<double> hypothesis_margins;  // of the case that applied, all >= 0
    std::vector<double> chain_margins;       // order margins of the four links, all >= -tol when holding
    bool holds = false;
};

/// With X = (x,y), Y = (u,v):
///  (i)  x <= v <= y <= u, u <= F(u,v), F(x,y) <= x  gives  G(X,Y) <= (X,Y) <= (X,X) <= (Y,X) <= G(Y,X)
///  (ii) v <= x <= u <= y, F(u,v) <= u, x <= F(x,y)  gives  (X,Y) <= G(X,Y) <= G(X,X) <= G(Y,X) <= (Y,X)
SqueezeReport squeeze_bounds(const EmbeddedSystem& sys, const Point2& X, const Point2& Y,
                             double rel_tol = 1e-12);

}  // namespace monomap
