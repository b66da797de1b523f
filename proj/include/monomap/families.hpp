#pragma once

#include <functional>
#include <string>
#include <vector>

#include "monomap/geometry.hpp"
#include "monomap/map_model.hpp"

namespace monomap {

enum class FamilyId { RationalPQR, RationalPQRH, XfY };
std::string to_string(FamilyId id);

/// A built-in map with its invariant domain and the equilibrium known in closed form.
struct FamilyInstance {
    FamilyId id = FamilyId::RationalPQR;
    MapSpec map;
    DomainSpec domain;
    double equilibrium = 0.0;
};

// (p + q x) / (1 + x + r y) on [0,q]^2, requires 0 < p <= q and r > 0.
FamilyInstance make_eq7(double p, double q, double r);

/// Positive root of (1+r)x^2 + (1-q)x - p.
double eq7_equilibrium(double p, double q, double r);

enum class Eq7Regime { SmallQ, SmallR, LargeP };
std::string to_string(Eq7Regime r);
/// Regimes in which the map has no artificial fixed points on [0,q]^2.
std::vector<Eq7Regime> eq7_regimes(double p, double q, double r);

/// Artificial pairs (x, q-1-x) from the factor (r-1)x^2 - (r-1)(q-1)x + p; empty when none are real.
std::vector<Point2> eq7_artificial_pairs(double p, double q, double r);

/// (p + 2p x) / (1 + x + y) - h on the invariant pentagon with vertices
/// (c,c), (x*,c), (0,x*), (0,0), (c,0); requires 0 < h < min(p, 1/2).
/// h == 1/2 raises DegenerateCase: the artificial points fill the line x + y = 2p - 1.
FamilyInstance make_eq8(double p, double h);

/// The general form (p + q x)/(1 + x + r y) - h on [0, box]^2; no invariant domain is claimed.
MapSpec make_eq8_general(double p, double q, double r, double h, double box);

struct Eq8Facts {
    double x_star = 0.0;
    double c = 0.0;
    double trace = 0.0;  // Jacobian of the companion map at (x*, x*)
    double det = 0.0;
    double b3 = 0.0;     // leading cubic coefficient of the line-family residual
    double invariance_margin = 0.0;  // c - (x* + p c / (1 + c)), positive when the domain maps inside
};
Eq8Facts eq8_facts(double p, double h);

/// x f(y) on [lo, hi]^2. f is checked on a sample to be decreasing with f(lo) > 1.
/// The map need not keep the box invariant.
FamilyInstance make_xfy(std::function<double(double)> f, const std::string& f_name, double lo, double hi);

}  // namespace monomap
