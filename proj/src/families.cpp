#include "monomap/families.hpp"

#include <cmath>
#include <sstream>

#include "monomap/error.hpp"

namespace monomap {

std::string to_string(FamilyId id) {
    switch (id) {
        case FamilyId::RationalPQR: return "RationalPQR";
        case FamilyId::RationalPQRH: return "RationalPQRH";
        case FamilyId::XfY: return "XfY";
    }
    return "?";
}

std::string to_string(Eq7Regime r) {
    switch (r) {
        case Eq7Regime::SmallQ: return "q<=1";
        case Eq7Regime::SmallR: return "r<=1";
        case Eq7Regime::LargeP: return "r>1,p>(r-1)(q-1)^2/4";
    }
    return "?";
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::ParamConstraint, what);
}

std::string fmt(const char* name, std::initializer_list<double> v) {
    std::ostringstream os;
    os << name << "(";
    bool first = true;
    for (double x : v) {
        os << (first ? "" : ",") << x;
        first = false;
    }
    os << ")";
    return os.str();
}

}  // namespace

double eq7_equilibrium(double p, double q, double r) {
    const double a = 1.0 + r, b = 1.0 - q, c = -p;
    return (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
}

FamilyInstance make_eq7(double p, double q, double r) {
    require(std::isfinite(p) && std::isfinite(q) && std::isfinite(r), "parameters must be finite");
    require(p > 0.0 && p <= q, "need 0 < p <= q");
    require(r > 0.0, "need r > 0");
    FamilyInstance fi;
    fi.id = FamilyId::RationalPQR;
    fi.map.name = fmt("rational_pqr", {p, q, r});
    fi.map.eval = [](double x, double y, std::span<const double> k) {
        return (k[0] + k[1] * x) / (1.0 + x + k[2] * y);
    };
    fi.map.signature = {Monotone::NonDecreasing, Monotone::NonIncreasing};
    fi.map.params = {p, q, r};
    fi.map.param_names = {"p", "q", "r"};
    fi.map.domain_box = {0.0, q, 0.0, q};
    fi.domain = make_rectangle_domain(fi.map.domain_box);
    fi.equilibrium = eq7_equilibrium(p, q, r);
    require(fi.equilibrium < q, "equilibrium is not below q");
    return fi;
}

std::vector<Eq7Regime> eq7_regimes(double p, double q, double r) {
    std::vector<Eq7Regime> out;
    if (q <= 1.0) out.push_back(Eq7Regime::SmallQ);
    if (r > 0.0 && r <= 1.0) out.push_back(Eq7Regime::SmallR);
    if (r > 1.0 && p > 0.25 * (r - 1.0) * (q - 1.0) * (q - 1.0)) out.push_back(Eq7Regime::LargeP);
    return out;
}

std::vector<Point2> eq7_artificial_pairs(double p, double q, double r) {
    if (r == 1.0) return {};
    const double a = r - 1.0, b = -(r - 1.0) * (q - 1.0), c = p;
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) return {};
    const double s = std::sqrt(disc);
    std::vector<Point2> out;
    for (double x : {(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)}) {
        const double y = q - 1.0 - x;
        if (x >= 0.0 && y >= 0.0 && x <= q && y <= q) out.push_back({x, y});
    }
    return out;
}

MapSpec make_eq8_general(double p, double q, double r, double h, double box) {
    require(p > 0.0 && q >= p && h > 0.0 && p > h && r > 0.0, "need q >= p > h > 0 and r > 0");
    require(box > 0.0, "box must be positive");
    MapSpec m;
    m.name = fmt("rational_pqrh", {p, q, r, h});
    m.eval = [](double x, double y, std::span<const double> k) {
        return (k[0] + k[1] * x) / (1.0 + x + k[2] * y) - k[3];
    };
    m.signature = {Monotone::NonDecreasing, Monotone::NonIncreasing};
    m.params = {p, q, r, h};
    m.param_names = {"p", "q", "r", "h"};
    m.domain_box = {0.0, box, 0.0, box};
    return m;
}

Eq8Facts eq8_facts(double p, double h) {
    Eq8Facts f;
    const double x = p - h;
    f.x_star = x;
    f.c = x * (x + p + 1.0) / h;
    f.trace = p / (1.0 + 2.0 * x);
    f.det = f.trace;
    f.b3 = h * h * h * (1.0 - h) * (1.0 - h) *
           (4.0 * x * x * x + 4.0 * x * x + (1.0 - h) * (3.0 * h + 1.0) * x + h * (1.0 - h - h * h));
    f.invariance_margin = f.c - (x + p * f.c / (1.0 + f.c));
    return f;
}

FamilyInstance make_eq8(double p, double h) {
    require(std::isfinite(p) && std::isfinite(h), "parameters must be finite");
    require(p > 0.0 && h > 0.0 && h < p, "need 0 < h < p");
    if (std::abs(h - 0.5) <= 1e-12) {
        throw Error(ErrorCode::DegenerateCase,
                    "h = 1/2: artificial fixed points fill the line x + y = 2p - 1");
    }
    require(h < 0.5, "need h < 1/2");
    const Eq8Facts facts = eq8_facts(p, h);
    const double x = facts.x_star, c = facts.c;
    FamilyInstance fi;
    fi.id = FamilyId::RationalPQRH;
    fi.map = make_eq8_general(p, 2.0 * p, 1.0, h, c);
    fi.map.name = fmt("rational_pqrh", {p, h});
    fi.domain = make_polygon_domain({{c, c}, {x, c}, {0.0, x}, {0.0, 0.0}, {c, 0.0}});
    fi.equilibrium = x;
    return fi;
}

FamilyInstance make_xfy(std::function<double(double)> f, const std::string& f_name, double lo, double hi) {
    require(lo < hi, "need lo < hi");
    constexpr int kSamples = 256;
    double prev = f(lo);
    require(std::isfinite(prev), "f must be finite");
    require(prev > 1.0, "need f > 1 at the lower end of the box");
    for (int i = 1; i <= kSamples; ++i) {
        const double v = f(lo + (hi - lo) * i / kSamples);
        require(std::isfinite(v), "f must be finite");
        require(v <= prev, "f must be decreasing");
        prev = v;
    }
    require(prev < f(lo), "f must be decreasing");
    require(prev < 1.0, "f must drop below 1 inside the box for an equilibrium to exist");

    // f(x*) = 1
    double a = lo, b = hi;
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
        const double m = 0.5 * (a + b);
        if (f(m) > 1.0) a = m;
        else b = m;
    }
    FamilyInstance fi;
    fi.id = FamilyId::XfY;
    fi.map.name = "xfy(" + f_name + ")";
    auto fn = std::move(f);
    fi.map.eval = [fn](double x, double y, std::span<const double>) { return x * fn(y); };
    fi.map.signature = {Monotone::NonDecreasing, Monotone::NonIncreasing};
    fi.map.domain_box = {lo, hi, lo, hi};
    fi.domain = make_rectangle_domain(fi.map.domain_box);
    fi.equilibrium = 0.5 * (a + b);
    return fi;
}

}  // namespace monomap
