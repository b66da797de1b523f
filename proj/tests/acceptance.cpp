// One line per acceptance criterion; the exit status is non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "monomap/cli.hpp"
#include "monomap/embedding.hpp"
#include "monomap/error.hpp"
#include "monomap/extension.hpp"
#include "monomap/families.hpp"
#include "monomap/fixed_points.hpp"
#include "monomap/rng.hpp"
#include "monomap/stability.hpp"

using namespace monomap;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail.str("");
            detail << "failed: " << what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// the positive root of a x^2 + b x + c by plain bisection on [0, hi]
double bisect_positive_root(double a, double b, double c, double hi) {
    auto g = [&](double x) { return (a * x + b) * x + c; };
    double lo = 0.0;
    while (g(hi) < 0.0) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("monomap_acceptance_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv = {"monomap"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Check criterion1() {
    Check c;
    const double cases[][2] = {{1.0, 0.3}, {0.6, 0.2}, {1.0, 0.45}, {0.4, 0.3}};
    double worst_time = 0.0;
    for (const auto& ph : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        const FamilyInstance fi = make_eq8(ph[0], ph[1]);
        const double xs = ph[0] - ph[1];
        CertifyConfig cfg;
        cfg.tol_orbit = 1e-6;
        const StabilityCertificate cert = certify(fi.map, fi.domain, cfg);
        const double t = seconds_since(t0);
        worst_time = std::max(worst_time, t);
        std::ostringstream tag;
        tag << "pqrh(" << ph[0] << "," << ph[1] << ") ";
        const std::string s = tag.str();
        c.require(cert.invariance && cert.invariance->verified && cert.invariance->violations == 0 &&
                      cert.invariance->samples >= 10000,
                  s + "invariance");
        c.require(cert.extension_audit && cert.extension_audit->passed() && cert.extension_audit->nice_mode,
                  s + "extension audit");
        c.require(cert.artificial_search && cert.artificial_search->artificial.empty() &&
                      cert.artificial_search->suspicious.empty() && cert.artificial_search->oracle &&
                      cert.artificial_search->oracle->consistent,
                  s + "artificial search");
        c.require(cert.lower_limit && cert.upper_limit && std::abs(cert.lower_limit->x - xs) <= 1e-8 &&
                      std::abs(cert.lower_limit->y - xs) <= 1e-8 && std::abs(cert.upper_limit->x - xs) <= 1e-8 &&
                      std::abs(cert.upper_limit->y - xs) <= 1e-8,
                  s + "Sym4 chain limits");
        c.require(cert.ensemble && cert.ensemble->orbits == 100 && cert.ensemble->converged == 100 &&
                      cert.ensemble->domain_exits == 0,
                  s + "orbit ensemble");
        c.require(cert.verdict == Verdict::GloballyStable && cert.x_star && std::abs(*cert.x_star - xs) <= 1e-8,
                  s + "verdict");
        c.require(t < 30.0, s + "runtime");
    }
    if (c.ok) c.detail << "4 parameter pairs certified at p-h, slowest " << worst_time << " s";
    return c;
}

Check criterion2() {
    Check c;
    const double regimes[][3] = {{1.0, 1.0, 5.0}, {2.0, 3.0, 0.5}, {1.1, 3.0, 2.0}};
    for (const auto& k : regimes) {
        const double p = k[0], q = k[1], r = k[2];
        const FamilyInstance fi = make_eq7(p, q, r);
        std::ostringstream tag;
        tag << "pqr(" << p << "," << q << "," << r << ") ";
        const ExtendedMap ext = extend(fi.map, fi.domain);
        FixedPointReport rep = find_artificial(ext);
        check_against_oracle(ext, rep);
        c.require(rep.clean() && rep.oracle->consistent, tag.str() + "artificial search");
        const StabilityCertificate cert = certify(fi.map, fi.domain);
        const double oracle = bisect_positive_root(1.0 + r, 1.0 - q, -p, q);
        c.require(cert.verdict == Verdict::GloballyStable && cert.x_star && std::abs(*cert.x_star - oracle) <= 1e-9,
                  tag.str() + "certificate");
    }
    {
        const FamilyInstance fi = make_eq7(0.5, 2.0, 4.0);
        const ExtendedMap ext = extend(fi.map, fi.domain);
        FixedPointReport rep = find_artificial(ext);
        check_against_oracle(ext, rep);
        // (r-1) x^2 - (r-1)(q-1) x + p = 3x^2 - 3x + 0.5
        const double disc = std::sqrt(9.0 - 4.0 * 3.0 * 0.5);
        const double lo = (3.0 - disc) / 6.0, hi = (3.0 + disc) / 6.0;
        c.require(rep.artificial.size() == 1 && std::abs(rep.artificial[0].x - lo) <= 1e-6 &&
                      std::abs(rep.artificial[0].y - hi) <= 1e-6 && rep.oracle->consistent,
                  "pqr(0.5,2,4) artificial pair");
        const StabilityCertificate cert = certify(fi.map, fi.domain);
        c.require(cert.verdict == Verdict::Inconclusive, "pqr(0.5,2,4) must be Inconclusive");
        if (c.ok) {
            c.detail << "3 regimes GloballyStable against bisection; (0.5,2,4) pair (" << rep.artificial[0].x << ", "
                     << rep.artificial[0].y << "), Inconclusive";
        }
    }
    return c;
}

Check criterion3() {
    Check c;
    const FamilyInstance fi = make_xfy([](double y) { return 2.0 / (1.0 + y); }, "2/(1+y)", 0.01, 3.0);
    const ExtendedMap ext = extend(fi.map, fi.domain);
    const EmbeddedSystem sys = build_embedding(ext, Variant::Sym2);
    const Mat2 j = sym2_jacobian(sys, {1.0, 1.0});
    const Eigen2 e = eigenvalues(j);
    const double xfp = 1.0 * (-2.0 / 4.0);  // x* f'(x*) at x* = 1
    c.require(std::abs(e.re1 - (1.0 - xfp)) <= 1e-4 && std::abs(e.re2 - (1.0 + xfp)) <= 1e-4 && e.im1 == 0.0,
              "Sym2 eigenvalues");
    const ChainPair chains = run_corner_chains(sys);
    double margin = 0.0;
    if (chains.lower.limit && chains.upper.limit) {
        const Point2 lo = reduce_state(sys, *chains.lower.limit), hi = reduce_state(sys, *chains.upper.limit);
        margin = std::max(std::abs(lo.x - hi.x), std::abs(lo.y - hi.y));
    }
    c.require(chains.lower.limit && chains.upper.limit && margin > 0.1, "Sym2 chains must end apart");
    const FixedPointReport rep = find_artificial(ext);
    c.require(!rep.artificial.empty(), "artificial pair on the Sym2 system");
    if (c.ok) {
        c.detail << "eigenvalues " << e.re1 << ", " << e.re2 << "; chain limits " << margin << " apart; "
                 << rep.artificial.size() << " artificial pair(s)";
    }
    return c;
}

// random convex polygon inside [0,1]^2 and a random mixed-monotone rational map
struct Trial {
    MapSpec map;
    DomainSpec domain;
};

Trial random_trial(Rng& rng) {
    const int n = 5 + static_cast<int>(rng.next() % 8);
    const Point2 centre{rng.uniform(0.35, 0.65), rng.uniform(0.35, 0.65)};
    const double rx = rng.uniform(0.15, 0.33), ry = rng.uniform(0.15, 0.33), phase = rng.uniform(0.0, 1.0);
    std::vector<double> ang(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ang[i] = 2.0 * std::numbers::pi * (i + phase + 0.8 * rng.uniform(-0.5, 0.5)) / n;
    std::vector<Point2> v;
    for (double a : ang) v.push_back({centre.x + rx * std::cos(a), centre.y + ry * std::sin(a)});

    const double al = rng.uniform(0.1, 2.0), de = rng.uniform(0.0, 1.0), ga = rng.uniform(0.1, 2.0);
    const double be = al * de + rng.uniform(0.1, 2.0);
    const bool down_up = rng.next() % 2 == 1;
    MapSpec m;
    m.name = "random rational";
    m.params = {al, be, de, ga};
    m.domain_box = {0.0, 1.0, 0.0, 1.0};
    // (al + be u)/(1 + de u + ga w) rises in u and falls in w
    if (down_up) {
        m.eval = [](double x, double y, std::span<const double> k) { return (k[0] + k[1] * y) / (1.0 + k[2] * y + k[3] * x); };
        m.signature = {Monotone::NonIncreasing, Monotone::NonDecreasing};
    } else {
        m.eval = [](double x, double y, std::span<const double> k) { return (k[0] + k[1] * x) / (1.0 + k[2] * x + k[3] * y); };
        m.signature = {Monotone::NonDecreasing, Monotone::NonIncreasing};
    }
    return {m, make_polygon_domain(v)};
}

Check criterion4() {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2024);
    int convex = 0;
    double worst_jump = 0.0, worst_inflation = 0.0;
    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        const Trial t = random_trial(rng);
        if (t.domain.shape_class == ShapeClass::Convex) ++convex;
        const ExtendedMap ext = extend(t.map, t.domain);
        const ExtensionAudit a = audit_extension(ext, 200);
        const std::string tag = "trial " + std::to_string(trial) + ": ";

        int agree = 0;
        for (int k = 0; agree < 1000; ++k) {
            const Point2 p{rng.uniform(t.domain.bbox.x0, t.domain.bbox.x1), rng.uniform(t.domain.bbox.y0, t.domain.bbox.y1)};
            if (contains(t.domain, p) != Containment::Inside) continue;
            if (eval_extended(ext, p) != t.map(p)) {
                c.require(false, tag + "C2 mismatch");
                break;
            }
            ++agree;
        }
        c.require(a.c2, tag + "C2 audit");
        c.require(a.c1 && a.c1_worst < a.tol_cont, tag + "C1 jump");
        c.require(a.c3 && a.monotonicity.first.worst_violation == 0.0 && a.monotonicity.second.worst_violation == 0.0,
                  tag + "C3 monotonicity");
        const double inflation = std::max({0.0, a.f_min - a.ext_min, a.ext_max - a.f_max});
        c.require(a.nice && inflation < a.tol_range, tag + "nice range");
        c.require(a.tiling, tag + "tiling");
        worst_jump = std::max(worst_jump, a.c1_worst / a.tol_cont);
        worst_inflation = std::max(worst_inflation, inflation);
    }
    const double t = seconds_since(t0);
    c.require(t < 300.0, "runtime");
    if (c.ok) {
        c.detail << "1000 trials (" << convex << " strictly convex), worst C1 jump " << worst_jump
                 << " tol_cont, worst range inflation " << worst_inflation << ", " << t << " s";
    }
    return c;
}

Check criterion5() {
    Check c;
    const FamilyInstance pqrh = make_eq8(1.0, 0.3);
    const FamilyInstance xfy = make_xfy([](double y) { return 2.0 / (1.0 + y); }, "2/(1+y)", 0.01, 3.0);
    int checked = 0;
    for (const FamilyInstance* fi : {&pqrh, &xfy}) {
        const ExtendedMap ext = extend(fi->map, fi->domain);
        for (Variant v : {Variant::Sym2, Variant::Sym4, Variant::Sym8}) {
            const EmbeddedSystem sys = build_embedding(ext, v);
            const std::string tag = fi->map.name + " " + to_string(v) + ": ";
            const OrderAudit o = check_order_preserving(sys, 10000, 11);
            c.require(o.pairs == 10000 && o.passed(), tag + "order preservation");
            ChainPair ch;
            try {
                ch = run_corner_chains(sys);
            } catch (const Error& e) {
                c.require(false, tag + e.what());
                continue;
            }
            c.require(ch.lower.monotone_verified && ch.upper.monotone_verified && ch.ordered, tag + "chain monotonicity");
            const BracketAudit b = check_bracketing(sys, 100, {1, 10, 100}, 13);
            c.require(b.passed(), tag + "bracketing");
            ++checked;
        }
    }
    if (c.ok) c.detail << checked << " embeddings: 0 order violations in 10^4 pairs, monotone chains, bracketing at n=1,10,100";
    return c;
}

Check criterion6() {
    Check c;
    bool degenerate = false;
    try {
        make_eq8(1.0, 0.5);
    } catch (const Error& e) {
        degenerate = e.code() == ErrorCode::DegenerateCase;
    }
    c.require(degenerate, "h = 0.5 must raise DegenerateCase");

    const fs::path dir = scratch_dir("degenerate");
    auto config = [&](const std::string& name, double h) {
        std::ofstream(dir / name) << "[map]\nfamily = rational_pqrh\np = 1\nh = " << h << "\n";
        return (dir / name).string();
    };
    const int bad = run({"certify", "--config", config("half.ini", 0.5), "--out", (dir / "half").string()});
    c.require(bad != 0, "certify at h = 0.5 must exit non-zero");
    const int good = run({"certify", "--config", config("near.ini", 0.499), "--out", (dir / "near").string()});
    c.require(good == 0, "certify at h = 0.499 must exit 0");
    const FamilyInstance fi = make_eq8(1.0, 0.499);
    const StabilityCertificate cert = certify(fi.map, fi.domain);
    c.require(cert.verdict == Verdict::GloballyStable && cert.x_star && std::abs(*cert.x_star - 0.501) <= 1e-8,
              "h = 0.499 certificate");
    if (c.ok) c.detail << "h = 0.5 DegenerateCase, exit " << bad << "; h = 0.499 GloballyStable at " << *cert.x_star;
    return c;
}

Check criterion7() {
    Check c;
    const fs::path dir = scratch_dir("determinism");
    std::ofstream(dir / "pqrh.ini") << "[map]\nfamily = rational_pqrh\np = 1\nh = 0.3\n\n[run]\nseed = 42\n";
    const std::string cfg = (dir / "pqrh.ini").string();
    const int r1 = run({"certify", "--config", cfg, "--out", (dir / "a").string()});
    const int r2 = run({"certify", "--config", cfg, "--out", (dir / "b").string()});
    c.require(r1 == 0 && r2 == 0, "both runs must certify");
    const std::string a = slurp(dir / "a" / "certificate.json"), b = slurp(dir / "b" / "certificate.json");
    c.require(!a.empty() && a == b, "certificate.json differs between runs");
    if (c.ok) c.detail << "two certify runs, certificate.json identical (" << a.size() << " bytes)";
    return c;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
        {"pqrh end-to-end", criterion1},         {"pqr regimes", criterion2},
        {"xf(y) obstruction", criterion3},      {"extension property suite", criterion4},
        {"order-theoretic suite", criterion5},  {"degenerate detection", criterion6},
        {"determinism", criterion7},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c = criteria[i].second();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail.str("");
            c.detail << "threw " << e.what();
        }
        if (!c.ok) ++failed;
        std::printf("criterion %zu (%s): %s  [%.1f s] %s\n", i + 1, criteria[i].first, c.ok ? "PASS" : "FAIL",
                    seconds_since(t0), c.detail.str().c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
