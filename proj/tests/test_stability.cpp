#include <cmath>
#include <limits>

#include "doctest.h"
#include "monomap/error.hpp"
#include "monomap/families.hpp"
#include "monomap/stability.hpp"

using namespace monomap;

namespace {

CertifyConfig quick() {
    CertifyConfig c;
    c.invariance.n_boundary = 120;
    c.audit_grid = 80;
    c.mono_grid = 80;
    c.n_orbits = 20;
    c.orbit_steps = 3000;
    return c;
}

const StageRecord* stage(const StabilityCertificate& c, const std::string& name) {
    for (const auto& s : c.stages) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("invariance of the pqrh pentagon") {
    const FamilyInstance fi = make_eq8(1.0, 0.3);
    const InvarianceResult r = verify_invariance(fi.map, fi.domain);
    CHECK(r.verified);
    CHECK(r.violations == 0);
    CHECK(r.samples >= 10000);
    CHECK(r.worst_margin >= 0.0);
    InvarianceOptions bo;
    bo.boundary_only = true;
    const InvarianceResult b = verify_invariance(fi.map, fi.domain, bo);
    CHECK(b.verified);
    CHECK(b.boundary_only);
    REQUIRE(b.injectivity_sampled.has_value());
    CHECK(*b.injectivity_sampled);
}

TEST_CASE("a shrunken square is not invariant and the witness is reported") {
    const FamilyInstance fi = make_eq8(1.0, 0.3);
    const DomainSpec small = make_rectangle_domain({0.0, 0.35, 0.0, 0.35});
    const InvarianceResult r = verify_invariance(fi.map, small);
    CHECK_FALSE(r.verified);
    CHECK(r.violations > 0);
    CHECK(r.worst_margin < 0.0);
    REQUIRE(r.witness.has_value());
    REQUIRE(r.witness_image.has_value());
    CHECK(r.witness_image->x == doctest::Approx(fi.map(*r.witness)));
    CHECK(r.witness_image->y == r.witness->x);
}

TEST_CASE("orbits") {
    const FamilyInstance fi = make_eq8(1.0, 0.3);
    const Orbit o = iterate_orbit(fi.map, 6.3, 6.3, 500, &fi.domain);
    CHECK(o.values.size() == 502);
    CHECK(o.value(-1) == 6.3);
    CHECK(o.value(500) == doctest::Approx(0.7).epsilon(1e-9));
    CHECK_FALSE(o.domain_exit.has_value());
    // x_{n+1} = F(x_n, x_{n-1})
    CHECK(o.value(1) == fi.map(o.value(0), o.value(-1)));

    const DomainSpec small = make_rectangle_domain({0.0, 0.35, 0.0, 0.35});
    const Orbit e = iterate_orbit(fi.map, 0.0, 0.0, 5, &small);
    REQUIRE(e.domain_exit.has_value());
    CHECK(*e.domain_exit == 1);

    try {
        iterate_orbit(fi.map, 7.0, 0.0, 5, &fi.domain);
        FAIL("start outside accepted");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::OutsideRect);
    }
    MapSpec blow = fi.map;
    blow.eval = [](double x, double, std::span<const double>) { return x == 0.0 ? std::numeric_limits<double>::infinity() : 0.0; };
    try {
        iterate_orbit(blow, 1.0, 1.0, 5);
        FAIL("non-finite orbit accepted");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::NonFiniteValue);
    }
}

TEST_CASE("local stability of pqrh at x*") {
    const FamilyInstance fi = make_eq8(1.0, 0.3);
    const LocalStability ls = local_stability(fi.map, 0.7);
    const Eq8Facts f = eq8_facts(1.0, 0.3);
    CHECK(ls.classification == LocalClass::Sink);
    CHECK(ls.jacobian.trace() == doctest::Approx(f.trace).epsilon(1e-6));
    CHECK(ls.spectral_radius < 1.0);
    CHECK_THROWS_AS(local_stability(fi.map, 0.5), Error);
}

TEST_CASE("eigenvalue classes") {
    CHECK(classify_eigenvalues({0.5, 0.0, -0.2, 0.0}) == LocalClass::Sink);
    CHECK(classify_eigenvalues({1.5, 0.0, 0.2, 0.0}) == LocalClass::Saddle);
    CHECK(classify_eigenvalues({1.5, 0.0, -1.2, 0.0}) == LocalClass::Source);
    CHECK(classify_eigenvalues({0.0, 1.0, 0.0, -1.0}) == LocalClass::NonHyperbolic);
}

TEST_CASE("certify pqrh and pqr regimes") {
    const FamilyInstance pqrh = make_eq8(1.0, 0.3);
    const StabilityCertificate c = certify(pqrh.map, pqrh.domain, quick());
    CHECK(c.verdict == Verdict::GloballyStable);
    REQUIRE(c.x_star.has_value());
    CHECK(*c.x_star == doctest::Approx(0.7).epsilon(1e-9));
    for (const auto& s : c.stages) CHECK_MESSAGE(s.passed, s.name);
    REQUIRE(c.ensemble.has_value());
    CHECK(c.ensemble->converged == c.ensemble->orbits);
    CHECK(c.limit_consistent == true);
    REQUIRE(c.local.has_value());
    CHECK(c.local->classification == LocalClass::Sink);

    for (auto [p, q, r] : {std::tuple{1.0, 1.0, 1.0}, {1.0, 1.0, 5.0}, {2.0, 3.0, 0.5}, {1.1, 3.0, 2.0}}) {
        const FamilyInstance fi = make_eq7(p, q, r);
        const StabilityCertificate k = certify(fi.map, fi.domain, quick());
        CHECK(k.verdict == Verdict::GloballyStable);
        CHECK(k.x_star.value_or(-1.0) == doctest::Approx(eq7_equilibrium(p, q, r)).epsilon(1e-9));
    }
}

TEST_CASE("an artificial pair blocks the certificate") {
    const FamilyInstance fi = make_eq7(0.5, 2.0, 4.0);
    const StabilityCertificate c = certify(fi.map, fi.domain, quick());
    CHECK(c.verdict == Verdict::Inconclusive);
    const StageRecord* s = stage(c, "find_artificial");
    REQUIRE(s != nullptr);
    CHECK_FALSE(s->passed);
    CHECK(c.reason.find("find_artificial") == 0);
}

TEST_CASE("x f(y) stops at invariance") {
    const FamilyInstance fi = make_xfy([](double y) { return 2.0 / (1.0 + y); }, "2/(1+y)", 0.01, 3.0);
    const StabilityCertificate c = certify(fi.map, fi.domain, quick());
    CHECK(c.verdict == Verdict::Inconclusive);
    CHECK_FALSE(stage(c, "verify_invariance")->passed);
}

TEST_CASE("a y-only map with a continuum of 4-cycles is refuted by an orbit") {
    // x_{n+1} = 1 - x_{n-1}: every orbit cycles, only (1/2, 1/2) is fixed
    MapSpec m;
    m.name = "1-y";
    m.eval = [](double, double y, std::span<const double>) { return 1.0 - y; };
    m.signature = {Monotone::NonDecreasing, Monotone::NonIncreasing};
    m.domain_box = {0, 1, 0, 1};
    const StabilityCertificate c = certify(m, make_rectangle_domain(m.domain_box), quick());
    CHECK(c.verdict == Verdict::Refuted);
    CHECK_FALSE(c.witness_orbit.empty());
    CHECK_FALSE(c.x_star.has_value());
}

TEST_CASE("scalar maps reduce to the one-dimensional criterion") {
    MapSpec m;
    m.name = "x/2+1/4";
    m.eval = [](double x, double, std::span<const double>) { return 0.5 * x + 0.25; };
    m.signature = {Monotone::NonDecreasing, Monotone::NonIncreasing};
    m.domain_box = {0, 1, 0, 1};
    const StabilityCertificate c = certify(m, make_rectangle_domain(m.domain_box), quick());
    CHECK(c.verdict == Verdict::GloballyStable);
    CHECK(c.x_star.value_or(-1.0) == doctest::Approx(0.5));
}

TEST_CASE("every injected fault ends Inconclusive at its stage") {
    const FamilyInstance fi = make_eq8(1.0, 0.3);
    const std::pair<Fault, const char*> faults[] = {
        {Fault::Monotonicity, "check_monotonicity"}, {Fault::Invariance, "verify_invariance"},
        {Fault::Extension, "extend"},                {Fault::Artificial, "find_artificial"},
        {Fault::Oracle, "oracle_sweep"},             {Fault::Chains, "corner_chains"},
    };
    for (const auto& [fault, name] : faults) {
        CertifyConfig cfg = quick();
        cfg.fault = fault;
        const StabilityCertificate c = certify(fi.map, fi.domain, cfg);
        CHECK_MESSAGE(c.verdict == Verdict::Inconclusive, to_string(fault));
        const StageRecord* s = stage(c, name);
        REQUIRE(s != nullptr);
        CHECK_FALSE(s->passed);
    }
}

TEST_CASE("same seed, same certificate") {
    const FamilyInstance fi = make_eq8(0.6, 0.2);
    CertifyConfig cfg = quick();
    cfg.seed = 99;
    const StabilityCertificate a = certify(fi.map, fi.domain, cfg);
    const StabilityCertificate b = certify(fi.map, fi.domain, cfg);
    REQUIRE(a.ensemble.has_value());
    CHECK(a.ensemble->starts == b.ensemble->starts);
    CHECK(a.ensemble->traces == b.ensemble->traces);
    CHECK(a.x_star == b.x_star);
    cfg.seed = 100;
    const StabilityCertificate c = certify(fi.map, fi.domain, cfg);
    CHECK(a.ensemble->starts != c.ensemble->starts);
}

TEST_CASE("inconclusive certificate before a map exists") {
    const StabilityCertificate c = inconclusive_certificate("pqrh", "instantiate", "h = 1/2");
    CHECK(c.verdict == Verdict::Inconclusive);
    REQUIRE(c.stages.size() == 1);
    CHECK(c.stages[0].name == "instantiate");
    CHECK_FALSE(c.stages[0].passed);
}
