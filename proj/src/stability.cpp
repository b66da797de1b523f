#include "monomap/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "monomap/error.hpp"
#include "monomap/parallel.hpp"
#include "monomap/rng.hpp"

namespace monomap {

std::string to_string(LocalClass c) {
    switch (c) {
        case LocalClass::Sink: return "Sink";
        case LocalClass::Saddle: return "Saddle";
        case LocalClass::Source: return "Source";
        case LocalClass::NonHyperbolic: return "NonHyperbolic";
    }
    return "?";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::GloballyStable: return "GloballyStable";
        case Verdict::ConvergentToEquilibriumSet: return "ConvergentToEquilibriumSet";
        case Verdict::Refuted: return "Refuted";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

std::string to_string(Fault f) {
    switch (f) {
        case Fault::None: return "none";
        case Fault::Monotonicity: return "monotonicity";
        case Fault::Invariance: return "invariance";
        case Fault::Extension: return "extension";
        case Fault::Artificial: return "artificial";
        case Fault::Oracle: return "oracle";
        case Fault::Chains: return "chains";
    }
    return "?";
}

namespace {

double signed_margin(const DomainSpec& d, const Point2& q, double tol) {
    const double dist = distance_to_polygon(d.polygon, q);
    return locate_in_polygon(d.polygon, q, tol) == Containment::Outside ? -dist : dist;
}

struct SampleOutcome {
    int samples = 0;
    int violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::optional<Point2> witness;
    std::optional<Point2> image;
};

void probe(const MapSpec& map, const DomainSpec& d, const Point2& p, double tol, SampleOutcome& out) {
    const double fx = map(p);
    ++out.samples;
    const Point2 q{fx, p.x};
    const double m = std::isfinite(fx) ? signed_margin(d, q, tol) : -std::numeric_limits<double>::infinity();
    out.worst = std::min(out.worst, m);
    if (m < -tol) {
        ++out.violations;
        if (!out.witness) {
            out.witness = p;
            out.image = q;
        }
    }
}

}  // namespace

InvarianceResult verify_invariance(const MapSpec& map, const DomainSpec& domain, const InvarianceOptions& opts) {
    if (opts.n_boundary < 2) throw Error(ErrorCode::ConfigError, "n_boundary must be at least 2");
    const double tol = opts.tol > 0.0 ? opts.tol : domain.tol_geom;
    const int n = opts.n_boundary;
    const auto& segs = domain.boundary.segments;
    const int rows = opts.boundary_only ? 0 : n;

    // one slot per boundary segment, then one per interior row
    std::vector<SampleOutcome> parts(segs.size() + rows);
    parallel_for(static_cast<int>(parts.size()), [&](int k) {
        if (k < static_cast<int>(segs.size())) {
            const ParamSegment& s = segs[k];
            for (int i = 0; i < n; ++i) probe(map, domain, s.at(s.t0 + (s.t1 - s.t0) * i / n), tol, parts[k]);
            return;
        }
        const int row = k - static_cast<int>(segs.size());
        const Rectangle& bb = domain.bbox;
        const double y = bb.y0 + bb.height() * (row + 0.5) / n;
        for (int i = 0; i < n; ++i) {
            const Point2 p{bb.x0 + bb.width() * (i + 0.5) / n, y};
            if (contains(domain, p) == Containment::Outside) continue;
            probe(map, domain, p, tol, parts[k]);
        }
    });

    InvarianceResult r;
    r.boundary_only = opts.boundary_only;
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& p : parts) {
        r.samples += p.samples;
        r.violations += p.violations;
        r.worst_margin = std::min(r.worst_margin, p.worst);
        if (!r.witness && p.witness) {
            r.witness = p.witness;
            r.witness_image = p.image;
        }
    }
    if (opts.boundary_only) {
        // T is injective iff F(x, .) is; sample strict monotonicity along vertical lines
        bool injective = true;
        const Rectangle& bb = domain.bbox;
        for (int i = 0; i < 64 && injective; ++i) {
            const double x = bb.x0 + bb.width() * (i + 0.5) / 64;
            double prev = 0.0;
            int sign = 0;
            bool have = false;
            for (int j = 0; j <= 256; ++j) {
                const Point2 p{x, bb.y0 + bb.height() * j / 256};
                if (contains(domain, p) == Containment::Outside) continue;
                const double v = map(p);
                if (have) {
                    const int s = v > prev ? 1 : (v < prev ? -1 : 0);
                    if (s == 0 || (sign != 0 && s != sign)) {
                        injective = false;
                        break;
                    }
                    sign = s;
                }
                prev = v;
                have = true;
            }
        }
        r.injectivity_sampled = injective;
    }
    r.verified = r.violations == 0 && r.samples > 0;
    return r;
}

Orbit iterate_orbit(const MapSpec& map, double x0, double x_m1, int n, const DomainSpec* domain) {
    if (n < 0) throw Error(ErrorCode::ConfigError, "orbit length must be non-negative");
    const Rectangle box = domain ? domain->bbox : map.domain_box;
    const double tol = 1e-12 * std::max(1.0, box.diameter());
    if (!box.contains({x0, x_m1}, tol)) {
        std::ostringstream os;
        os << "start (" << x0 << ", " << x_m1 << ") is outside the domain box";
        throw Error(ErrorCode::OutsideRect, os.str());
    }
    Orbit o;
    o.values.reserve(static_cast<std::size_t>(n) + 2);
    o.values.push_back(x_m1);
    o.values.push_back(x0);
    auto check = [&](int k) {
        if (domain && !o.domain_exit) {
            const Point2 p{o.values[k + 1], o.values[k]};
            if (contains(*domain, p) == Containment::Outside) o.domain_exit = k;
        }
    };
    check(0);
    for (int k = 0; k < n; ++k) {
        const double v = map(o.values[k + 1], o.values[k]);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "x_" << k + 1 << " is not finite";
            throw Error(ErrorCode::NonFiniteValue, os.str());
        }
        o.values.push_back(v);
        check(k + 1);
    }
    return o;
}

LocalClass classify_eigenvalues(const Eigen2& e, double tol_eig) {
    const double lo = std::min(e.modulus1(), e.modulus2()), hi = std::max(e.modulus1(), e.modulus2());
    if (hi < 1.0 - tol_eig) return LocalClass::Sink;
    if (lo > 1.0 + tol_eig) return LocalClass::Source;
    if (lo < 1.0 - tol_eig && hi > 1.0 + tol_eig) return LocalClass::Saddle;
    return LocalClass::NonHyperbolic;
}

namespace {

LocalStability classify(const Mat2& J, double tol_eig) {
    LocalStability s;
    s.jacobian = J;
    s.eigen = eigenvalues(J);
    s.spectral_radius = s.eigen.spectral_radius();
    s.classification = classify_eigenvalues(s.eigen, tol_eig);
    return s;
}

void require_fixed(double fx, double x, double tol) {
    if (!(std::abs(fx - x) <= tol)) {
        std::ostringstream os;
        os << "F(" << x << ", " << x << ") = " << fx;
        throw Error(ErrorCode::NotAFixedPoint, os.str());
    }
}

}  // namespace

LocalStability local_stability(const MapSpec& map, double x_star, double tol_fp, double tol_eig) {
    const double w = std::max(map.domain_box.width(), map.domain_box.height());
    require_fixed(map(x_star, x_star), x_star, tol_fp > 0.0 ? tol_fp : 1e-9 * (w > 0.0 ? w : 1.0));
    return classify(jacobian_fd(map, {x_star, x_star}), tol_eig);
}

LocalStability local_stability(const EmbeddedSystem& sys, double x_star, double tol_fp, double tol_eig) {
    require_fixed(eval_extended(sys.source, {x_star, x_star}), x_star, tol_fp > 0.0 ? tol_fp : 1e-9 * (sys.b - sys.a));
    return classify(sym2_jacobian(sys, {x_star, x_star}), tol_eig);
}

StabilityCertificate inconclusive_certificate(const std::string& map_name, const std::string& stage,
                                              const std::string& message) {
    StabilityCertificate c;
    c.map_name = map_name;
    c.stages.push_back({stage, false, message});
    c.verdict = Verdict::Inconclusive;
    c.reason = stage + ": " + message;
    return c;
}

namespace {

OrbitEnsemble run_ensemble(const MapSpec& map, const DomainSpec& domain, const std::vector<double>& equilibria,
                           const CertifyConfig& cfg, double tol_orbit) {
    OrbitEnsemble e;
    Rng rng(cfg.seed);
    const Rectangle& bb = domain.bbox;
    for (int k = 0, guard = 0; k < cfg.n_orbits && guard < 1000 * std::max(1, cfg.n_orbits); ++guard) {
        const Point2 p{rng.uniform(bb.x0, bb.x1), rng.uniform(bb.y0, bb.y1)};
        if (contains(domain, p) == Containment::Outside) continue;
        e.starts.push_back(p);
        ++k;
    }
    e.orbits = static_cast<int>(e.starts.size());
    std::vector<double> finals(e.starts.size()), dists(e.starts.size());
    std::vector<char> exits(e.starts.size());
    e.traces.resize(e.starts.size());
    parallel_for(e.orbits, [&](int k) {
        const Orbit o = iterate_orbit(map, e.starts[k].x, e.starts[k].y, cfg.orbit_steps, &domain);
        finals[k] = o.values.back();
        double d = std::numeric_limits<double>::infinity();
        for (double x : equilibria) d = std::min(d, std::abs(finals[k] - x));
        dists[k] = d;
        exits[k] = o.domain_exit.has_value();
        const std::size_t keep = std::min(o.values.size(), static_cast<std::size_t>(cfg.trace_steps) + 2);
        e.traces[k].assign(o.values.begin(), o.values.begin() + static_cast<std::ptrdiff_t>(keep));
    });
    double sum = 0.0;
    for (int k = 0; k < e.orbits; ++k) {
        sum += finals[k];
        if (dists[k] <= tol_orbit) ++e.converged;
        if (exits[k]) ++e.domain_exits;
        if (!e.worst_orbit || dists[k] > e.worst_distance) {
            e.worst_distance = dists[k];
            e.worst_orbit = static_cast<std::size_t>(k);
        }
    }
    e.mean_limit = e.orbits > 0 ? sum / e.orbits : 0.0;
    return e;
}

}  // namespace

StabilityCertificate certify(const MapSpec& map, const DomainSpec& domain, const CertifyConfig& cfg) {
    StabilityCertificate c;
    c.map_name = map.name;
    c.param_names = map.param_names;
    c.params = map.params;
    c.signature = map.signature;
    c.shape_class = domain.shape_class;
    c.bbox = domain.bbox;
    c.domain_vertices = static_cast<int>(domain.polygon.size());
    c.domain_area = std::abs(signed_area(domain.polygon));
    c.seed = cfg.seed;

    const double w = std::max(domain.bbox.width(), domain.bbox.height());
    c.tol_fp = cfg.fixed_points.tol_fp > 0.0 ? cfg.fixed_points.tol_fp : 1e-9 * w;
    c.tol_chain = cfg.chains.tol_chain > 0.0 ? cfg.chains.tol_chain : 1e-10 * w;
    c.tol_orbit = cfg.tol_orbit > 0.0 ? cfg.tol_orbit : 1e-6 * w;

    std::optional<std::string> aborted;
    bool gates = true;
    auto record = [&](const std::string& name, bool ok, std::string msg, Fault f) {
        if (cfg.fault == f && f != Fault::None) {
            ok = false;
            msg += msg.empty() ? "fault injected" : " (fault injected)";
        }
        c.stages.push_back({name, ok, msg});
        if (!ok && gates) {
            gates = false;
            c.reason = name + ": " + (msg.empty() ? "failed" : msg);
        }
        return ok;
    };
    // runs a stage body; an exception ends the pipeline
    auto stage = [&](const std::string& name, auto&& body) {
        if (aborted) return;
        try {
            body();
        } catch (const Error& e) {
            c.stages.push_back({name, false, e.what()});
            aborted = name + ": " + e.what();
        }
    };

    stage("check_monotonicity", [&] {
        if (!map.signature.is_mixed()) throw Error(ErrorCode::NotMixedMonotone, "signature is not mixed");
        c.monotonicity = check_monotonicity(map, domain.bbox, cfg.mono_grid);
        record("check_monotonicity", c.monotonicity->consistent(),
               c.monotonicity->consistent() ? "" : "sampled behaviour contradicts the declared signature",
               Fault::Monotonicity);
    });
    stage("classify_domain", [&] {
        if (domain.shape_class == ShapeClass::Unsupported) {
            throw Error(ErrorCode::UnsupportedDomain, "domain is neither convex nor semi-convex");
        }
        record("classify_domain", true, to_string(domain.shape_class), Fault::None);
    });
    stage("verify_invariance", [&] {
        c.invariance = verify_invariance(map, domain, cfg.invariance);
        std::ostringstream os;
        os << c.invariance->violations << " of " << c.invariance->samples << " images outside";
        record("verify_invariance", c.invariance->verified, os.str(), Fault::Invariance);
    });

    std::optional<ExtendedMap> ext;
    stage("extend", [&] {
        ExtensionOptions eo = cfg.extension;
        if (!eo.rect && !(square_hull(domain.bbox) == domain.bbox)) eo.rect = square_hull(domain.bbox);
        ext = extend(map, domain, eo);
        c.extension_pieces = static_cast<int>(ext->pieces.size());
        c.extension_audit = audit_extension(*ext, cfg.audit_grid);
        const auto& a = *c.extension_audit;
        std::ostringstream os;
        os << "C1 " << a.c1 << " C2 " << a.c2 << " C3 " << a.c3 << " nice " << a.nice << " tiling " << a.tiling;
        record("extend", a.passed() && a.nice_mode, os.str(), Fault::Extension);
    });

    stage("find_artificial", [&] {
        FixedPointReport rep = find_artificial(*ext, cfg.fixed_points);
        std::ostringstream os;
        os << rep.artificial.size() << " artificial, " << rep.suspicious.size() << " suspicious";
        if (rep.continuum) os << ", continuum";
        const bool clean = rep.clean();
        check_against_oracle(*ext, rep, cfg.fixed_points);
        c.artificial_search = rep;
        record("find_artificial", clean, os.str(), Fault::Artificial);
        record("oracle_sweep", rep.oracle->consistent, rep.oracle->consistent ? "" : "oracle disagrees with the sweep",
               Fault::Oracle);
    });

    stage("corner_chains", [&] {
        const EmbeddedSystem sys = build_embedding(*ext, Variant::Sym4);
        ChainOptions co = cfg.chains;
        co.keep_states = true;
        c.chains = run_corner_chains(sys, co);
        const auto& ch = *c.chains;
        if (ch.lower.limit) c.lower_limit = reduce_state(sys, *ch.lower.limit);
        if (ch.upper.limit) c.upper_limit = reduce_state(sys, *ch.upper.limit);
        std::ostringstream os;
        os << "lower " << to_string(ch.lower.status) << ", upper " << to_string(ch.upper.status);
        const bool ok = ch.common_diagonal_limit.has_value() && ch.ordered;
        if (!ok && c.lower_limit && c.upper_limit) os << ", limits differ";
        record("corner_chains", ok, os.str(), Fault::Chains);
    });

    // equilibria for the evidence stages
    std::vector<double> eqs;
    if (c.artificial_search) {
        for (const auto& e : c.artificial_search->equilibria) eqs.push_back(e.x);
    } else {
        const double lo = std::max(domain.bbox.x0, domain.bbox.y0), hi = std::min(domain.bbox.x1, domain.bbox.y1);
        if (hi > lo) {
            try {
                for (const auto& e : find_equilibria(map, lo, hi, cfg.fixed_points).roots) eqs.push_back(e.x);
            } catch (const Error&) {
            }
        }
    }

    if (!aborted && gates) {
        const double limit = *c.chains->common_diagonal_limit;
        double best = limit;
        for (double x : eqs) {
            if (best == limit || std::abs(x - limit) < std::abs(best - limit)) best = x;
        }
        c.verdict = Verdict::GloballyStable;
        c.x_star = std::abs(best - limit) <= 10.0 * c.tol_fp ? best : limit;
        c.equilibrium_set = {*c.x_star};
    } else if (!aborted && c.lower_limit && c.upper_limit && c.chains->ordered) {
        // every gate but a common chain limit: the limits bracket the equilibria orbits can reach
        bool others = true;
        for (const auto& s : c.stages) others = others && (s.passed || s.name == "corner_chains");
        const bool diagonal = std::abs(c.lower_limit->x - c.lower_limit->y) <= c.tol_fp &&
                              std::abs(c.upper_limit->x - c.upper_limit->y) <= c.tol_fp;
        if (others && diagonal && cfg.fault != Fault::Chains) {
            c.verdict = Verdict::ConvergentToEquilibriumSet;
            const double lo = c.lower_limit->x, hi = c.upper_limit->x;
            for (double x : eqs) {
                if (x >= lo - c.tol_fp && x <= hi + c.tol_fp) c.equilibrium_set.push_back(x);
            }
            c.reason = "corner chains end at distinct equilibria";
        }
    }
    if (aborted) c.reason = *aborted;

    if (c.x_star) {
        try {
            c.local = local_stability(map, *c.x_star, 1e3 * c.tol_fp, cfg.tol_eig);
        } catch (const Error&) {
        }
    }

    if (!eqs.empty() && cfg.n_orbits > 0) {
        try {
            c.ensemble = run_ensemble(map, domain, eqs, cfg, c.tol_orbit);
            if (c.chains && c.chains->common_diagonal_limit) {
                c.limit_consistent =
                    std::abs(c.ensemble->mean_limit - *c.chains->common_diagonal_limit) <= 10.0 * c.tol_fp;
            }
            // an orbit that stays in an invariant Ω yet ends far from every equilibrium is a counterexample
            const auto& e = *c.ensemble;
            if (c.invariance && c.invariance->verified && e.worst_orbit && e.worst_distance > 1e-3 * w) {
                c.verdict = Verdict::Refuted;
                c.x_star.reset();
                c.equilibrium_set.clear();
                c.witness_orbit = e.traces[*e.worst_orbit];
                std::ostringstream os;
                os << "orbit from (" << e.starts[*e.worst_orbit].x << ", " << e.starts[*e.worst_orbit].y
                   << ") ends " << e.worst_distance << " away from every equilibrium";
                c.reason = os.str();
            }
        } catch (const Error& err) {
            c.stages.push_back({"orbit_ensemble", false, err.what()});
        }
    }
    return c;
}

}  // namespace monomap
