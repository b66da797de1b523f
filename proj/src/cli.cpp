#include "monomap/cli.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "monomap/error.hpp"
#include "monomap/extension.hpp"
#include "monomap/families.hpp"
#include "monomap/report.hpp"
#include "monomap/rng.hpp"

namespace monomap {

namespace fs = std::filesystem;

namespace {

int exit_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::ParseError:
        case ErrorCode::ParamConstraint: return kExitConfig;
        case ErrorCode::UnsupportedDomain:
        case ErrorCode::OpenCurve:
        case ErrorCode::SelfIntersection:
        case ErrorCode::TooManyOscillations: return kExitUnsupported;
        case ErrorCode::NonFiniteValue:
        case ErrorCode::OutsideRect: return kExitCheckFailed;
        default: return kExitNegative;
    }
}

void prepare(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorCode::ConfigError, "cannot create output directory " + out.string() + ": " + ec.message());
}

std::vector<double> diagonal_equilibria(const Problem& pb, const FixedPointOptions& fo) {
    const Rectangle& bb = pb.domain.bbox;
    const double lo = std::max(bb.x0, bb.y0), hi = std::min(bb.x1, bb.y1);
    std::vector<double> eqs;
    if (!(hi > lo)) return eqs;
    try {
        for (const auto& e : find_equilibria(pb.map, lo, hi, fo).roots) eqs.push_back(e.x);
    } catch (const Error&) {
        // equilibria only decorate the plots here
    }
    return eqs;
}

ExtensionOptions search_extension(const RunConfig& cfg, const DomainSpec& domain) {
    ExtensionOptions eo;
    eo.nice = cfg.nice;
    if (square_hull(domain.bbox) != domain.bbox) eo.rect = square_hull(domain.bbox);
    return eo;
}

}  // namespace

int cmd_extend(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const Problem pb = build_problem(cfg);
    ExtensionOptions eo;
    eo.nice = cfg.nice;
    const ExtendedMap ext = extend(pb.map, pb.domain, eo);
    const ExtensionAudit audit = audit_extension(ext, cfg.audit_grid);
    prepare(out);
    write_json(out / "extension.json", document("extension", to_json(ext)));
    write_json(out / "extension_audit.json", document("extension_audit", to_json(audit)));
    write_text(out / "pieces.svg", pieces_svg(ext));
    log << "extend: " << ext.pieces.size() + 1 << " pieces, domain " << to_string(pb.domain.shape_class) << ", audit "
        << (audit.passed() ? "passed" : "FAILED") << "\n";
    return audit.passed() ? kExitOk : kExitCheckFailed;
}

int cmd_fixedpoints(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const Problem pb = build_problem(cfg);
    const FixedPointOptions fo = fixed_point_options(cfg);
    const ExtendedMap ext = extend(pb.map, pb.domain, search_extension(cfg, pb.domain));
    FixedPointReport rep = find_artificial(ext, fo);
    const OracleReport oracle = check_against_oracle(ext, rep, fo);

    Json body{{"map", to_json(pb.map)}, {"domain", to_json(pb.domain)}, {"rect", to_json(ext)["rect"]},
              {"fixed_points", to_json(rep)}};
    const auto& k = cfg.map.params;
    if (pb.family == "rational_pqr") {
        body["closed_form"] = to_json(closed_form_eq7(k.at("p"), k.at("q"), k.at("r")));
    } else if (pb.family == "rational_pqrh") {
        const Eq8Facts f = eq8_facts(k.at("p"), k.at("h"));
        const double m0 = (f.c - f.x_star) / f.x_star;
        body["closed_form"] = to_json(closed_form_eq8_line_family(k.at("p"), k.at("h"), 2.0 * m0));
    } else {
        body["closed_form"] = nullptr;
    }
    prepare(out);
    write_json(out / "fixed_points.json", document("fixed_points", std::move(body)));

    log << "fixedpoints: " << rep.equilibria.size() << " equilibria, " << rep.artificial.size() << " artificial, "
        << rep.suspicious.size() << " suspicious";
    for (const auto& a : rep.artificial) log << "\n  artificial (" << a.x << ", " << a.y << ")";
    log << "\n  oracle " << (oracle.consistent ? "consistent" : "INCONSISTENT") << "\n";
    return oracle.consistent ? kExitOk : kExitCheckFailed;
}

int cmd_certify(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    std::optional<Problem> pb;
    try {
        pb = build_problem(cfg);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateCase) throw;
        StabilityCertificate cert = inconclusive_certificate(cfg.map.family, "instantiate", e.what());
        cert.seed = cfg.seed;
        prepare(out);
        write_json(out / "certificate.json", document("certificate", to_json(cert)));
        write_text(out / "certificate.md", certificate_markdown(cert));
        log << "certify: Inconclusive (" << e.what() << ")\n";
        return kExitNegative;
    }

    const StabilityCertificate cert = certify(pb->map, pb->domain, certify_config(cfg));
    prepare(out);
    write_json(out / "certificate.json", document("certificate", to_json(cert)));
    write_text(out / "certificate.md", certificate_markdown(cert));
    write_text(out / "chains.csv", cert.chains ? chains_csv(*cert.chains) : "chain,iteration,step_norm\n");
    const std::vector<std::vector<double>> none;
    const auto& traces = cert.ensemble ? cert.ensemble->traces : none;
    write_text(out / "orbits.csv", orbits_csv(traces));
    std::vector<Point2> marks;
    if (cert.lower_limit) marks.push_back(*cert.lower_limit);
    if (cert.upper_limit) marks.push_back(*cert.upper_limit);
    std::vector<double> eqs = cert.equilibrium_set;
    if (eqs.empty() && cert.artificial_search) {
        for (const auto& e : cert.artificial_search->equilibria) eqs.push_back(e.x);
    }
    write_text(out / "phase.svg", phase_svg(pb->domain, traces, eqs, marks));

    log << "certify: " << to_string(cert.verdict);
    if (cert.x_star) log << " x* = " << *cert.x_star;
    if (!cert.reason.empty()) log << " (" << cert.reason << ")";
    log << "\n";
    return cert.verdict == Verdict::GloballyStable ? kExitOk : kExitNegative;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& out, std::ostream& log) {
    const Problem pb = build_problem(cfg);
    std::vector<Point2> starts = cfg.starts;
    if (starts.empty()) {
        Rng rng(cfg.seed);
        const Rectangle& bb = pb.domain.bbox;
        for (int guard = 0; static_cast<int>(starts.size()) < cfg.n_orbits && guard < 1000 * cfg.n_orbits; ++guard) {
            const Point2 p{rng.uniform(bb.x0, bb.x1), rng.uniform(bb.y0, bb.y1)};
            if (contains(pb.domain, p) != Containment::Outside) starts.push_back(p);
        }
    }
    const int steps = cfg.steps.value_or(cfg.trace_steps);
    std::vector<std::vector<double>> traces;
    int exits = 0;
    for (const auto& s : starts) {
        Orbit o = iterate_orbit(pb.map, s.x, s.y, steps, &pb.domain);
        if (o.domain_exit) {
            ++exits;
            log << "simulate: orbit from (" << s.x << ", " << s.y << ") leaves the domain at n = " << *o.domain_exit
                << "\n";
        }
        traces.push_back(std::move(o.values));
    }
    prepare(out);
    write_text(out / "orbits.csv", orbits_csv(traces));
    write_text(out / "orbits.svg", phase_svg(pb.domain, traces, diagonal_equilibria(pb, fixed_point_options(cfg)), starts));
    log << "simulate: " << traces.size() << " orbits of " << steps << " steps, " << exits << " domain exits";
    if (!traces.empty()) log << ", first ends at " << traces.front().back();
    log << "\n";
    return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Global stability certificates for mixed-monotone second-order difference equations", "monomap"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::map<std::string, double> tols;

    struct Command {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&, const fs::path&, std::ostream&);
    };
    const Command commands[] = {
        {"extend", "build and audit the extension to the bounding rectangle", cmd_extend},
        {"fixedpoints", "search equilibria and artificial fixed points, cross-checked by a dense sweep", cmd_fixedpoints},
        {"certify", "run the full certification pipeline", cmd_certify},
        {"simulate", "iterate orbits and plot them over the domain", cmd_simulate},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { seed = s; }, "random seed");
        for (const auto& key : tolerance_keys()) {
            std::string flag = key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            if (flag.rfind("tol-", 0) != 0) flag = "tol-" + flag;
            sub->add_option_function<double>("--" + flag, [&tols, key](const double& v) { tols[key] = v; },
                                             "override " + key);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const Command* chosen = nullptr;
    for (const auto& c : commands) {
        if (app.got_subcommand(c.name)) chosen = &c;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;
        for (const auto& [k, v] : tols) set_tolerance(cfg, k, v);
        return chosen->run(cfg, out_dir, out);
    } catch (const Error& e) {
        err << "monomap " << chosen->name << ": " << e.what() << "\n";
        return exit_status(e.code());
    } catch (const std::exception& e) {
        err << "monomap " << chosen->name << ": " << e.what() << "\n";
        return kExitNegative;
    }
}

}  // namespace monomap
