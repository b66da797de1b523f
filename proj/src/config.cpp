#include "monomap/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <regex>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "monomap/error.hpp"
#include "monomap/expr.hpp"
#include "monomap/families.hpp"

namespace monomap {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || end != t.data() + t.size() || !std::isfinite(v)) {
        bad(key + ": expected a finite number, got \"" + text + "\"");
    }
    return v;
}

int to_positive_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || end != t.data() + t.size() || v < 1 || v > 1'000'000'000) {
        bad(key + ": expected a positive integer, got \"" + text + "\"");
    }
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    bad(key + ": expected true or false, got \"" + text + "\"");
}

Monotone to_monotone(const std::string& s) {
    if (s == "up" || s == "increasing") return Monotone::NonDecreasing;
    if (s == "down" || s == "decreasing") return Monotone::NonIncreasing;
    bad("signature: expected up or down, got \"" + s + "\"");
}

MonotoneSignature to_signature(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) bad("signature: expected \"up,down\" or \"down,up\"");
    return {to_monotone(trim(text.substr(0, comma))), to_monotone(trim(text.substr(comma + 1)))};
}

Fault to_fault(const std::string& s) {
    for (Fault f : {Fault::None, Fault::Monotonicity, Fault::Invariance, Fault::Extension, Fault::Artificial,
                    Fault::Oracle, Fault::Chains}) {
        if (to_string(f) == s) return f;
    }
    bad("fault: unknown stage \"" + s + "\"");
}

bool is_identifier(const std::string& s) {
    static const std::regex re("[A-Za-z_][A-Za-z0-9_]*");
    return std::regex_match(s, re);
}

}  // namespace

Rectangle parse_box(const std::string& text) {
    static const std::regex re(R"(\s*\[([^,\]]+),([^\]]+)\]\s*x\s*\[([^,\]]+),([^\]]+)\]\s*)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) bad("expected a box like [a,b]x[c,d], got \"" + text + "\"");
    const Rectangle r{to_double("box", m[1]), to_double("box", m[2]), to_double("box", m[3]), to_double("box", m[4])};
    if (!(r.x0 < r.x1 && r.y0 < r.y1)) bad("box must have positive width and height");
    return r;
}

std::vector<Point2> parse_points(const std::string& text) {
    static const std::regex re(R"(\(\s*([^,()]+),([^,()]+)\))");
    std::vector<Point2> out;
    std::string rest = text;
    std::smatch m;
    while (std::regex_search(rest, m, re)) {
        if (!trim(m.prefix()).empty()) bad("unexpected \"" + trim(m.prefix()) + "\" in point list");
        out.push_back({to_double("point", m[1]), to_double("point", m[2])});
        rest = m.suffix();
    }
    if (!trim(rest).empty()) bad("unexpected \"" + trim(rest) + "\" in point list");
    if (out.empty()) bad("expected points like (x,y) (x,y)");
    return out;
}

const std::vector<std::string>& tolerance_keys() {
    static const std::vector<std::string> keys = {"tol_fp", "tol_chain", "sep_min", "tol_orbit", "tol_eig", "tol_geom"};
    return keys;
}

void set_tolerance(RunConfig& cfg, const std::string& key, double value) {
    if (!(std::isfinite(value) && value > 0.0)) bad(key + ": tolerances must be positive, got " + std::to_string(value));
    auto& t = cfg.tol;
    if (key == "tol_fp") t.tol_fp = value;
    else if (key == "tol_chain") t.tol_chain = value;
    else if (key == "sep_min") t.sep_min = value;
    else if (key == "tol_orbit") t.tol_orbit = value;
    else if (key == "tol_eig") t.tol_eig = value;
    else if (key == "tol_geom") t.tol_geom = value;
    else bad("unknown tolerance \"" + key + "\"");
}

RunConfig parse_config(std::istream& in) {
    CLI::ConfigINI ini;
    // values are kept whole; lists are parsed here
    ini.arrayDelimiter('\x1f');
    ini.arrayBounds('\x1e', '\x1d');
    std::vector<CLI::ConfigItem> items;
    try {
        items = ini.from_config(in);
    } catch (const CLI::Error& e) {
        bad(std::string("malformed config: ") + e.what());
    }

    RunConfig cfg;
    std::set<std::string> seen;
    std::map<std::string, std::string> map_keys;
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;
        if (item.parents.size() != 1) bad("key \"" + item.fullname() + "\" must sit inside a [section]");
        const std::string section = item.parents.front();
        const std::string key = item.name;
        const std::string full = section + "." + key;
        // the reader folds repeated keys into one item with several inputs
        if (!seen.insert(full).second || item.inputs.size() > 1) bad("duplicate key \"" + full + "\"");
        std::string value;
        for (const auto& s : item.inputs) value += s;
        value = trim(value);

        if (section == "map") {
            map_keys[key] = value;
        } else if (section == "params") {
            if (!is_identifier(key) || key == "x" || key == "y") bad("bad parameter name \"" + key + "\"");
            cfg.map.params[key] = to_double(full, value);
        } else if (section == "domain") {
            if (key == "type") cfg.domain.type = value;
            else if (key == "rect") cfg.domain.rect = parse_box(value);
            else if (key == "vertices") cfg.domain.vertices = parse_points(value);
            else if (key == "x") cfg.domain.x_t = value;
            else if (key == "y") cfg.domain.y_t = value;
            else if (key == "t0") cfg.domain.t0 = to_double(full, value);
            else if (key == "t1") cfg.domain.t1 = to_double(full, value);
            else bad("unknown key \"" + full + "\"");
        } else if (section == "tolerances") {
            set_tolerance(cfg, key, to_double(full, value));
        } else if (section == "run") {
            if (key == "seed") {
                const std::string t = trim(value);
                std::uint64_t s = 0;
                const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), s);
                if (ec != std::errc() || end != t.data() + t.size()) bad("run.seed: expected a non-negative integer");
                cfg.seed = s;
            } else if (key == "n_grid") cfg.n_grid = to_positive_int(full, value);
            else if (key == "n_dense") cfg.n_dense = to_positive_int(full, value);
            else if (key == "n_boundary") cfg.n_boundary = to_positive_int(full, value);
            else if (key == "audit_grid") cfg.audit_grid = to_positive_int(full, value);
            else if (key == "mono_grid") cfg.mono_grid = to_positive_int(full, value);
            else if (key == "n_orbits") cfg.n_orbits = to_positive_int(full, value);
            else if (key == "orbit_steps") cfg.orbit_steps = to_positive_int(full, value);
            else if (key == "trace_steps") cfg.trace_steps = to_positive_int(full, value);
            else if (key == "max_iter") cfg.max_iter = to_positive_int(full, value);
            else if (key == "nice") cfg.nice = to_bool(full, value);
            else if (key == "boundary_only") cfg.boundary_only = to_bool(full, value);
            else if (key == "fault") cfg.fault = to_fault(value);
            else bad("unknown key \"" + full + "\"");
        } else if (section == "simulate") {
            if (key == "starts") cfg.starts = parse_points(value);
            else if (key == "steps") cfg.steps = to_positive_int(full, value);
            else bad("unknown key \"" + full + "\"");
        } else {
            bad("unknown section [" + section + "]");
        }
    }

    // [map] depends on the family, so it is checked once everything is read
    auto& m = cfg.map;
    if (!map_keys.count("family")) bad("map.family is required");
    m.family = map_keys["family"];
    std::set<std::string> allowed = {"family"};
    if (m.family == "rational_pqr") allowed.insert({"p", "q", "r"});
    else if (m.family == "rational_pqrh") allowed.insert({"p", "h"});
    else if (m.family == "xfy") allowed.insert({"f", "lo", "hi"});
    else if (m.family == "expr") allowed.insert({"expr", "signature", "box"});
    else bad("map.family: unknown family \"" + m.family + "\" (rational_pqr, rational_pqrh, xfy, expr)");
    for (const auto& [k, v] : map_keys) {
        if (!allowed.count(k)) bad("unknown key \"map." + k + "\" for family " + m.family);
    }
    if (m.family != "expr" && !m.params.empty()) bad("[params] is only used with family = expr");
    for (const auto& k : allowed) {
        if (k == "family") continue;
        if (!map_keys.count(k)) bad("map." + k + " is required for family " + m.family);
    }
    if (m.family == "rational_pqr" || m.family == "rational_pqrh") {
        for (const auto& k : allowed) {
            if (k != "family") m.params[k] = to_double("map." + k, map_keys[k]);
        }
    } else if (m.family == "xfy") {
        m.f = map_keys["f"];
        m.lo = to_double("map.lo", map_keys["lo"]);
        m.hi = to_double("map.hi", map_keys["hi"]);
    } else {
        m.expr = map_keys["expr"];
        m.signature = to_signature(map_keys["signature"]);
        m.box = parse_box(map_keys["box"]);
    }

    const auto& d = cfg.domain;
    if (!d.type.empty() && d.type != "rectangle" && d.type != "polygon" && d.type != "curve") {
        bad("domain.type: expected rectangle, polygon or curve");
    }
    if (d.type.empty() && (d.rect || !d.vertices.empty() || !d.x_t.empty() || !d.y_t.empty())) {
        bad("domain.type is required when a domain is given");
    }
    if (d.type == "rectangle" && !d.rect) bad("domain.rect is required for a rectangle");
    if (d.type == "polygon" && d.vertices.size() < 3) bad("domain.vertices needs at least three points");
    if (d.type == "curve" && (d.x_t.empty() || d.y_t.empty() || !(d.t1 > d.t0))) {
        bad("a curve domain needs x, y and t0 < t1");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open config file " + path.string());
    return parse_config(in);
}

namespace {

MapSpec expression_map(const MapSource& src) {
    std::vector<std::string> vars = {"x", "y"};
    std::vector<double> values;
    for (const auto& [k, v] : src.params) {
        vars.push_back(k);
        values.push_back(v);
    }
    auto e = std::make_shared<const Expression>(Expression::parse(src.expr, vars));
    MapSpec m;
    m.name = "expr(" + src.expr + ")";
    m.eval = [e](double x, double y, std::span<const double> k) {
        double buf[16];
        std::vector<double> big;
        double* v = buf;
        if (k.size() + 2 > 16) {
            big.resize(k.size() + 2);
            v = big.data();
        }
        v[0] = x;
        v[1] = y;
        std::copy(k.begin(), k.end(), v + 2);
        return (*e)(std::span<const double>(v, k.size() + 2));
    };
    m.signature = *src.signature;
    m.params = values;
    for (std::size_t i = 2; i < vars.size(); ++i) m.param_names.push_back(vars[i]);
    m.domain_box = *src.box;
    return m;
}

}  // namespace

Problem build_problem(const RunConfig& cfg) {
    Problem pb;
    const auto& m = cfg.map;
    pb.family = m.family;
    const double tol_geom = cfg.tol.tol_geom.value_or(0.0);
    std::optional<DomainSpec> own;
    if (m.family == "rational_pqr") {
        auto fi = make_eq7(m.params.at("p"), m.params.at("q"), m.params.at("r"));
        pb.map = fi.map;
        own = fi.domain;
        pb.known_equilibrium = fi.equilibrium;
    } else if (m.family == "rational_pqrh") {
        auto fi = make_eq8(m.params.at("p"), m.params.at("h"));
        pb.map = fi.map;
        own = fi.domain;
        pb.known_equilibrium = fi.equilibrium;
    } else if (m.family == "xfy") {
        auto f = std::make_shared<const Expression>(Expression::parse(m.f, {"y"}));
        auto fi = make_xfy([f](double y) { return (*f)(std::span<const double>(&y, 1)); }, m.f, *m.lo, *m.hi);
        pb.map = fi.map;
        own = fi.domain;
        pb.known_equilibrium = fi.equilibrium;
    } else {
        pb.map = expression_map(m);
    }

    const auto& d = cfg.domain;
    if (d.type.empty()) {
        if (own) pb.domain = tol_geom > 0.0 ? make_polygon_domain(own->polygon, tol_geom) : *own;
        else pb.domain = make_rectangle_domain(pb.map.domain_box, tol_geom);
    } else if (d.type == "rectangle") {
        pb.domain = make_rectangle_domain(*d.rect, tol_geom);
    } else if (d.type == "polygon") {
        pb.domain = make_polygon_domain(d.vertices, tol_geom);
    } else {
        auto x = std::make_shared<const Expression>(Expression::parse(d.x_t, {"t"}));
        auto y = std::make_shared<const Expression>(Expression::parse(d.y_t, {"t"}));
        BoundaryCurve bc;
        bc.segments.push_back(ParamSegment::curve(
            [x, y](double t) {
                const std::span<const double> v(&t, 1);
                return Point2{(*x)(v), (*y)(v)};
            },
            d.t0, d.t1));
        pb.domain = make_domain(bc, tol_geom);
    }
    return pb;
}

FixedPointOptions fixed_point_options(const RunConfig& cfg) {
    FixedPointOptions o;
    o.n_grid = cfg.n_grid;
    o.n_dense = cfg.n_dense;
    o.tol_fp = cfg.tol.tol_fp.value_or(0.0);
    o.sep_min = cfg.tol.sep_min.value_or(0.0);
    return o;
}

CertifyConfig certify_config(const RunConfig& cfg) {
    CertifyConfig c;
    c.invariance.n_boundary = cfg.n_boundary;
    c.invariance.boundary_only = cfg.boundary_only;
    c.audit_grid = cfg.audit_grid;
    c.mono_grid = cfg.mono_grid;
    c.fixed_points = fixed_point_options(cfg);
    c.chains.max_iter = cfg.max_iter;
    c.chains.tol_chain = cfg.tol.tol_chain.value_or(0.0);
    c.chains.tol_fp = cfg.tol.tol_fp.value_or(0.0);
    c.n_orbits = cfg.n_orbits;
    c.orbit_steps = cfg.orbit_steps;
    c.trace_steps = cfg.trace_steps;
    c.tol_orbit = cfg.tol.tol_orbit.value_or(0.0);
    c.tol_eig = cfg.tol.tol_eig.value_or(1e-6);
    c.seed = cfg.seed;
    c.extension.nice = cfg.nice;
    c.fault = cfg.fault;
    return c;
}

}  // namespace monomap
