#include "monomap/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "monomap/error.hpp"

namespace monomap {

namespace {

Json point(const Point2& p) { return Json::array({p.x, p.y}); }

Json points(const std::vector<Point2>& v) {
    Json a = Json::array();
    for (const auto& p : v) a.push_back(point(p));
    return a;
}

Json box(const Rectangle& r) { return {{"x0", r.x0}, {"x1", r.x1}, {"y0", r.y0}, {"y1", r.y1}}; }

Json state(const State& s) {
    Json a = Json::array();
    for (double v : s) a.push_back(v);
    return a;
}

Json witness(const std::optional<Witness>& w) {
    if (!w) return nullptr;
    return {{"at", point(w->at)}, {"expected", w->expected}, {"got", w->got}, {"piece", w->piece}};
}

Json arg_audit(const ArgumentAudit& a) {
    Json j{{"observed", to_string(a.observed)}, {"consistent", a.consistent}, {"worst_violation", a.worst_violation}};
    if (a.first_violation) {
        const auto& v = *a.first_violation;
        j["first_violation"] = {{"from", point(v.from)}, {"to", point(v.to)}, {"value_from", v.value_from},
                                {"value_to", v.value_to}};
    }
    return j;
}

Json mono_audit(const MonotonicityAudit& m) {
    return {{"consistent", m.consistent()}, {"first", arg_audit(m.first)}, {"second", arg_audit(m.second)},
            {"tol_mono", m.tol_mono}, {"value_min", m.value_min}, {"value_max", m.value_max}};
}

Json chain(const CornerChain& c) {
    Json j{{"start", to_string(c.start)},      {"status", to_string(c.status)},
           {"iterations", c.iterations},       {"residual", c.residual},
           {"monotone_verified", c.monotone_verified}};
    j["limit"] = c.limit ? state(*c.limit) : Json(nullptr);
    j["final_step"] = c.step_norms.empty() ? 0.0 : c.step_norms.back();
    return j;
}

Json local(const LocalStability& s) {
    return {{"jacobian", {s.jacobian.a, s.jacobian.b, s.jacobian.c, s.jacobian.d}},
            {"eigenvalues", {{s.eigen.re1, s.eigen.im1}, {s.eigen.re2, s.eigen.im2}}},
            {"spectral_radius", s.spectral_radius},
            {"classification", to_string(s.classification)}};
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

Json document(const std::string& kind, Json body) {
    Json j = std::move(body);
    j["schema_version"] = kSchemaVersion;
    j["kind"] = kind;
    return j;
}

Json to_json(const MapSpec& map) {
    Json params = Json::object();
    for (std::size_t i = 0; i < map.params.size(); ++i) {
        params[i < map.param_names.size() ? map.param_names[i] : "k" + std::to_string(i)] = map.params[i];
    }
    return {{"name", map.name}, {"signature", to_string(map.signature)}, {"params", params},
            {"domain_box", box(map.domain_box)}};
}

Json to_json(const DomainSpec& d) {
    return {{"shape_class", to_string(d.shape_class)}, {"bbox", box(d.bbox)},
            {"vertices", d.polygon.size()},            {"area", std::abs(signed_area(d.polygon))},
            {"tol_geom", d.tol_geom},                  {"polygon", d.polygon.size() <= 64 ? points(d.polygon) : Json(nullptr)}};
}

Json to_json(const ExtendedMap& ext) {
    // Ω itself is the first tile so the list covers the whole rectangle
    Json pieces = Json::array({{{"rule", to_string(RuleKind::BaseMap)}, {"region", points(ext.domain.polygon)}}});
    for (const auto& p : ext.pieces) {
        Json j{{"rule", to_string(p.rule)},
               {"corner", to_string(p.corner)},
               {"is_box", p.is_box},
               {"f_direction", to_string(p.f_direction)},
               {"region", points(p.region)}};
        if (!p.arc.empty()) j["arc"] = {{"from", point(p.arc.front())}, {"to", point(p.arc.back())}, {"points", p.arc.size()}};
        if (p.anchor) {
            j["anchor"] = point(*p.anchor);
            j["anchor_value"] = p.anchor_value;
        }
        pieces.push_back(std::move(j));
    }
    return {{"map", to_json(ext.base)}, {"domain", to_json(ext.domain)}, {"rect", box(ext.rect)},
            {"nice", ext.nice},         {"swapped", ext.swapped},        {"pieces", pieces}};
}

Json to_json(const ExtensionAudit& a) {
    return {{"passed", a.passed()},
            {"c1", {{"passed", a.c1}, {"worst", a.c1_worst}, {"witness", witness(a.c1_witness)}, {"samples", a.samples_c1}}},
            {"c2", {{"passed", a.c2}, {"worst", a.c2_worst}, {"witness", witness(a.c2_witness)}, {"samples", a.samples_c2}}},
            {"c3", {{"passed", a.c3}, {"monotonicity", mono_audit(a.monotonicity)}}},
            {"nice",
             {{"passed", a.nice}, {"mode", a.nice_mode}, {"f_min", a.f_min}, {"f_max", a.f_max}, {"ext_min", a.ext_min},
              {"ext_max", a.ext_max}}},
            {"tiling", {{"passed", a.tiling}, {"error", a.tiling_error}}},
            {"tol_cont", a.tol_cont},
            {"tol_range", a.tol_range}};
}

Json to_json(const FixedPointReport& r) {
    Json eq = Json::array(), art = Json::array(), sus = Json::array();
    for (const auto& e : r.equilibria) eq.push_back({{"x", e.x}, {"residual", e.residual}});
    for (const auto& a : r.artificial) {
        art.push_back({{"x", a.x}, {"y", a.y}, {"residual", a.residual}, {"mirror_residual", a.mirror_residual}});
    }
    for (const auto& s : r.suspicious) {
        sus.push_back({{"cell", box(s.cell)}, {"best_residual", s.best_residual}, {"reason", s.reason}});
    }
    const auto& w = r.sweep;
    Json j{{"method", to_string(r.method)},
           {"equilibria", eq},
           {"artificial", art},
           {"suspicious", sus},
           {"continuum", r.continuum},
           {"sweep",
            {{"n_grid", w.n_grid},
             {"cells_swept", w.cells_swept},
             {"cells_flagged", w.cells_flagged},
             {"cells_cleared", w.cells_cleared},
             {"newton_runs", w.newton_runs},
             {"tol_fp", w.tol_fp},
             {"sep_min", w.sep_min},
             {"interval", {w.a, w.b}}}}};
    if (r.oracle) {
        const auto& o = *r.oracle;
        Json cl = Json::array();
        for (const auto& c : o.clusters) cl.push_back({{"cells", c.cells}, {"bbox", box(c.bbox)}, {"explained_by", c.explained_by}});
        j["oracle"] = {{"n_dense", o.n_dense},           {"flagged_cells", o.flagged_cells}, {"clusters", cl},
                       {"roots_checked", o.roots_checked}, {"roots_outside", o.roots_outside}, {"consistent", o.consistent}};
    } else {
        j["oracle"] = nullptr;
    }
    return j;
}

Json to_json(const InvarianceResult& v) {
    Json j{{"verified", v.verified},
           {"samples", v.samples},
           {"violations", v.violations},
           {"worst_margin", v.worst_margin},
           {"boundary_only", v.boundary_only}};
    j["witness"] = v.witness ? point(*v.witness) : Json(nullptr);
    j["witness_image"] = v.witness_image ? point(*v.witness_image) : Json(nullptr);
    j["injectivity_sampled"] = v.injectivity_sampled ? Json(*v.injectivity_sampled) : Json(nullptr);
    return j;
}

Json to_json(const ChainPair& c) {
    Json j{{"lower", chain(c.lower)}, {"upper", chain(c.upper)}, {"ordered", c.ordered}};
    j["common_diagonal_limit"] = c.common_diagonal_limit ? Json(*c.common_diagonal_limit) : Json(nullptr);
    return j;
}

Json to_json(const Eq7Report& r) {
    Json regimes = Json::array(), roots = Json::array();
    for (auto g : r.regimes) regimes.push_back(to_string(g));
    for (const auto& x : r.factor_roots) {
        roots.push_back({{"x", x.x}, {"y", x.y}, {"quadrant", x.quadrant}, {"in_box", x.in_box}});
    }
    return {{"regimes", regimes}, {"factor_roots", roots}, {"equilibrium", r.equilibrium},
            {"no_artificial", r.no_artificial()}};
}

Json to_json(const Eq8LineFamily& r) {
    return {{"x_star", r.x_star}, {"c", r.c},         {"b3", r.b3},
            {"m", r.m},           {"M", r.M},         {"x", r.x},
            {"y", r.y},           {"residual", r.residual}, {"samples", r.samples},
            {"residual_min", r.residual_min}, {"residual_max", r.residual_max}, {"sign_constant", r.sign_constant}};
}

Json to_json(const StabilityCertificate& c) {
    Json params = Json::object();
    for (std::size_t i = 0; i < c.params.size() && i < c.param_names.size(); ++i) params[c.param_names[i]] = c.params[i];
    Json stages = Json::array();
    for (const auto& s : c.stages) stages.push_back({{"name", s.name}, {"passed", s.passed}, {"message", s.message}});

    Json j;
    j["map"] = {{"name", c.map_name}, {"params", params}, {"signature", to_string(c.signature)}};
    j["domain"] = {{"shape_class", to_string(c.shape_class)},
                   {"bbox", box(c.bbox)},
                   {"vertices", c.domain_vertices},
                   {"area", c.domain_area}};
    j["stages"] = stages;
    j["monotonicity"] = c.monotonicity ? mono_audit(*c.monotonicity) : Json(nullptr);
    j["invariance"] = c.invariance ? to_json(*c.invariance) : Json(nullptr);
    j["extension_audit"] = c.extension_audit ? to_json(*c.extension_audit) : Json(nullptr);
    j["extension_pieces"] = c.extension_pieces;
    j["artificial_search"] = c.artificial_search ? to_json(*c.artificial_search) : Json(nullptr);
    j["corner_chains"] = c.chains ? to_json(*c.chains) : Json(nullptr);
    j["corner_chain_limits"] = {{"lower", c.lower_limit ? point(*c.lower_limit) : Json(nullptr)},
                                {"upper", c.upper_limit ? point(*c.upper_limit) : Json(nullptr)}};
    j["local_stability"] = c.local ? local(*c.local) : Json(nullptr);
    if (c.ensemble) {
        const auto& e = *c.ensemble;
        j["orbit_ensemble"] = {{"orbits", e.orbits},
                               {"converged", e.converged},
                               {"domain_exits", e.domain_exits},
                               {"mean_limit", e.mean_limit},
                               {"worst_distance", e.worst_distance}};
    } else {
        j["orbit_ensemble"] = nullptr;
    }
    j["limit_consistent"] = c.limit_consistent ? Json(*c.limit_consistent) : Json(nullptr);
    Json verdict{{"kind", to_string(c.verdict)}, {"reason", c.reason}};
    verdict["x_star"] = c.x_star ? Json(*c.x_star) : Json(nullptr);
    verdict["equilibrium_set"] = c.equilibrium_set;
    verdict["witness_orbit"] = c.witness_orbit;
    j["verdict"] = verdict;
    j["tolerances"] = {{"tol_fp", c.tol_fp}, {"tol_chain", c.tol_chain}, {"tol_orbit", c.tol_orbit}};
    j["seed"] = c.seed;
    return j;
}

std::string certificate_markdown(const StabilityCertificate& c) {
    std::ostringstream os;
    os << "# Stability certificate: " << c.map_name << "\n\n";
    os << "**Verdict:** " << to_string(c.verdict);
    if (c.x_star) os << " at x* = " << short_num(*c.x_star);
    os << "\n\n";
    if (!c.reason.empty()) os << "Reason: " << c.reason << "\n\n";
    if (!c.equilibrium_set.empty() && c.verdict == Verdict::ConvergentToEquilibriumSet) {
        os << "Equilibria between the corner-chain limits:";
        for (double x : c.equilibrium_set) os << " " << short_num(x);
        os << "\n\n";
    }
    os << "Signature " << to_string(c.signature) << ", domain " << to_string(c.shape_class) << " with "
       << c.domain_vertices << " vertices, bbox [" << short_num(c.bbox.x0) << ", " << short_num(c.bbox.x1) << "] x ["
       << short_num(c.bbox.y0) << ", " << short_num(c.bbox.y1) << "].\n\n";
    os << "| stage | result | detail |\n|---|---|---|\n";
    for (const auto& s : c.stages) os << "| " << s.name << " | " << (s.passed ? "pass" : "FAIL") << " | " << s.message << " |\n";
    os << "\n";
    if (c.lower_limit && c.upper_limit) {
        os << "Corner-chain limits: lower (" << short_num(c.lower_limit->x) << ", " << short_num(c.lower_limit->y)
           << "), upper (" << short_num(c.upper_limit->x) << ", " << short_num(c.upper_limit->y) << ").\n\n";
    }
    if (c.artificial_search) {
        const auto& r = *c.artificial_search;
        os << "Artificial fixed points: " << r.artificial.size();
        for (const auto& a : r.artificial) os << " (" << short_num(a.x) << ", " << short_num(a.y) << ")";
        os << "; suspicious cells: " << r.suspicious.size();
        if (r.oracle) os << "; oracle " << (r.oracle->consistent ? "consistent" : "INCONSISTENT");
        os << ".\n\n";
    }
    if (c.local) {
        os << "Linearization at x*: " << to_string(c.local->classification) << ", spectral radius "
           << short_num(c.local->spectral_radius) << ".\n\n";
    }
    if (c.ensemble) {
        const auto& e = *c.ensemble;
        os << "Orbit evidence: " << e.converged << " of " << e.orbits << " orbits within tol_orbit of an equilibrium, "
           << e.domain_exits << " left the domain, mean final value " << short_num(e.mean_limit) << ".\n\n";
    }
    os << "Tolerances: tol_fp " << short_num(c.tol_fp) << ", tol_chain " << short_num(c.tol_chain) << ", tol_orbit "
       << short_num(c.tol_orbit) << "; seed " << c.seed << ".\n";
    return os.str();
}

std::string chains_csv(const ChainPair& chains) {
    std::ostringstream os;
    const std::size_t dim =
        !chains.lower.states.empty() ? chains.lower.states.front().size() : (chains.upper.states.empty() ? 0 : chains.upper.states.front().size());
    os << "chain,iteration";
    for (std::size_t i = 0; i < dim; ++i) os << ",s" << i;
    os << ",step_norm\n";
    for (const CornerChain* c : {&chains.lower, &chains.upper}) {
        const char* name = c == &chains.lower ? "lower" : "upper";
        // states may hold only the final state when the chain ran without keep_states
        const std::size_t offset = c->states.size() == c->step_norms.size() + 1 ? 0 : c->step_norms.size() + 1 - c->states.size();
        for (std::size_t k = 0; k < c->states.size(); ++k) {
            const std::size_t it = k + offset;
            os << name << "," << it;
            for (double v : c->states[k]) os << "," << num(v);
            os << "," << (it == 0 ? "0" : num(c->step_norms[it - 1])) << "\n";
        }
    }
    return os.str();
}

std::string orbits_csv(const std::vector<std::vector<double>>& traces) {
    std::ostringstream os;
    os << "orbit,n,x_n,x_prev\n";
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const auto& t = traces[k];
        for (std::size_t i = 1; i < t.size(); ++i) {
            os << k << "," << static_cast<long long>(i) - 1 << "," << num(t[i]) << "," << num(t[i - 1]) << "\n";
        }
    }
    return os.str();
}

namespace {

// Canvas of 600x600 px with a 40 px margin, y pointing up.
struct Canvas {
    Rectangle r;
    double sx, sy;
    explicit Canvas(const Rectangle& rect) : r(rect) {
        sx = 520.0 / std::max(r.width(), 1e-300);
        sy = 520.0 / std::max(r.height(), 1e-300);
    }
    Point2 px(const Point2& p) const { return {40.0 + (p.x - r.x0) * sx, 560.0 - (p.y - r.y0) * sy}; }
    std::string xy(const Point2& p) const {
        const Point2 q = px(p);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f,%.2f", q.x, q.y);
        return buf;
    }
    std::string poly(const std::vector<Point2>& pts) const {
        std::string s;
        for (const auto& p : pts) s += (s.empty() ? "" : " ") + xy(p);
        return s;
    }
};

std::string svg_open(const std::string& title) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"620\" viewBox=\"0 0 600 620\">\n"
           "<title>" + title + "</title>\n<rect x=\"0\" y=\"0\" width=\"600\" height=\"620\" fill=\"white\"/>\n";
}

std::string escape(const std::string& s) {
    std::string o;
    for (char ch : s) {
        if (ch == '<') o += "&lt;";
        else if (ch == '>') o += "&gt;";
        else if (ch == '&') o += "&amp;";
        else o += ch;
    }
    return o;
}

const char* rule_colour(RuleKind r) {
    switch (r) {
        case RuleKind::BaseMap: return "#dddddd";
        case RuleKind::RayConstXMinus:
        case RuleKind::RayConstXPlus: return "#8ecae6";
        case RuleKind::RayConstYMinus:
        case RuleKind::RayConstYPlus: return "#a7c957";
        case RuleKind::MinOfTwo: return "#f4a261";
        case RuleKind::MaxOfTwo: return "#e76f51";
        case RuleKind::Graft: return "#cdb4db";
        case RuleKind::ReverseGraft: return "#ffafcc";
        case RuleKind::LinearSector: return "#ffd166";
    }
    return "#999999";
}

}  // namespace

std::string pieces_svg(const ExtendedMap& ext) {
    const Canvas cv(ext.rect);
    std::ostringstream os;
    os << svg_open("extension pieces: " + escape(ext.base.name));
    os << "<polygon points=\"" << cv.poly({{ext.rect.x0, ext.rect.y0}, {ext.rect.x1, ext.rect.y0}, {ext.rect.x1, ext.rect.y1}, {ext.rect.x0, ext.rect.y1}})
       << "\" fill=\"" << rule_colour(RuleKind::BaseMap) << "\" stroke=\"black\"/>\n";
    for (const auto& p : ext.pieces) {
        os << "<polygon points=\"" << cv.poly(p.region) << "\" fill=\"" << rule_colour(p.rule)
           << "\" stroke=\"#555555\" stroke-width=\"0.5\"><title>" << to_string(p.rule) << " " << to_string(p.corner)
           << "</title></polygon>\n";
    }
    os << "<polygon points=\"" << cv.poly(ext.domain.polygon) << "\" fill=\"white\" fill-opacity=\"0.6\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"40\" y=\"600\" font-family=\"monospace\" font-size=\"12\">" << escape(ext.base.name) << ", "
       << ext.pieces.size() << " pieces outside the domain</text>\n</svg>\n";
    return os.str();
}

std::string phase_svg(const DomainSpec& domain, const std::vector<std::vector<double>>& traces,
                      const std::vector<double>& equilibria, const std::vector<Point2>& marks) {
    Rectangle r = domain.bbox;
    for (const auto& t : traces) {
        for (std::size_t i = 1; i < t.size(); ++i) {
            r.x0 = std::min(r.x0, t[i]);
            r.x1 = std::max(r.x1, t[i]);
            r.y0 = std::min(r.y0, t[i - 1]);
            r.y1 = std::max(r.y1, t[i - 1]);
        }
    }
    const Canvas cv(r);
    std::ostringstream os;
    os << svg_open("phase portrait");
    os << "<polygon points=\"" << cv.poly(domain.polygon) << "\" fill=\"#eef4fb\" stroke=\"black\"/>\n";
    for (const auto& t : traces) {
        std::vector<Point2> pts;
        for (std::size_t i = 1; i < t.size(); ++i) pts.push_back({t[i], t[i - 1]});
        if (pts.size() < 2) continue;
        os << "<polyline points=\"" << cv.poly(pts) << "\" fill=\"none\" stroke=\"#3a86ff\" stroke-opacity=\"0.35\" stroke-width=\"0.6\"/>\n";
    }
    char buf[160];
    for (double x : equilibria) {
        const Point2 q = cv.px({x, x});
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"#d62828\"/>\n", q.x, q.y);
        os << buf;
    }
    for (const auto& m : marks) {
        const Point2 q = cv.px(m);
        std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"6\" height=\"6\" fill=\"#2a9d8f\"/>\n",
                      q.x - 3.0, q.y - 3.0);
        os << buf;
    }
    os << "<text x=\"40\" y=\"600\" font-family=\"monospace\" font-size=\"12\">(x_n, x_{n-1}); " << traces.size()
       << " orbits, red: equilibria, green: chain limits</text>\n</svg>\n";
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::ConfigError, "failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace monomap
