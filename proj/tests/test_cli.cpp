#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "monomap/cli.hpp"
#include "monomap/parallel.hpp"

using namespace monomap;
namespace fs = std::filesystem;

namespace {

const fs::path root = fs::temp_directory_path() / "monomap_cli_tests";

struct Run {
    int code = 0;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::vector<const char*> argv = {"monomap"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string config(const std::string& name, const std::string& body) {
    fs::create_directories(root);
    const fs::path p = root / (name + ".ini");
    std::ofstream(p) << body;
    return p.string();
}

std::string out_dir(const std::string& name) {
    const fs::path p = root / name;
    fs::remove_all(p);
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

const std::string kQuick = "[run]\nn_boundary = 100\naudit_grid = 60\nmono_grid = 60\nn_orbits = 10\norbit_steps = 2000\n";
const std::string kPqrh = "[map]\nfamily = rational_pqrh\np = 1\nh = 0.3\n" + kQuick;

}  // namespace

TEST_CASE("extend writes the extension, its audit and a plot") {
    const std::string out = out_dir("extend");
    const Run r = cli({"extend", "--config", config("pqrh", kPqrh), "--out", out});
    CHECK(r.code == 0);
    const auto ext = load(fs::path(out) / "extension.json");
    CHECK(ext["schema_version"] == 1);
    CHECK(ext["kind"] == "extension");
    CHECK(ext["pieces"].size() == 2);
    CHECK(ext["pieces"][0]["rule"] == "BaseMap");
    const auto audit = load(fs::path(out) / "extension_audit.json");
    CHECK(audit["passed"] == true);
    CHECK(audit["tiling"]["passed"] == true);
    CHECK(slurp(fs::path(out) / "pieces.svg").find("<svg") != std::string::npos);
}

TEST_CASE("extend on a rectangle has a single piece") {
    const std::string out = out_dir("extend_rect");
    const Run r = cli({"extend", "--config", config("pqr", "[map]\nfamily = rational_pqr\np = 1\nq = 1\nr = 1\n" + kQuick), "--out", out});
    CHECK(r.code == 0);
    CHECK(load(fs::path(out) / "extension.json")["pieces"].size() == 1);
}

TEST_CASE("unsupported domains exit 3") {
    const std::string body = "[map]\nfamily = rational_pqr\np = 1\nq = 1\nr = 1\n[domain]\ntype = polygon\n"
                             "vertices = (0,0) (1,0) (1,1) (0.66,1) (0.66,0.3) (0.33,0.3) (0.33,1) (0,1)\n";
    const Run r = cli({"extend", "--config", config("slot", body), "--out", out_dir("slot")});
    CHECK(r.code == 3);
    CHECK(r.err.find("UnsupportedDomain") != std::string::npos);
}

TEST_CASE("fixedpoints lists the pqr artificial pair") {
    const std::string out = out_dir("fp");
    const Run r = cli({"fixedpoints", "--config", config("pqr_bad", "[map]\nfamily = rational_pqr\np = 0.5\nq = 2\nr = 4\n"), "--out", out});
    CHECK(r.code == 0);
    const auto j = load(fs::path(out) / "fixed_points.json");
    REQUIRE(j["fixed_points"]["artificial"].size() == 1);
    CHECK(j["fixed_points"]["artificial"][0]["x"].get<double>() == doctest::Approx(0.2113248654));
    CHECK(j["fixed_points"]["oracle"]["consistent"] == true);
    CHECK(j["closed_form"]["factor_roots"].size() >= 1);

    const std::string out2 = out_dir("fp_none");
    CHECK(cli({"fixedpoints", "--config", config("pqr_good", "[map]\nfamily = rational_pqr\np = 1\nq = 1\nr = 1\n"), "--out", out2}).code == 0);
    CHECK(load(fs::path(out2) / "fixed_points.json")["fixed_points"]["artificial"].empty());
}

TEST_CASE("bad tolerances are config errors") {
    const Run flag = cli({"fixedpoints", "--config", config("pqrh", kPqrh), "--out", out_dir("neg"), "--tol-fp", "-1"});
    CHECK(flag.code == 4);
    const Run file = cli({"fixedpoints", "--config", config("negtol", kPqrh + "[tolerances]\ntol_fp = -1e-9\n"),
                          "--out", out_dir("neg2")});
    CHECK(file.code == 4);
    CHECK(file.err.find("tol_fp") != std::string::npos);
}

TEST_CASE("certify exit status follows the verdict") {
    const std::string out = out_dir("certify");
    const Run ok = cli({"certify", "--config", config("pqrh", kPqrh), "--out", out});
    CHECK(ok.code == 0);
    const auto cert = load(fs::path(out) / "certificate.json");
    CHECK(cert["verdict"]["kind"] == "GloballyStable");
    CHECK(cert["verdict"]["x_star"].get<double>() == doctest::Approx(0.7));
    for (const char* f : {"certificate.md", "chains.csv", "orbits.csv", "phase.svg"}) {
        CHECK_MESSAGE(fs::exists(fs::path(out) / f), f);
    }
    CHECK(slurp(fs::path(out) / "chains.csv").rfind("chain,iteration,s0,s1,s2,s3,step_norm\n", 0) == 0);
    CHECK(slurp(fs::path(out) / "orbits.csv").rfind("orbit,n,x_n,x_prev\n", 0) == 0);

    const std::string deg = out_dir("certify_deg");
    const Run bad = cli({"certify", "--config", config("half", "[map]\nfamily = rational_pqrh\np = 1\nh = 0.5\n"), "--out", deg});
    CHECK(bad.code == 1);
    const auto dc = load(fs::path(deg) / "certificate.json");
    CHECK(dc["verdict"]["kind"] == "Inconclusive");
    CHECK(dc["verdict"]["reason"].get<std::string>().find("DegenerateCase") != std::string::npos);

    const Run art = cli({"certify", "--config", config("pqr_bad", "[map]\nfamily = rational_pqr\np = 0.5\nq = 2\nr = 4\n" + kQuick),
                         "--out", out_dir("certify_art")});
    CHECK(art.code == 1);
}

TEST_CASE("identical config and seed give identical bytes; the seed flag overrides") {
    const std::string cfg = config("pqrh", kPqrh);
    const std::string a = out_dir("det_a"), b = out_dir("det_b"), c = out_dir("det_c");
    REQUIRE(cli({"certify", "--config", cfg, "--out", a}).code == 0);
    REQUIRE(cli({"certify", "--config", cfg, "--out", b}).code == 0);
    REQUIRE(cli({"certify", "--config", cfg, "--out", c, "--seed", "12345"}).code == 0);
    for (const char* f : {"certificate.json", "certificate.md", "chains.csv", "orbits.csv", "phase.svg"}) {
        CHECK_MESSAGE(slurp(fs::path(a) / f) == slurp(fs::path(b) / f), f);
    }
    CHECK(slurp(fs::path(a) / "orbits.csv") != slurp(fs::path(c) / "orbits.csv"));
    CHECK(load(fs::path(c) / "certificate.json")["seed"] == 12345);
}

TEST_CASE("simulate writes orbits and flags non-finite values") {
    const std::string out = out_dir("sim");
    const Run r = cli({"simulate", "--config",
                       config("sim", kPqrh + "[simulate]\nstarts = (6.3,6.3) (0,0)\nsteps = 300\n"), "--out", out});
    CHECK(r.code == 0);
    const std::string csv = slurp(fs::path(out) / "orbits.csv");
    const auto at = csv.find("\n0,300,");
    REQUIRE(at != std::string::npos);
    CHECK(std::stod(csv.substr(at + 7, 24)) == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(fs::exists(fs::path(out) / "orbits.svg"));

    const std::string pole = "[map]\nfamily = expr\nexpr = 1/(x - 0.5) + 0*y\nsignature = down,up\nbox = [0,1]x[0,1]\n"
                             "[simulate]\nstarts = (0.5,0.5)\nsteps = 3\n";
    const Run nf = cli({"simulate", "--config", config("pole", pole), "--out", out_dir("pole")});
    CHECK(nf.code == 2);
    CHECK(nf.err.find("NonFiniteValue") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(cli({}).code == 4);
    CHECK(cli({"certify"}).code == 4);
    CHECK(cli({"frobnicate", "--config", "x"}).code == 4);
    CHECK(cli({"certify", "--config", (root / "missing.ini").string()}).code == 4);
    CHECK(cli({"certify", "--config", config("pqrh", kPqrh), "--tol-nope", "1"}).code == 4);
    const Run help = cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("certify") != std::string::npos);
}

TEST_CASE("MONOMAP_THREADS caps the workers without changing the report") {
    const std::string cfg = config("pqrh", kPqrh);
    const std::string many = out_dir("threads_many"), one = out_dir("threads_one");
    REQUIRE(cli({"certify", "--config", cfg, "--out", many}).code == 0);
    ::setenv("MONOMAP_THREADS", "1", 1);
    CHECK(worker_count() == 1);
    REQUIRE(cli({"certify", "--config", cfg, "--out", one}).code == 0);
    ::unsetenv("MONOMAP_THREADS");
    CHECK(slurp(fs::path(many) / "certificate.json") == slurp(fs::path(one) / "certificate.json"));
}
