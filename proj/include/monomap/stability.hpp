#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monomap/embedding.hpp"
#include "monomap/extension.hpp"
#include "monomap/fixed_points.hpp"
#include "monomap/geometry.hpp"
#include "monomap/map_model.hpp"

namespace monomap {

struct InvarianceOptions {
    int n_boundary = 500;  // samples per boundary segment; the interior grid is n_boundary^2
    bool boundary_only = false;
    double tol = 0.0;  // <= 0: the domain's tol_geom
};

struct InvarianceResult {
    bool verified = false;
    int samples = 0;
    int violations = 0;
    /// Smallest signed distance of an image to the boundary, positive inside.
    double worst_margin = 0.0;
    std::optional<Point2> witness;        // first sample whose image left Ω
    std::optional<Point2> witness_image;  // T(witness)
    bool boundary_only = false;
    /// Boundary-only mode leans on T being injective; this records whether the sampled check agreed.
    std::optional<bool> injectivity_sampled;
};

/// Checks T(x,y) = (F(x,y), x) maps sampled points of Ω back into Ω.
InvarianceResult verify_invariance(const MapSpec& map, const DomainSpec& domain, const InvarianceOptions& opts = {});

struct Orbit {
    std::vector<double> values;     // x_{-1}, x_0, ..., x_n
    std::optional<int> domain_exit;  // first n with (x_n, x_{n-1}) outside Ω
    double value(int n) const { return values.at(static_cast<std::size_t>(n + 1)); }
};

/// x_{n+1} = F(x_n, x_{n-1}). With a domain attached, DomainExit is flagged but iteration goes on
/// while the map stays finite.
Orbit iterate_orbit(const MapSpec& map, double x0, double x_m1, int n, const DomainSpec* domain = nullptr);

enum class LocalClass { Sink, Saddle, Source, NonHyperbolic };
std::string to_string(LocalClass c);

struct LocalStability {
    Mat2 jacobian;
    Eigen2 eigen;
    double spectral_radius = 0.0;
    LocalClass classification = LocalClass::NonHyperbolic;
};

LocalClass classify_eigenvalues(const Eigen2& e, double tol_eig = 1e-6);

/// Linearization of the companion map at (x*, x*); NotAFixedPoint when F(x*,x*) != x*.
LocalStability local_stability(const MapSpec& map, double x_star, double tol_fp = 0.0, double tol_eig = 1e-6);
/// The same for the Sym2 embedding at (x*, x*).
LocalStability local_stability(const EmbeddedSystem& sys, double x_star, double tol_fp = 0.0,
                               double tol_eig = 1e-6);

enum class Verdict { GloballyStable, ConvergentToEquilibriumSet, Refuted, Inconclusive };
std::string to_string(Verdict v);

/// Test hook: forces one stage to report failure so the verdict gate can be exercised.
enum class Fault { None, Monotonicity, Invariance, Extension, Artificial, Oracle, Chains };
std::string to_string(Fault f);

struct CertifyConfig {
    InvarianceOptions invariance;
    int audit_grid = 200;
    int mono_grid = 200;
    FixedPointOptions fixed_points;
    ChainOptions chains;
    int n_orbits = 100;
    int orbit_steps = 10000;
    int trace_steps = 200;      // orbit prefix kept for export
    double tol_orbit = 0.0;     // <= 0: 1e-6 (b-a)
    double tol_eig = 1e-6;
    std::uint64_t seed = 1;
    ExtensionOptions extension;
    Fault fault = Fault::None;
};

struct StageRecord {
    std::string name;
    bool passed = false;
    std::string message;
};

struct OrbitEnsemble {
    int orbits = 0;
    int converged = 0;
    int domain_exits = 0;
    double mean_limit = 0.0;
    double worst_distance = 0.0;  // max over orbits of the final distance to the nearest equilibrium
    std::vector<Point2> starts;             // (x_0, x_{-1})
    std::vector<std::vector<double>> traces;  // first trace_steps values of each orbit
    std::optional<std::size_t> worst_orbit;
};

struct StabilityCertificate {
    std::string map_name;
    std::vector<std::string> param_names;
    std::vector<double> params;
    MonotoneSignature signature;
    ShapeClass shape_class = ShapeClass::Unsupported;
    Rectangle bbox;
    int domain_vertices = 0;
    double domain_area = 0.0;

    std::vector<StageRecord> stages;
    std::optional<MonotonicityAudit> monotonicity;
    std::optional<InvarianceResult> invariance;
    std::optional<ExtensionAudit> extension_audit;
    int extension_pieces = 0;
    std::optional<FixedPointReport> artificial_search;
    std::optional<ChainPair> chains;
    std::optional<Point2> lower_limit;  // reduced corner-chain limits
    std::optional<Point2> upper_limit;
    std::optional<LocalStability> local;
    std::optional<OrbitEnsemble> ensemble;
    std::optional<bool> limit_consistent;  // ensemble limit vs chain limit within 10 tol_fp

    Verdict verdict = Verdict::Inconclusive;
    std::optional<double> x_star;
    std::vector<double> equilibrium_set;
    std::string reason;
    std::vector<double> witness_orbit;

    double tol_fp = 0.0;
    double tol_chain = 0.0;
    double tol_orbit = 0.0;
    std::uint64_t seed = 1;
};

/// monotonicity, domain class, invariance, extension and audit, artificial search with
/// oracle, Sym4 corner chains, then the verdict. Orbits are evidence only.
/// Stage errors end the run with Inconclusive naming the stage.
StabilityCertificate certify(const MapSpec& map, const DomainSpec& domain, const CertifyConfig& config = {});

/// Certificate for a run that failed before a map existed (e.g. a degenerate parameter choice).
StabilityCertificate inconclusive_certificate(const std::string& map_name, const std::string& stage,
                                              const std::string& message);

}  // namespace monomap
