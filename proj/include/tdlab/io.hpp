#pragma once

// JSON encodings: td-cert/1 certificates, classify records, domain specs and
// approximation reports. Key order is fixed so that output is reproducible.

#include "tdlab/combinatorics.hpp"
#include "tdlab/euclid.hpp"
#include "tdlab/extremal.hpp"
#include "tdlab/group.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdlab {

using Json = nlohmann::ordered_json;

inline Json to_json_array(const std::vector<std::size_t>& v)
{
    Json a = Json::array();
    for (auto x : v) {
        a.push_back(x);
    }
    return a;
}

inline Json to_json_array(const std::vector<double>& v)
{
    Json a = Json::array();
    for (double x : v) {
        a.push_back(x);
    }
    return a;
}

template <class T>
Json optional_json(const std::optional<T>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

/// td-cert/1 certificate. Element order inside every array is the mixed-radix
/// index order of the group, first factor most significant.
inline Json certificate_to_json(const Certificate& c)
{
    Json j;
    j["schema"] = kCertificateSchema;
    j["group"] = c.U.group().literal();
    j["U"] = to_json_array(c.U.elements());
    j["kind"] = to_string(c.kind);
    j["value_primal"] = c.primal.value;
    j["value_dual"] = c.dual.value;
    j["product"] = c.product;
    j["extremizer_primal"] = to_json_array(c.primal.extremizer.values());
    j["extremizer_dual"] = to_json_array(c.dual.extremizer.values());
    j["residuals"] = {{"r1", c.residuals.r1}, {"r2", c.residuals.r2}, {"r3", c.residuals.r3}};
    j["solver"] = {{"iterations", c.primal.lp.iterations + c.dual.lp.iterations},
                   {"max_residual", std::max(c.primal.lp.max_residual, c.dual.lp.max_residual)}};
    j["pass"] = c.passes();
    return j;
}

struct VerifyResult {
    bool pass = false;
    bool matches_claim = false;
    double product = 0.0;
    ComplementarityResiduals residuals;
    double primal_violation = 0.0;
    double dual_violation = 0.0;
    std::vector<std::string> failures;
};

/// Re-checks a td-cert/1 document from its contents alone.
inline VerifyResult verify_certificate(const Json& j, double tol = kCertificateTolerance)
{
    if (!j.is_object() || j.value("schema", "") != std::string(kCertificateSchema)) {
        throw std::invalid_argument("not a td-cert/1 document");
    }
    const auto g = FiniteAbelianGroup::parse(j.at("group").get<std::string>());
    const auto u_elems = j.at("U").get<std::vector<std::size_t>>();
    const SymmetricSet u(g, u_elems);
    const auto kind = parse_problem_kind(j.at("kind").get<std::string>());
    if (!is_primal(kind)) {
        throw std::invalid_argument("certificate kind must be turan or delsarte");
    }
    const GroupFunction f(g, j.at("extremizer_primal").get<std::vector<double>>());
    const GroupFunction h(g, j.at("extremizer_dual").get<std::vector<double>>());

    VerifyResult r;
    auto fail = [&r](std::string why) { r.failures.push_back(std::move(why)); };
    if (!f.is_even(tol) || !h.is_even(tol)) {
        fail("extremizer is not even");
        r.matches_claim = j.value("pass", false) == false;
        return r;
    }
    const auto fh = fourier(f);
    const auto hh = fourier(h);
    r.primal_violation = check_admissible(kind, u, f, fh).violation;
    r.dual_violation = check_admissible(dual_of(kind), u, h, hh).violation;
    if (r.primal_violation > tol) {
        fail("primal extremizer is not admissible");
    }
    if (r.dual_violation > tol) {
        fail("dual extremizer is not admissible");
    }
    if (std::abs(fh[0] - j.at("value_primal").get<double>()) > tol) {
        fail("value_primal does not match the transform at 0");
    }
    if (std::abs(hh[0] - j.at("value_dual").get<double>()) > tol) {
        fail("value_dual does not match the transform at 0");
    }
    r.product = fh[0] * hh[0];
    if (std::abs(r.product - 1.0) > tol) {
        fail("duality product differs from 1");
    }
    r.residuals = complementarity(f, h);
    if (r.residuals.r1 > tol) {
        fail("r1 above tolerance");
    }
    if (r.residuals.r2 > tol) {
        fail("r2 above tolerance");
    }
    if (kind == ProblemKind::Delsarte && r.residuals.r3 > tol) {
        fail("r3 above tolerance");
    }
    r.pass = r.failures.empty();
    r.matches_claim = j.contains("pass") && j.at("pass").get<bool>() == r.pass;
    return r;
}

inline Json verify_result_to_json(const VerifyResult& r)
{
    Json j;
    j["pass"] = r.pass;
    j["matches_claim"] = r.matches_claim;
    j["product"] = r.product;
    j["residuals"] = {{"r1", r.residuals.r1}, {"r2", r.residuals.r2}, {"r3", r.residuals.r3}};
    j["primal_violation"] = r.primal_violation;
    j["dual_violation"] = r.dual_violation;
    j["failures"] = r.failures;
    return j;
}

inline Json classify_to_json(const ClassifyReport& r)
{
    Json j;
    j["group"] = r.A.group().literal();
    j["A"] = to_json_array(r.A.elements());
    j["difference_set"] = to_json_array(r.difference_set.elements());
    j["tiles"] = r.tiles;
    j["spectral"] = r.spectral;
    j["T"] = r.turan;
    j["D"] = r.delsarte;
    j["m"] = r.m;
    j["T_equals_m"] = r.turan_equals_m;
    j["D_equals_m"] = r.delsarte_equals_m;
    j["tiling_lambda"] = r.tiling ? to_json_array(r.tiling->lambda.elements()) : Json(nullptr);
    j["spectrum_lambda"] = r.spectrum ? to_json_array(r.spectrum->lambda.elements()) : Json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// Domains

inline Json domain_shape_to_json(const EuclideanDomain& d)
{
    Json j;
    j["kind"] = d.kind();
    Json params = Json::object();
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, EuclideanDomain::Ball>) {
                params["radius"] = s.radius;
            } else if constexpr (std::is_same_v<T, EuclideanDomain::Box>) {
                params["half_widths"] = s.half_widths;
            } else if constexpr (std::is_same_v<T, EuclideanDomain::Polytope>) {
                params["normals"] = s.normals;
                params["offsets"] = s.offsets;
            } else {
                Json parts = Json::array();
                for (const auto& p : s.parts) {
                    parts.push_back(domain_shape_to_json(p));
                }
                params["parts"] = parts;
            }
        },
        d.shape());
    j["params"] = params;
    return j;
}

inline EuclideanDomain domain_shape_from_json(std::size_t dim, const Json& shape)
{
    const auto kind = shape.at("kind").get<std::string>();
    const Json params = shape.value("params", Json::object());
    if (kind == "ball") {
        return {dim, EuclideanDomain::Ball{params.at("radius").get<double>()}};
    }
    if (kind == "box") {
        if (params.contains("half_width")) {
            return EuclideanDomain::cube(dim, params.at("half_width").get<double>());
        }
        return {dim, EuclideanDomain::Box{params.at("half_widths").get<std::vector<double>>()}};
    }
    if (kind == "polytope") {
        return {dim, EuclideanDomain::Polytope{params.at("normals").get<std::vector<std::vector<double>>>(),
                                               params.at("offsets").get<std::vector<double>>()}};
    }
    if (kind == "union") {
        EuclideanDomain::Union un;
        for (const auto& p : params.at("parts")) {
            un.parts.push_back(domain_shape_from_json(dim, p));
        }
        return {dim, std::move(un)};
    }
    throw std::invalid_argument("unknown domain kind '" + kind + "'");
}

struct DomainSpec {
    EuclideanDomain domain;
    std::optional<double> period;
    std::vector<std::size_t> resolutions;
};

/// {dim, shape:{kind, params}, R?, N:[...]}
inline DomainSpec domain_spec_from_json(const Json& j)
{
    const auto dim = j.at("dim").get<std::size_t>();
    DomainSpec s{domain_shape_from_json(dim, j.at("shape")), std::nullopt, {}};
    if (j.contains("R") && !j.at("R").is_null()) {
        s.period = j.at("R").get<double>();
    }
    if (j.contains("N")) {
        s.resolutions = j.at("N").get<std::vector<std::size_t>>();
    }
    return s;
}

inline Json approximation_report_to_json(const ApproximationReport& r)
{
    Json j;
    j["schema"] = "td-euclid/1";
    j["domain"] = {{"dim", r.domain.dimension()}, {"shape", domain_shape_to_json(r.domain)}, {"bounding_radius", r.domain.bounding_radius()}};
    j["reference_T"] = optional_json(r.reference_turan);
    j["reference_D"] = optional_json(r.reference_delsarte);
    Json levels = Json::array();
    for (const auto& lv : r.levels) {
        Json l;
        l["N"] = lv.resolution;
        l["R"] = lv.period;
        l["spacing"] = lv.spacing;
        l["grid_points"] = lv.grid_points;
        l["half_body_points"] = lv.half_body_points;
        l["discrete_measure"] = lv.discrete_measure;
        l["half_body_measure"] = lv.half_body_measure;
        l["T_N"] = lv.turan;
        l["D_N"] = lv.delsarte;
        l["T_error"] = optional_json(lv.turan_error);
        l["D_error"] = optional_json(lv.delsarte_error);
        l["lp_variables"] = {{"turan", lv.lp_variables_turan}, {"delsarte", lv.lp_variables_delsarte}};
        l["iterations"] = {{"turan", lv.iterations_turan}, {"delsarte", lv.iterations_delsarte}};
        levels.push_back(l);
    }
    j["levels"] = levels;
    Json orders = Json::array();
    for (const auto& o : r.convergence_orders) {
        orders.push_back(optional_json(o));
    }
    j["convergence_orders"] = orders;
    j["invariant_failures"] = r.invariant_failures;
    if (r.snapshot_resolution) {
        j["snapshot"] = {{"N", *r.snapshot_resolution}, {"turan_extremizer", r.snapshot_turan}, {"delsarte_extremizer", r.snapshot_delsarte}};
    }
    j["note"] = "grid approximation; values are heuristic, no bracketing claimed";
    return j;
}

inline Json gap_report_to_json(const GapReport& g)
{
    Json j;
    j["N"] = g.resolution;
    j["T_N"] = g.turan;
    j["D_N"] = g.delsarte;
    j["half_measure"] = g.half_measure;
    j["turan_gap"] = g.turan_gap;
    j["delsarte_gap"] = g.delsarte_gap;
    j["calibration_error"] = g.calibration_error;
    j["threshold"] = g.threshold;
    j["strict_delsarte_gap"] = g.strict_delsarte_gap;
    j["label"] = g.label;
    return j;
}

} // namespace tdlab
