#include "tdlab/io.hpp"

#include <catch_amalgamated.hpp>

using namespace tdlab;
using Catch::Matchers::WithinAbs;

namespace {

Json z8_certificate()
{
    const auto g = FiniteAbelianGroup::parse("Z2xZ4");
    return certificate_to_json(certify({ProblemKind::Delsarte, SymmetricSet(g, {0, 1, 3})}));
}

} // namespace

TEST_CASE("certificates carry the expected fields")
{
    const auto j = z8_certificate();
    CHECK(j.at("schema") == "td-cert/1");
    CHECK(j.at("group") == "Z2xZ4");
    CHECK(j.at("U") == Json::array({0, 1, 3}));
    CHECK(j.at("kind") == "delsarte");
    CHECK(j.at("pass") == true);
    CHECK(j.at("extremizer_primal").size() == 8);
    CHECK_THAT(j.at("product").get<double>(), WithinAbs(1.0, 1e-7));
}

TEST_CASE("certificates survive a text round trip and re-verify")
{
    const auto j = Json::parse(z8_certificate().dump());
    const auto v = verify_certificate(j);
    CHECK(v.pass);
    CHECK(v.matches_claim);
    CHECK(v.failures.empty());
    CHECK_THAT(v.product, WithinAbs(1.0, 1e-7));
}

TEST_CASE("tampered certificates fail verification")
{
    SECTION("claimed value")
    {
        auto j = z8_certificate();
        j["value_primal"] = j["value_primal"].get<double>() + 1e-3;
        const auto v = verify_certificate(j);
        CHECK_FALSE(v.pass);
        CHECK_FALSE(v.matches_claim);
    }
    SECTION("extremizer")
    {
        auto j = z8_certificate();
        j["extremizer_dual"][2] = j["extremizer_dual"][2].get<double>() + 0.1;
        j["extremizer_dual"][6] = j["extremizer_dual"][6].get<double>() + 0.1;
        CHECK_FALSE(verify_certificate(j).pass);
    }
    SECTION("evenness")
    {
        auto j = z8_certificate();
        j["extremizer_primal"][1] = 0.25;
        const auto v = verify_certificate(j);
        CHECK_FALSE(v.pass);
        REQUIRE_FALSE(v.failures.empty());
        CHECK(v.failures[0] == "extremizer is not even");
    }
    SECTION("schema and structure")
    {
        auto j = z8_certificate();
        j["schema"] = "td-cert/0";
        CHECK_THROWS_AS(verify_certificate(j), std::invalid_argument);
        auto k = z8_certificate();
        k["U"] = Json::array({0, 1});
        CHECK_THROWS_AS(verify_certificate(k), std::invalid_argument);
        auto l = z8_certificate();
        l["kind"] = "dual_turan";
        CHECK_THROWS_AS(verify_certificate(l), std::invalid_argument);
    }
}

TEST_CASE("domain specifications")
{
    const auto s = domain_spec_from_json(Json::parse(R"({"dim": 2, "shape": {"kind": "box", "params": {"half_width": 0.5}}, "N": [8, 16]})"));
    CHECK(s.domain.dimension() == 2);
    CHECK(std::string(s.domain.kind()) == "box");
    CHECK(s.domain.bounding_box() == std::vector<double>{0.5, 0.5});
    CHECK_FALSE(s.period);
    CHECK(s.resolutions == std::vector<std::size_t>{8, 16});

    const auto t = domain_spec_from_json(Json::parse(R"({"dim": 1, "shape": {"kind": "ball", "params": {"radius": 1}}, "R": 5})"));
    CHECK(t.period == std::optional<double>{5.0});

    const auto round = domain_shape_from_json(2, domain_shape_to_json(EuclideanDomain::ball(2, 0.75)));
    CHECK(std::string(round.kind()) == "ball");
    CHECK(round.bounding_radius() == 0.75);

    CHECK_THROWS_AS(domain_spec_from_json(Json::parse(R"({"dim": 2, "shape": {"kind": "star"}})")), std::invalid_argument);
    CHECK_THROWS(domain_spec_from_json(Json::parse(R"({"shape": {"kind": "ball"}})")));
}

TEST_CASE("classify records")
{
    const auto z4 = FiniteAbelianGroup::parse("Z4");
    const auto j = classify_to_json(classify(Subset(z4, {0, 1})));
    CHECK(j.at("tiles") == true);
    CHECK(j.at("tiling_lambda") == Json::array({0, 2}));
    CHECK(j.at("difference_set") == Json::array({0, 1, 3}));
}

TEST_CASE("approximation reports")
{
    const auto rep = approximate_constants(EuclideanDomain::ball(1, 1.0), {8, 16});
    const auto j = approximation_report_to_json(rep);
    CHECK(j.at("schema") == "td-euclid/1");
    CHECK(j.at("levels").size() == 2);
    CHECK(j.at("convergence_orders").size() == 1);
    CHECK_THAT(j.at("reference_T").get<double>(), WithinAbs(1.0, 1e-15));
    CHECK(j.at("snapshot").at("N") == 16);
}
