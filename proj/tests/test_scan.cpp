#include "tdlab/scan.hpp"

#include <catch_amalgamated.hpp>

using namespace tdlab;

TEST_CASE("abelian groups of a given order")
{
    CHECK(abelian_groups_of_order(1).size() == 1);
    CHECK(abelian_groups_of_order(7).size() == 1);
    CHECK(abelian_groups_of_order(8).size() == 3);
    CHECK(abelian_groups_of_order(12).size() == 2);
    CHECK(abelian_groups_of_order(16).size() == 5);
    CHECK(abelian_groups_of_order(24).size() == 3);
    for (int n = 1; n <= 24; ++n) {
        for (const auto& g : abelian_groups_of_order(n)) {
            CHECK(g.order() == static_cast<std::size_t>(n));
        }
    }
    CHECK_THROWS_AS(abelian_groups_of_order(0), std::invalid_argument);
}

TEST_CASE("symmetric set enumeration")
{
    CHECK(all_symmetric_sets(FiniteAbelianGroup::parse("Z1")).size() == 1);
    CHECK(all_symmetric_sets(FiniteAbelianGroup::parse("Z4")).size() == 4);
    CHECK(all_symmetric_sets(FiniteAbelianGroup::parse("Z8")).size() == 16);
    CHECK(all_symmetric_sets(FiniteAbelianGroup::parse("Z3xZ3")).size() == 16);
    CHECK(all_symmetric_sets(FiniteAbelianGroup::parse("Z2xZ2xZ2")).size() == 128);
    for (const auto& u : all_symmetric_sets(FiniteAbelianGroup::parse("Z2xZ4"))) {
        CHECK(u.subset().is_symmetric());
    }
}

TEST_CASE("duality scan on small groups")
{
    std::vector<std::string> lines;
    ScanOptions opt;
    opt.sink = [&](const Json& j) { lines.push_back(j.dump()); };
    const auto r = scan_duality({FiniteAbelianGroup::parse("Z8"), FiniteAbelianGroup::parse("Z2xZ2")}, opt);
    CHECK(r.instances == 16 + 8);
    CHECK(r.violations == 0);
    CHECK(lines.size() == r.instances);
    CHECK(r.summary.at("worst_product_error").get<double>() <= 1e-7);
}

TEST_CASE("tiling/spectral scan on small groups")
{
    const auto r = scan_tiling_spectral({FiniteAbelianGroup::parse("Z6"), FiniteAbelianGroup::parse("Z2xZ4")});
    CHECK(r.instances == 63 + 255);
    CHECK(r.violations == 0);
}

TEST_CASE("packing scan on small groups")
{
    const auto r = scan_packing({FiniteAbelianGroup::parse("Z4"), FiniteAbelianGroup::parse("Z6")});
    CHECK(r.instances == 15 + 63);
    CHECK(r.violations == 0);
}

TEST_CASE("scan output does not depend on the thread count")
{
    const std::vector<FiniteAbelianGroup> groups{FiniteAbelianGroup::parse("Z9"), FiniteAbelianGroup::parse("Z2xZ4")};
    auto run = [&](unsigned threads) {
        std::vector<std::string> lines;
        ScanOptions opt;
        opt.threads = threads;
        opt.sink = [&](const Json& j) { lines.push_back(j.dump()); };
        scan_tiling_spectral(groups, opt);
        scan_duality(groups, opt);
        return lines;
    };
    const auto one = run(1);
    CHECK(one == run(4));
    CHECK(one == run(3));
}

TEST_CASE("scan budget")
{
    ScanOptions opt;
    opt.max_order = 8;
    CHECK_THROWS_AS(scan_packing({FiniteAbelianGroup::parse("Z9")}, opt), std::invalid_argument);
}
