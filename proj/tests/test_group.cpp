#include "oracles.hpp"

#include "tdlab/group.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace tdlab;
using Catch::Matchers::WithinAbs;

namespace {

const char* kGroups[] = {"Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z8", "Z12", "Z2xZ2", "Z2xZ4", "Z3xZ3", "Z4xZ4", "Z2xZ2xZ2", "Z2xZ3xZ5", "Z8xZ8", "Z2xZ2xZ2xZ2xZ4"};

std::vector<FiniteAbelianGroup> test_groups()
{
    std::vector<FiniteAbelianGroup> out;
    for (const char* s : kGroups) {
        out.push_back(FiniteAbelianGroup::parse(s));
    }
    return out;
}

GroupFunction random_even(const FiniteAbelianGroup& g, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    GroupFunction f(g);
    for (std::size_t x = 0; x < g.order(); ++x) {
        const std::size_t y = g.negate(x);
        if (y >= x) {
            f[x] = f[y] = u(rng);
        }
    }
    return f;
}

} // namespace

TEST_CASE("group literals parse and print")
{
    const auto g = FiniteAbelianGroup::parse("Z2xZ4");
    CHECK(g.order() == 8);
    CHECK(g.rank() == 2);
    CHECK(g.literal() == "Z2xZ4");
    CHECK(FiniteAbelianGroup::parse("Z12").order() == 12);
    CHECK_THROWS_AS(FiniteAbelianGroup::parse("Z0"), std::invalid_argument);
    CHECK_THROWS_AS(FiniteAbelianGroup::parse("Q8"), std::invalid_argument);
    CHECK_THROWS_AS(FiniteAbelianGroup::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(FiniteAbelianGroup::parse("Z2x"), std::invalid_argument);
}

TEST_CASE("element order is mixed radix with the first factor most significant")
{
    const auto g = FiniteAbelianGroup::parse("Z2xZ3");
    const std::vector<int> c{1, 2};
    CHECK(g.index(c) == 5);
    CHECK(g.coords(4) == std::vector<int>{1, 1});
    CHECK(g.add(4, 5) == g.index(std::vector<int>{0, 0}));
    CHECK(g.negate(1) == 2);
    CHECK_THROWS_AS(g.check_index(6), std::out_of_range);
}

TEST_CASE("character values")
{
    const auto z4 = FiniteAbelianGroup::parse("Z4");
    const auto v = character_pairing(z4, 1, 1);
    CHECK_THAT(v.real(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(v.imag(), WithinAbs(1.0, 1e-15));

    const auto k = FiniteAbelianGroup::parse("Z2xZ2");
    const auto w = character_pairing(k, k.index(std::vector<int>{1, 1}), k.index(std::vector<int>{1, 0}));
    CHECK_THAT(w.real(), WithinAbs(-1.0, 1e-15));

    for (const auto& g : test_groups()) {
        for (std::size_t x = 0; x < g.order(); ++x) {
            const auto one = character_pairing(g, 0, x);
            CHECK(one == std::complex<double>(1.0, 0.0));
        }
    }
}

TEST_CASE("characters agree with the coordinate formula")
{
    for (const auto& g : test_groups()) {
        if (g.order() > 64) {
            continue;
        }
        for (std::size_t t = 0; t < g.order(); ++t) {
            for (std::size_t x = 0; x < g.order(); ++x) {
                REQUIRE(std::abs(character_pairing(g, t, x) - oracle::character(g, t, x)) < 1e-12);
            }
        }
    }
}

TEST_CASE("fourier transform examples")
{
    for (int n : {1, 2, 3, 5, 8}) {
        const FiniteAbelianGroup g({n});
        const auto d = fourier(GroupFunction::delta0(g));
        for (std::size_t t = 0; t < g.order(); ++t) {
            CHECK_THAT(d[t], WithinAbs(1.0 / std::sqrt(n), 1e-14));
        }
        const auto c = fourier(GroupFunction::constant(g, 1.0));
        CHECK_THAT(c[0], WithinAbs(std::sqrt(n), 1e-14));
        for (std::size_t t = 1; t < g.order(); ++t) {
            CHECK_THAT(c[t], WithinAbs(0.0, 1e-14));
        }
    }
    const auto z4 = FiniteAbelianGroup::parse("Z4");
    const auto f = fourier(GroupFunction::indicator(Subset(z4, {0, 2})));
    const std::vector<double> expect{1, 0, 1, 0};
    for (std::size_t t = 0; t < 4; ++t) {
        CHECK_THAT(f[t], WithinAbs(expect[t], 1e-15));
    }
}

TEST_CASE("fourier rejects functions that are not even")
{
    const auto z4 = FiniteAbelianGroup::parse("Z4");
    CHECK_THROWS_AS(fourier(GroupFunction::indicator(Subset(z4, {0, 1}))), std::invalid_argument);
}

TEST_CASE("fourier matches the naive transform")
{
    std::mt19937_64 rng(11);
    for (const auto& g : test_groups()) {
        if (g.order() > 64) {
            continue;
        }
        const auto f = random_even(g, rng);
        const auto fh = fourier(f);
        const auto ref = oracle::dft(g, f.values());
        for (std::size_t t = 0; t < g.order(); ++t) {
            REQUIRE(std::abs(fh[t] - ref[t].real()) < 1e-12);
            REQUIRE(std::abs(ref[t].imag()) < 1e-12);
        }
    }
}

TEST_CASE("fast transform matches the dense reference within 1e-12")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const char* lit : {"Z256", "Z16xZ16", "Z2xZ2xZ2xZ2xZ2xZ2xZ2xZ2", "Z3xZ5xZ7", "Z4xZ6xZ10", "Z1"}) {
        const auto g = FiniteAbelianGroup::parse(lit);
        std::vector<std::complex<double>> f(g.order());
        for (auto& v : f) {
            v = {u(rng), u(rng)};
        }
        const auto a = detail::fourier_dense(g, f);
        const auto b = detail::fourier_fast(g, f);
        double worst = 0.0;
        for (std::size_t t = 0; t < g.order(); ++t) {
            worst = std::max(worst, std::abs(a[t] - b[t]));
        }
        INFO(lit);
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("Parseval identity")
{
    std::mt19937_64 rng(3);
    for (const auto& g : test_groups()) {
        for (int rep = 0; rep < 5; ++rep) {
            const auto f = random_even(g, rng);
            const auto h = random_even(g, rng);
            const auto fh = fourier(f);
            const auto hh = fourier(h);
            long double lhs = 0.0L;
            long double rhs = 0.0L;
            for (std::size_t x = 0; x < g.order(); ++x) {
                lhs += f[x] * h[x];
                rhs += fh[x] * hh[x];
            }
            REQUIRE(std::abs(static_cast<double>(lhs - rhs)) <= 1e-10 * f.l2_norm() * h.l2_norm());
        }
    }
}

TEST_CASE("convolution theorem")
{
    std::mt19937_64 rng(8);
    for (const auto& g : test_groups()) {
        if (g.order() > 64) {
            continue;
        }
        for (int rep = 0; rep < 5; ++rep) {
            const auto f = random_even(g, rng);
            const auto h = random_even(g, rng);
            const auto lhs = fourier(convolve(f, h));
            const auto rhs = fourier(f).pointwise(fourier(h));
            REQUIRE(max_abs_difference(lhs, rhs) <= 1e-10 * f.l2_norm() * h.l2_norm());
        }
    }
}

TEST_CASE("convolution examples")
{
    const auto z4 = FiniteAbelianGroup::parse("Z4");
    const auto a = GroupFunction::indicator(Subset(z4, {0, 1}));
    const auto b = GroupFunction::indicator(Subset(z4, {0, 3}));
    const auto c = convolve(a, b);
    const std::vector<double> expect{1, 0.5, 0, 0.5};
    for (std::size_t x = 0; x < 4; ++x) {
        CHECK_THAT(c[x], WithinAbs(expect[x], 1e-15));
    }
    const Subset lam(z4, {0, 2});
    const auto d = convolve(GroupFunction::indicator(lam), GroupFunction::indicator(lam.negated()));
    const std::vector<double> expect2{1, 0, 1, 0};
    for (std::size_t x = 0; x < 4; ++x) {
        CHECK_THAT(d[x], WithinAbs(expect2[x], 1e-15));
    }
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto g = FiniteAbelianGroup::parse("Z3xZ4");
    GroupFunction f(g);
    GroupFunction h(g);
    for (std::size_t x = 0; x < g.order(); ++x) {
        f[x] = u(rng);
        h[x] = u(rng);
    }
    const auto ref = oracle::convolution(g, f.values(), h.values());
    const auto got = convolve(f, h);
    for (std::size_t x = 0; x < g.order(); ++x) {
        CHECK_THAT(got[x], WithinAbs(ref[x], 1e-13));
    }
}

TEST_CASE("evenness is preserved and the transform of an even real function is real")
{
    std::mt19937_64 rng(4);
    for (const auto& g : test_groups()) {
        const auto f = random_even(g, rng);
        CHECK(fourier(f).is_even(1e-12));
        const auto z = detail::fourier_complex(g, f.values());
        for (const auto& v : z) {
            REQUIRE(std::abs(v.imag()) < 1e-12);
        }
    }
}

TEST_CASE("autocorrelation support")
{
    const auto z4 = FiniteAbelianGroup::parse("Z4");
    CHECK(autocorrelation_support(Subset(z4, {0})).elements() == std::vector<std::size_t>{0});
    CHECK(autocorrelation_support(Subset(z4, {0, 1})).elements() == std::vector<std::size_t>{0, 1, 3});
    const auto z8 = FiniteAbelianGroup::parse("Z8");
    CHECK(autocorrelation_support(Subset(z8, {0, 1, 4})).elements() == std::vector<std::size_t>{0, 1, 3, 4, 5, 7});
    CHECK_THROWS_AS(autocorrelation_support(Subset(z8)), std::invalid_argument);
}

TEST_CASE("m(A) is the transform of the indicator at 0")
{
    for (const auto& g : test_groups()) {
        if (g.order() > 64) {
            continue;
        }
        std::mt19937_64 rng(g.order());
        for (int rep = 0; rep < 5; ++rep) {
            Subset a(g);
            for (std::size_t x = 0; x < g.order(); ++x) {
                if (rng() % 2 == 0) {
                    a.insert(x);
                    a.insert(g.negate(x));
                }
            }
            const double expect = static_cast<double>(a.size()) / std::sqrt(static_cast<double>(g.order()));
            CHECK_THAT(measure(a), WithinAbs(expect, 1e-15));
            CHECK_THAT(fourier(GroupFunction::indicator(a))[0], WithinAbs(expect, 1e-12));
        }
    }
}

TEST_CASE("symmetric sets validate their input")
{
    const auto z4 = FiniteAbelianGroup::parse("Z4");
    CHECK_NOTHROW(SymmetricSet(z4, {0, 1, 3}));
    CHECK_THROWS_WITH(SymmetricSet(z4, {0, 1}), Catch::Matchers::ContainsSubstring("set not symmetric"));
    CHECK_THROWS_WITH(SymmetricSet(z4, {1, 3}), Catch::Matchers::ContainsSubstring("does not contain 0"));
    CHECK_THROWS_AS(SymmetricSet(z4, {0, 7}), std::out_of_range);
}

TEST_CASE("index lists parse")
{
    CHECK(parse_index_list("0,1,3") == std::vector<std::size_t>{0, 1, 3});
    CHECK(parse_index_list(" 2 , 5") == std::vector<std::size_t>{2, 5});
    CHECK(parse_index_list("[3,0,3]") == std::vector<std::size_t>{0, 3});
    CHECK_THROWS_AS(parse_index_list("1,-2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_index_list("a"), std::invalid_argument);
}
