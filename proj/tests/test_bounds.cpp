#include "coherent/bounds.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace coherent;

TEST_CASE("sphere_max closed form")
{
    CHECK(sphere_max({1.0, 0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(sphere_max({0.0, 0.0, 5.0}) == 0.0);
    CHECK(sphere_max({1.0, -1.0, 1.0}) == doctest::Approx(0.5));
    CHECK(sphere_max({-1.0, 1.0, 1.0}) == doctest::Approx(4.0));
    CHECK(sphere_max({2.0, 1.0, 1.0}) == doctest::Approx(4.0));       // alpha = 2 beta boundary
    CHECK(sphere_max({1.0, 1.0, 1.0}) == doctest::Approx(4.0));       // 2 beta > alpha
    CHECK(sphere_max({-2.0, -1.0, 3.0}) == doctest::Approx(0.0));     // everything negative
    CHECK_THROWS_AS(sphere_max({1.0, 0.0, -1.0}), std::invalid_argument);
}

TEST_CASE("sphere oracle agrees with the closed form on the three reference instances")
{
    CHECK(std::abs(sphere_max_numeric({1.0, 0.0, 1.0}, 200) - 1.0) <= 1e-4);
    CHECK(std::abs(sphere_max_numeric({1.0, -1.0, 1.0}, 200) - 0.5) <= 1e-4);
    CHECK(std::abs(sphere_max_numeric({-1.0, 1.0, 1.0}, 200) - 4.0) <= 1e-4);
    CHECK_THROWS_AS(sphere_max_numeric({1.0, 0.0, 1.0}, 4), std::invalid_argument);
}

TEST_CASE("sphere oracle never exceeds the closed form")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 12; ++trial) {
        const SphereInstance inst{coef(rng), coef(rng), 1.0};
        const double closed = sphere_max(inst);
        const double numeric = sphere_max_numeric(inst, 64);
        CHECK(numeric <= closed + 1e-9);
        CHECK(numeric >= closed - 0.05); // coarse grid still lands close
    }
}

TEST_CASE("quad_bound: projection branch at p = 1/2")
{
    const auto squared_diff = quad_bound(Rat(1, 2), {Rat(1), Rat(0)});
    CHECK(squared_diff.value == Rat(1, 4));
    CHECK(squared_diff.tight);
    REQUIRE(squared_diff.spec);
    CHECK(squared_diff.spec->steps == 1);

    const auto cov_form = quad_bound(Rat(1, 2), {Rat(1), Rat(-1)});
    CHECK(cov_form.value == Rat(1, 8));
    CHECK(cov_form.tight);
    REQUIRE(cov_form.spec);
    CHECK(cov_form.spec->subcase == LadderSubcase::TwoLadders);
}

TEST_CASE("quad_bound: the covariance form is strict outside [1/3, 2/3]")
{
    const auto bound = quad_bound(Rat(1, 4), {Rat(1), Rat(-1)});
    CHECK(bound.value == Rat(3, 32)); // (1/2) p (1-p)
    CHECK(!bound.tight);
    CHECK(!bound.witness);
}

TEST_CASE("quad_bound: elementary branch picks the right degenerate witness")
{
    const auto informative = quad_bound(Rat(1, 3), {Rat(1), Rat(2)}); // 2 beta > alpha
    CHECK(informative.value == Rat(8) * Rat(2, 9)); // max(0, 8, 3) p(1-p)
    CHECK(informative.tight);
    REQUIRE(informative.degenerate_witness);
    CHECK(covariance<Rat>(*informative.degenerate_witness) == Rat(2, 9)); // X1 = X2 = X

    const auto negative = quad_bound(Rat(1, 3), {Rat(-1), Rat(-1)});
    CHECK(negative.value == Rat(0));
    REQUIRE(negative.degenerate_witness);
    CHECK(covariance<Rat>(*negative.degenerate_witness) == Rat(0)); // X1 = X2 = p

    const auto mixed = quad_bound(Rat(1, 3), {Rat(-1), Rat(1)});
    CHECK(mixed.value == Rat(4) * Rat(2, 9));
    REQUIRE(mixed.degenerate_witness);
}

TEST_CASE("quad_bound: alpha = 2 beta boundary is tight via X1 = X2 = X")
{
    const auto bound = quad_bound(Rat(2, 5), {Rat(2), Rat(1)});
    CHECK(bound.value == Rat(4) * Rat(2, 5) * Rat(3, 5));
    CHECK(bound.tight);
    REQUIRE(bound.degenerate_witness);
    const auto f = ObjectiveFn::quadratic_form(Rat(2), Rat(1), Rat(2, 5));
    CHECK(expectation<Rat>(*bound.degenerate_witness, f) == bound.value);
}

TEST_CASE("quad_bound value scales linearly in the form; tightness is scale-invariant")
{
    const std::vector<std::pair<Rat, Rat>> forms{{Rat(1), Rat(-4)}, {Rat(1), Rat(-1)},
                                                 {Rat(3), Rat(1)}, {Rat(-2), Rat(1)}};
    for (const auto& [alpha, beta] : forms) {
        const auto base = quad_bound(Rat(2, 3), {alpha, beta});
        for (const Rat& c : {Rat(2), Rat(1, 3), Rat(7, 5)}) {
            const auto scaled = quad_bound(Rat(2, 3), {c * alpha, c * beta});
            CHECK(scaled.value == c * base.value);
            CHECK(scaled.tight == base.tight);
        }
    }
}

TEST_CASE("cov_bound three-piece values")
{
    CHECK(cov_bound_exact(Rat(1, 2)) == Rat(-1, 32));
    CHECK(cov_bound_exact(Rat(1, 4)) == Rat(-9, 400));
    CHECK(cov_bound_exact(Rat(3, 4)) == Rat(-9, 400));
    CHECK(cov_bound_exact(Rat(1, 10)) == -Rat(9, 110) * Rat(9, 110));
    CHECK(cov_bound(0.5) == doctest::Approx(-1.0 / 32).epsilon(1e-15));
    CHECK_THROWS_AS(cov_bound_exact(Rat(0)), std::invalid_argument);
    CHECK_THROWS_AS(cov_bound(1.0), std::invalid_argument);
}

TEST_CASE("cov_bound branch formulas agree at the joints")
{
    // exact: -(p(1-p)/(1+p))^2 = -p(1-p)/8 at p = 1/3, and mirrored at 2/3
    const Rat third(1, 3);
    const Rat left = -rat_pow(third * (1 - third) / (1 + third), 2);
    CHECK(left == -third * (1 - third) / 8);
    const double jump_lo = std::abs((1.0 / 3) * (2.0 / 3) / 8 -
                                    std::pow((1.0 / 3) * (2.0 / 3) / (4.0 / 3), 2));
    const double jump_hi = std::abs((2.0 / 3) * (1.0 / 3) / 8 -
                                    std::pow((2.0 / 3) * (1.0 / 3) / (4.0 / 3), 2));
    CHECK(jump_lo <= 1e-15);
    CHECK(jump_hi <= 1e-15);
}

TEST_CASE("cov_bound is complement-symmetric")
{
    for (const char* p : {"1/10", "1/4", "1/3", "2/5", "1/2"}) {
        const Rat q = parse_rat(p);
        CHECK(cov_bound_exact(q) == cov_bound_exact(1 - q));
    }
}

TEST_CASE("cov_witness attains the bound exactly on every branch")
{
    for (const char* p_text : {"1/10", "1/4", "0.3", "1/3", "1/2", "2/3", "3/4", "9/10"}) {
        const Rat p = parse_rat(p_text);
        const auto witness = cov_witness(p);
        CHECK(validate_coherence<Rat>(witness, Rat(0)).pass);
        CHECK(covariance<Rat>(witness) == cov_bound_exact(p));
    }
    // the complement construction at p = 9/10 lands on -(9/110)^2
    CHECK(covariance<Rat>(cov_witness(Rat(9, 10))) == -Rat(81, 12100));
}

TEST_CASE("middle-branch covariance agrees with the quadratic machinery")
{
    for (const char* p_text : {"1/3", "3/8", "1/2", "5/8", "2/3"}) {
        const Rat p = parse_rat(p_text);
        const auto quad = quad_bound(p, {Rat(1, 4), Rat(-1, 4)});
        CHECK(quad.tight);
        CHECK(-quad.value == cov_bound_exact(p));
    }
}

TEST_CASE("alpha0 matches its defining equation")
{
    const double a0 = alpha0();
    CHECK(std::abs(a0 - 2.25751) <= 1e-4);
    // both branches agree at the crossover
    CHECK(std::abs(abspow_bound(a0 - 1e-12) - abspow_bound(a0 + 1e-12)) <= 1e-9);
    // sign pattern pinning the bracket: the six-point value is below
    // 2^-alpha at 2 and above it at 3
    const auto six_at_2 = expectation<double>(abspow_six_point_table(abspow_a_opt(2.0)),
                                              ObjectiveFn::abs_power(2.0));
    CHECK(six_at_2 < 0.25);
    CHECK(abspow_bound(3.0) > 0.125);
}

TEST_CASE("abspow_bound on both branches")
{
    CHECK(abspow_bound(0.5) == doctest::Approx(std::exp2(-0.5)).epsilon(1e-15));
    CHECK(abspow_bound(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(abspow_bound(2.0) == doctest::Approx(0.25).epsilon(1e-15));
    // frozen oracle values (30-digit evaluation of the printed closed form)
    CHECK(abspow_bound(3.0) == doctest::Approx(0.17119910863906959).epsilon(1e-14));
    CHECK(abspow_bound(4.0) == doctest::Approx(0.13798987489692201).epsilon(1e-14));
    CHECK(abspow_bound(8.0) == doctest::Approx(0.078281578345073435).epsilon(1e-14));
    CHECK_THROWS_AS(abspow_bound(0.0), std::invalid_argument);
}

TEST_CASE("abspow witness matches the bound on both branches")
{
    for (double alpha : {0.5, 1.0, 2.0, 3.0, 4.0, 8.0, 2.2575078689}) {
        const auto witness = abspow_witness(alpha);
        CHECK(validate_coherence<double>(witness, 1e-12).pass);
        const double value = expectation<double>(witness, ObjectiveFn::abs_power(alpha));
        CHECK(value == doctest::Approx(abspow_bound(alpha)).epsilon(1e-13));
    }
    CHECK(abspow_a_opt(4.0) == doctest::Approx(0.17539052967910609).epsilon(1e-14));
}

TEST_CASE("six-point family degenerates to identical experts at a = 0")
{
    const auto table = abspow_six_point_table(0.0);
    CHECK(validate_coherence<double>(table, 1e-15).pass);
    CHECK(expectation<double>(table, ObjectiveFn::abs_power(3.0)) == 0.0);
}

TEST_CASE("asymptotics approach 2/e from below the tolerance curve")
{
    const double limit = 2.0 / std::exp(1.0);
    CHECK(std::abs(asymptotic_check(1e4) - limit) <= 0.01);
    CHECK(std::abs(asymptotic_check(1e6) - limit) <= 1e-4);
    const double d2 = std::abs(asymptotic_check(1e2) - limit);
    const double d3 = std::abs(asymptotic_check(1e3) - limit);
    const double d4 = std::abs(asymptotic_check(1e4) - limit);
    CHECK(d2 > d3);
    CHECK(d3 > d4);
    CHECK_THROWS_AS(asymptotic_check(2.0), std::invalid_argument);
}
