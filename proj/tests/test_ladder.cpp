#include "coherent/ladder.hpp"

#include "coherent/bounds.hpp"

#include <doctest.h>

using namespace coherent;

namespace {

struct PointSpec {
    const char* x1;
    const char* x2;
};

void check_support(const LadderDistribution& ladder, const std::vector<PointSpec>& expected)
{
    REQUIRE(ladder.points.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(ladder.points[i].x1 == parse_rat(expected[i].x1));
        CHECK(ladder.points[i].x2 == parse_rat(expected[i].x2));
    }
}

} // namespace

TEST_CASE("classify: both lines above the antidiagonal")
{
    const auto spec = classify(Rat(2, 3), Rat(1, 5));
    REQUIRE(spec);
    CHECK(spec->geometry == LadderGeometry::BothAbove);
    CHECK(spec->subcase == LadderSubcase::None);
    CHECK(spec->steps == 4);
    CHECK(spec->condition == 2);
}

TEST_CASE("classify: the two-ladder straddle case")
{
    const auto spec = classify(Rat(1, 2), Rat(1, 3));
    REQUIRE(spec);
    CHECK(spec->geometry == LadderGeometry::Straddle);
    CHECK(spec->subcase == LadderSubcase::TwoLadders);
    CHECK(spec->steps == 3);
    CHECK(spec->condition == 1);
}

TEST_CASE("classify: no condition holds at p = 1/2, a = 0.37")
{
    // the three exact quotients are 237/74, 163/74 and 100/37, none integral
    CHECK(!classify(Rat(1, 2), parse_rat("0.37")));
}

TEST_CASE("classify: straddle subcases and the complement case")
{
    const auto first = classify(Rat(8, 17), Rat(3, 10));
    REQUIRE(first);
    CHECK(first->subcase == LadderSubcase::FirstSeriesEndsOnX1eq1);
    CHECK(first->steps == 4);

    const auto second = classify(Rat(6, 11), Rat(4, 13));
    REQUIRE(second);
    CHECK(second->subcase == LadderSubcase::SecondSeriesEndsOnX2eq0);
    CHECK(second->steps == 4);
    CHECK(second->condition == 3);

    const auto below = classify(Rat(1, 7), Rat(1, 4));
    REQUIRE(below);
    CHECK(below->geometry == LadderGeometry::BothBelow);
    CHECK(below->condition == 3);
}

TEST_CASE("classify: boundary geometry resolves to the surviving straddle series")
{
    // (2-a)p = 1: the second series starts in the corner and degenerates
    const auto upper = classify(Rat(5, 9), Rat(1, 5));
    REQUIRE(upper);
    CHECK(upper->geometry == LadderGeometry::Straddle);
    CHECK(upper->subcase == LadderSubcase::FirstSeriesEndsOnX1eq1);
    CHECK(upper->steps == 5);

    // a + (2-a)p = 1: the first series degenerates instead
    const auto lower = classify(Rat(1, 3), Rat(1, 2));
    REQUIRE(lower);
    CHECK(lower->geometry == LadderGeometry::Straddle);
    CHECK(lower->subcase == LadderSubcase::SecondSeriesEndsOnX2eq0);
    CHECK(lower->steps == 2);
}

TEST_CASE("classify rejects out-of-range arguments")
{
    CHECK_THROWS_AS(classify(Rat(0), Rat(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(classify(Rat(1), Rat(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(classify(Rat(1, 2), Rat(0)), std::invalid_argument);
    CHECK_THROWS_AS(classify(Rat(1, 2), Rat(5, 2)), std::invalid_argument);
}

TEST_CASE("classify: no attainment inside a in (1,2)")
{
    // exact arithmetic shows the three quotients cannot be integral there
    for (const char* a : {"3/2", "5/4", "17/16", "1.9"})
        for (const char* p : {"1/10", "1/3", "1/2", "2/3", "9/10"})
            CHECK(!classify(parse_rat(p), parse_rat(a)));
}

TEST_CASE("ladder for p = 2/3, a = 1/5 reproduces the seven-point staircase")
{
    const auto spec = classify(Rat(2, 3), Rat(1, 5));
    REQUIRE(spec);
    const auto witness = build_ladder(*spec);
    CHECK(!witness.second);
    validate_ladder(witness.first);
    check_support(witness.first, {{"2/5", "1"},
                                  {"2/5", "4/5"},
                                  {"3/5", "4/5"},
                                  {"3/5", "3/5"},
                                  {"4/5", "3/5"},
                                  {"4/5", "2/5"},
                                  {"1", "2/5"}});
    CHECK(witness.first.points.size() == std::size_t(2 * spec->steps - 1));
    // head mass q = 1/21: X=1 masses q, 6q, 6q, q sum to p = 2/3
    CHECK(witness.first.points[0].mass == Rat(1, 21));
    CHECK(witness.first.points[2].mass == Rat(6, 21));
}

TEST_CASE("ladder for p = 8/17, a = 3/10")
{
    const auto spec = classify(Rat(8, 17), Rat(3, 10));
    REQUIRE(spec);
    const auto witness = build_ladder(*spec);
    validate_ladder(witness.first);
    check_support(witness.first, {{"1/10", "1"},
                                  {"1/10", "7/10"},
                                  {"2/5", "7/10"},
                                  {"2/5", "2/5"},
                                  {"7/10", "2/5"},
                                  {"7/10", "1/10"},
                                  {"1", "1/10"}});
    CHECK(witness.first.points[0].mass == Rat(2, 187));
    CHECK(witness.first.points[3].mass == Rat(63, 187));
    CHECK(witness.first.points.size() == std::size_t(2 * spec->steps - 1));
}

TEST_CASE("ladder for p = 6/11, a = 4/13")
{
    const auto spec = classify(Rat(6, 11), Rat(4, 13));
    REQUIRE(spec);
    const auto witness = build_ladder(*spec);
    validate_ladder(witness.first);
    check_support(witness.first, {{"0", "12/13"},
                                  {"4/13", "12/13"},
                                  {"4/13", "8/13"},
                                  {"8/13", "8/13"},
                                  {"8/13", "4/13"},
                                  {"12/13", "4/13"},
                                  {"12/13", "0"}});
    CHECK(witness.first.points.size() == std::size_t(2 * spec->steps - 1));
}

TEST_CASE("two ladders for p = 1/2, a = 1/3")
{
    const auto spec = classify(Rat(1, 2), Rat(1, 3));
    REQUIRE(spec);
    const auto witness = build_ladder(*spec);
    REQUIRE(witness.second);
    validate_ladder(witness.first);
    validate_ladder(*witness.second);
    check_support(witness.first, {{"1/6", "1"},
                                  {"1/6", "2/3"},
                                  {"1/2", "2/3"},
                                  {"1/2", "1/3"},
                                  {"5/6", "1/3"},
                                  {"5/6", "0"}});
    check_support(*witness.second, {{"0", "5/6"},
                                    {"1/3", "5/6"},
                                    {"1/3", "1/2"},
                                    {"2/3", "1/2"},
                                    {"2/3", "1/6"},
                                    {"1", "1/6"}});
    // in the two-ladder case each chain carries 2N points
    CHECK(witness.first.points.size() == std::size_t(2 * spec->steps));
    CHECK(witness.second->points.size() == std::size_t(2 * spec->steps));
}

TEST_CASE("boundary ladder p = 5/9, a = 1/5 has nine points")
{
    const auto spec = classify(Rat(5, 9), Rat(1, 5));
    REQUIRE(spec);
    const auto witness = build_ladder(*spec);
    validate_ladder(witness.first);
    CHECK(witness.first.points.size() == 9);
    CHECK(witness.first.points.front().x1 == Rat(1, 5));
    CHECK(witness.first.points.front().x2 == Rat(1));
    CHECK(witness.first.points.back().x1 == Rat(1));
    CHECK(witness.first.points.back().x2 == Rat(1, 5));
}

TEST_CASE("both-below ladders are complements of both-above ones")
{
    const auto spec = classify(Rat(1, 7), Rat(1, 4));
    REQUIRE(spec);
    REQUIRE(spec->geometry == LadderGeometry::BothBelow);
    const auto witness = build_ladder(*spec);
    validate_ladder(witness.first);
    const auto table = to_table(witness.first);
    CHECK(validate_coherence<Rat>(table, Rat(0)).pass);
    CHECK(mean_x1<Rat>(table) == Rat(1, 7));
}

TEST_CASE("mass propagation is consistent on every tight spec")
{
    // normalizations of both X classes must hold simultaneously; the
    // builder asserts this, so construction succeeding is the test
    for (auto [p, a] : {std::pair{"2/3", "1/5"}, {"8/17", "3/10"}, {"6/11", "4/13"},
                        {"1/2", "1/3"}, {"5/9", "1/5"}, {"1/3", "1/2"}, {"2/3", "1/2"},
                        {"1/7", "1/4"}, {"1/2", "1/2"}, {"1/2", "1"}}) {
        const auto spec = classify(parse_rat(p), parse_rat(a));
        REQUIRE_MESSAGE(spec, "expected tight: p=", p, " a=", a);
        const auto witness = build_ladder(*spec);
        validate_ladder(witness.first);
        if (witness.second)
            validate_ladder(*witness.second);
    }
}

TEST_CASE("a = 2 has no chain witness")
{
    const auto spec = classify(Rat(1, 2), Rat(2));
    REQUIRE(spec);
    CHECK(spec->steps == 1);
    CHECK_THROWS_AS(build_ladder(*spec), LadderConstructionError);
}

TEST_CASE("to_table produces exactly coherent tables")
{
    const auto fig2 = build_ladder(*classify(Rat(2, 3), Rat(1, 5)));
    const auto table = to_table(fig2.first);
    CHECK(validate_coherence<Rat>(table, Rat(0)).pass);
    CHECK(mean_x1<Rat>(table) == Rat(2, 3));

    const auto fig4 = build_ladder(*classify(Rat(6, 11), Rat(4, 13)));
    const auto table4 = to_table(fig4.first);
    const std::vector<Rat> expected_grid{Rat(0), Rat(4, 13), Rat(8, 13), Rat(12, 13)};
    CHECK(table4.atoms == expected_grid);
}

TEST_CASE("to_table accepts a degenerate hand-made one-point distribution")
{
    LadderDistribution degenerate;
    degenerate.prior = Rat(1, 3);
    degenerate.step = Rat(1, 2);
    degenerate.points = {{Rat(1, 3), Rat(1, 3), 1, Rat(1, 3)},
                         {Rat(1, 3), Rat(1, 3), 0, Rat(2, 3)}};
    const auto table = to_table(degenerate);
    CHECK(table.atoms.size() == 1);
    CHECK(validate_coherence<Rat>(table, Rat(0)).pass);
}

TEST_CASE("tight specs attain p(1-p) alpha^2/(alpha-beta) exactly")
{
    // quadratic coefficients with step a: alpha = a, beta = a - 1
    for (auto [p_text, a_text] : {std::pair{"2/3", "1/5"}, {"8/17", "3/10"}, {"6/11", "4/13"}}) {
        const Rat p = parse_rat(p_text);
        const Rat a = parse_rat(a_text);
        const auto spec = classify(p, a);
        REQUIRE(spec);
        const auto table = to_table(build_ladder(*spec).first);
        const auto f = ObjectiveFn::quadratic_form(a, a - 1, p);
        const Rat expected = p * (1 - p) * a * a / (a - (a - 1));
        CHECK(expectation<Rat>(table, f) == expected);
    }
}

TEST_CASE("every convex mix of the two ladders is coherent with the same value")
{
    const Rat p(1, 2);
    const Rat a(1, 3);
    const auto witness = build_ladder(*classify(p, a));
    REQUIRE(witness.second);
    const auto f = ObjectiveFn::quadratic_form(a, a - 1, p);
    const Rat expected = p * (1 - p) * a * a; // alpha - beta = 1
    for (const Rat& lambda : {Rat(0), Rat(1, 3), Rat(1)}) {
        const auto table = to_table(witness, lambda);
        CHECK(validate_coherence<Rat>(table, Rat(0)).pass);
        CHECK(expectation<Rat>(table, f) == expected);
    }
}

TEST_CASE("ladder points sit on their support lines")
{
    const Rat p(8, 17), a(3, 10);
    const auto witness = build_ladder(*classify(p, a));
    const Rat low = (2 - a) * p;
    const Rat high = a + low;
    for (const auto& pt : witness.first.points) {
        CHECK(pt.x1 + pt.x2 == (pt.x_value == 1 ? high : low));
        CHECK(pt.mass > 0);
    }
}
