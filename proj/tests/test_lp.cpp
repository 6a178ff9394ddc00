#include "coherent/lp.hpp"

#include "coherent/bounds.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace coherent;

namespace {

ObjectiveFn cov_objective(const char* p)
{
    return ObjectiveFn::neg_centered_product(parse_rat(p));
}

} // namespace

TEST_CASE("one-variable warm-up: min x subject to x >= 3")
{
    LinearProgram lp;
    lp.sense = Sense::Minimize;
    lp.objective = {1.0};
    lp.rows = {{1.0}};
    lp.rhs = {3.0};
    lp.relations = {Relation::GreaterEq};
    lp.lower = {0.0};
    lp.upper = {std::numeric_limits<double>::infinity()};
    const auto sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sol.primal[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sol.dual[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infeasible and unbounded statuses are reported, not thrown")
{
    LinearProgram infeasible;
    infeasible.objective = {1.0};
    infeasible.rows = {{1.0}, {1.0}};
    infeasible.rhs = {3.0, 1.0};
    infeasible.relations = {Relation::GreaterEq, Relation::LessEq};
    infeasible.lower = {0.0};
    infeasible.upper = {std::numeric_limits<double>::infinity()};
    CHECK(solve(infeasible).status == LpStatus::Infeasible);

    LinearProgram unbounded;
    unbounded.sense = Sense::Maximize;
    unbounded.objective = {1.0};
    unbounded.rows = {};
    unbounded.rhs = {};
    unbounded.relations = {};
    unbounded.lower = {0.0};
    unbounded.upper = {std::numeric_limits<double>::infinity()};
    CHECK(solve(unbounded).status == LpStatus::Unbounded);
}

TEST_CASE("single-atom grid: the constant expert is the whole feasible set")
{
    const auto f = cov_objective("1/2");
    const auto lp = build_primal(0.5, f, {0.5});
    CHECK(lp.num_columns() == 2);
    CHECK(lp.num_rows() == 4);
    const auto sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == doctest::Approx(f(0.5, 0.5)).epsilon(1e-12));
    CHECK(sol.primal[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.primal[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("covariance LP on the witness grid recovers the two-atom optimum")
{
    const auto f = cov_objective("1/4");
    const std::vector<double> grid{0.0, 0.4};
    const auto lp = build_primal(0.25, f, grid);
    CHECK(lp.num_columns() == 8);
    CHECK(lp.num_rows() == 6);
    const auto sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == doctest::Approx(9.0 / 400).epsilon(1e-10));
    // alpha concentrates on (0.4, 0.4); beta splits evenly on (0, 0.4), (0.4, 0)
    CHECK(sol.primal[3] == doctest::Approx(1.0).epsilon(1e-9));  // alpha[1][1]
    CHECK(sol.primal[4 + 1] == doctest::Approx(0.5).epsilon(1e-9)); // beta[0][1]
    CHECK(sol.primal[4 + 2] == doctest::Approx(0.5).epsilon(1e-9)); // beta[1][0]
    CHECK(sol.feasibility_residual <= 1e-9);
    CHECK(sol.complementary_slackness_residual <= 1e-8);
}

TEST_CASE("covariance LP at p = 1/2 on {k/4} hits the ladder value")
{
    const auto sol = solve(build_primal(0.5, cov_objective("1/2"), uniform_grid(4)));
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == doctest::Approx(1.0 / 32).epsilon(1e-10));
}

TEST_CASE("dual LP values coincide with the primal on the reference instances")
{
    const auto single = solve(build_dual(0.5, cov_objective("1/2"), {0.5}));
    REQUIRE(single.status == LpStatus::Optimal);
    CHECK(single.value == doctest::Approx(0.0).epsilon(1e-12));

    const auto witness_grid = solve(build_dual(0.25, cov_objective("1/4"), {0.0, 0.4}));
    REQUIRE(witness_grid.status == LpStatus::Optimal);
    CHECK(witness_grid.value == doctest::Approx(9.0 / 400).epsilon(1e-10));

    const auto ladder_grid = solve(build_dual(0.5, cov_objective("1/2"), uniform_grid(4)));
    REQUIRE(ladder_grid.status == LpStatus::Optimal);
    CHECK(ladder_grid.value == doctest::Approx(1.0 / 32).epsilon(1e-10));
}

TEST_CASE("primal duals reproduce the dual optimum: value = gamma + delta")
{
    const auto lp = build_primal(0.25, cov_objective("1/4"), {0.0, 0.4});
    const auto sol = solve(lp);
    REQUIRE(sol.status == LpStatus::Optimal);
    // the two normalization rows are the last two; their multipliers are
    // gamma and delta
    const double gamma = sol.dual[lp.num_rows() - 2];
    const double delta = sol.dual[lp.num_rows() - 1];
    CHECK(gamma + delta == doctest::Approx(sol.value).epsilon(1e-10));
}

TEST_CASE("self-duality on random bounded box LPs")
{
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t m = 10, n = 10;
        LinearProgram primal;
        primal.sense = Sense::Maximize;
        primal.objective.resize(n);
        for (auto& c : primal.objective)
            c = unit(rng);
        primal.rows.assign(m, std::vector<double>(n, 0.0));
        primal.rhs.assign(m, 0.0);
        primal.relations.assign(m, Relation::LessEq);
        std::vector<double> interior(n);
        for (auto& x : interior)
            x = unit(rng);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                primal.rows[i][j] = unit(rng);
            double slackened = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                slackened += primal.rows[i][j] * interior[j];
            primal.rhs[i] = slackened + unit(rng); // interior point stays feasible
        }
        primal.lower.assign(n, 0.0);
        primal.upper.assign(n, std::numeric_limits<double>::infinity());

        // explicit dual: min b.y, A^T y >= c, y >= 0
        LinearProgram dual;
        dual.sense = Sense::Minimize;
        dual.objective = primal.rhs;
        dual.rows.assign(n, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dual.rows[j][i] = primal.rows[i][j];
        dual.rhs = primal.objective;
        dual.relations.assign(n, Relation::GreaterEq);
        dual.lower.assign(m, 0.0);
        dual.upper.assign(m, std::numeric_limits<double>::infinity());

        const auto psol = solve(primal);
        const auto dsol = solve(dual);
        REQUIRE(psol.status == LpStatus::Optimal);
        REQUIRE(dsol.status == LpStatus::Optimal);
        CHECK(std::abs(psol.value - dsol.value) <= 1e-8);
        // and the recovered multipliers of the primal are dual-feasible
        CHECK(psol.complementary_slackness_residual <= 1e-8);
    }
}

TEST_CASE("duality gap vanishes on the reference instances")
{
    CHECK(duality_gap(0.25, cov_objective("1/4"), {0.0, 0.4}) <= 1e-8);
    CHECK(duality_gap(0.5, ObjectiveFn::abs_power(4.0), uniform_grid(10)) <= 1e-8);
    CHECK(duality_gap(1.0 / 3, ObjectiveFn::quadratic_form(Rat(1), Rat(0), Rat(1, 3)),
                      uniform_grid(10)) <= 1e-8);
}

TEST_CASE("weak duality dominates every simplex iterate")
{
    const auto f = cov_objective("1/2");
    const auto grid = uniform_grid(8);
    // the lazy dual point mu = nu = 0, gamma = p max f, delta = (1-p) max f
    double fmax = -1e300;
    for (double x : grid)
        for (double y : grid)
            fmax = std::max(fmax, f(x, y));
    const double lazy_bound = fmax; // p fmax + (1-p) fmax
    SolverOptions options;
    int observed = 0;
    options.iterate_hook = [&](int, double objective) {
        ++observed;
        CHECK(objective <= lazy_bound + 1e-9);
    };
    const auto sol = solve(build_primal(0.5, f, grid), options);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(observed == sol.iterations);
    CHECK(sol.value <= lazy_bound + 1e-9);
}

TEST_CASE("max sense equals negated min of the negated objective")
{
    const auto f = cov_objective("1/2");
    auto lp = build_primal(0.5, f, uniform_grid(4));
    const auto max_sol = solve(lp);
    for (auto& c : lp.objective)
        c = -c;
    lp.sense = Sense::Minimize;
    const auto min_sol = solve(lp);
    REQUIRE(max_sol.status == LpStatus::Optimal);
    REQUIRE(min_sol.status == LpStatus::Optimal);
    CHECK(max_sol.value == doctest::Approx(-min_sol.value).epsilon(1e-12));
}

TEST_CASE("nested grids give nondecreasing optima below the closed form")
{
    const auto f = cov_objective("1/2");
    const double closed = -cov_bound(0.5);
    double previous = -1e300;
    for (int n : {2, 4, 8, 16}) {
        const auto sol = solve(build_primal(0.5, f, uniform_grid(n)));
        REQUIRE(sol.status == LpStatus::Optimal);
        CHECK(sol.value >= previous - 1e-10);
        CHECK(sol.value <= closed + 1e-8);
        previous = sol.value;
    }
}

TEST_CASE("optimal vectors reassemble into coherent tables")
{
    const auto f = ObjectiveFn::abs_power(2.0);
    const auto grid = uniform_grid(6);
    const auto sol = solve(build_primal(0.5, f, grid));
    REQUIRE(sol.status == LpStatus::Optimal);
    const auto table = solution_to_table(0.5, grid, sol.primal);
    CHECK(validate_coherence<double>(table, 1e-8).pass);
    CHECK(mean_x1<double>(table) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("refinement traces stay on the closed form once witness atoms are present")
{
    const auto cov_trace = refine(0.25, cov_objective("1/4"), {2, 3, 5}, {0.4});
    for (const auto& row : cov_trace.rows)
        CHECK(row.value == doctest::Approx(9.0 / 400).epsilon(1e-9));

    const auto abs1_trace = refine(0.5, ObjectiveFn::abs_power(1.0), {2, 4, 8});
    for (const auto& row : abs1_trace.rows)
        CHECK(row.value == doctest::Approx(0.5).epsilon(1e-9));

    const double a4 = abspow_a_opt(4.0);
    const auto abs4_trace = refine(0.5, ObjectiveFn::abs_power(4.0), {8, 12}, {a4, 1.0 - a4});
    CHECK(abs4_trace.best_value == doctest::Approx(0.13798987489692201).epsilon(1e-9));
    CHECK(validate_coherence<double>(abs4_trace.best_table, 1e-8).pass);
}

TEST_CASE("builders reject malformed input")
{
    CHECK_THROWS_AS(build_primal(0.5, cov_objective("1/2"), {}), std::invalid_argument);
    CHECK_THROWS_AS(build_primal(0.5, cov_objective("1/2"), {0.5, 0.25}), std::invalid_argument);
    CHECK_THROWS_AS(build_primal(0.5, cov_objective("1/2"), {0.5, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(build_primal(1.5, cov_objective("1/2"), {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(build_dual(0.5, cov_objective("1/2"), {}), std::invalid_argument);
}

TEST_CASE("LP text export carries labels, relations and bounds")
{
    const auto lp = build_primal(0.5, cov_objective("1/2"), {0.0, 0.5, 1.0});
    const auto text = lp_to_text(lp);
    CHECK(text.find("maximize") != std::string::npos);
    CHECK(text.find("alpha[1][1]") != std::string::npos);
    CHECK(text.find("bayes_x2[0]") != std::string::npos);
    CHECK(text.find("norm_beta") != std::string::npos);
    CHECK(text.find(" = ") != std::string::npos);
}

TEST_CASE("random coherence instances solve with tight duality gaps")
{
    std::mt19937 rng(123);
    for (int trial = 0; trial < 8; ++trial) {
        const auto inst = coherent::testing::random_instance(rng, 5);
        CHECK(duality_gap(inst.p, inst.f, inst.grid) <= 1e-8);
    }
}
