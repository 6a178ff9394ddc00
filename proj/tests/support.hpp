#pragma once

#include "coherent/lp.hpp"
#include "coherent/table.hpp"

#include <random>
#include <vector>

namespace coherent::testing {

/// X1 = X2 = p, the constant-expert law.
inline JointAtomTable<Rat> constant_expert(const Rat& p)
{
    std::vector<SupportAtom<Rat>> atoms{{p, p, Rat(1), 1}, {p, p, Rat(1), 0}};
    return from_conditionals<Rat>(p, atoms);
}

/// X1 = X2 = X.
inline JointAtomTable<Rat> fully_informed(const Rat& p)
{
    std::vector<SupportAtom<Rat>> atoms{{Rat(1), Rat(1), Rat(1), 1}, {Rat(0), Rat(0), Rat(1), 0}};
    return from_conditionals<Rat>(p, atoms);
}

/// X1 = X, X2 = p.
inline JointAtomTable<Rat> one_informed(const Rat& p)
{
    std::vector<SupportAtom<Rat>> atoms{{Rat(1), p, Rat(1), 1}, {Rat(0), p, Rat(1), 0}};
    return from_conditionals<Rat>(p, atoms);
}

struct RandomInstance {
    double p;
    std::vector<double> grid;
    ObjectiveFn f;
};

/// Random discretization instance: a prior, a grid containing the prior
/// (so the constant expert keeps the LP feasible) and a tabulated
/// objective with values in [-1, 1].
inline RandomInstance random_instance(std::mt19937& rng, int max_extra_atoms)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double p = 0.05 + 0.9 * unit(rng);
    std::uniform_int_distribution<int> extra(0, max_extra_atoms);
    std::vector<double> atoms{0.0, 1.0, p};
    const int count = extra(rng);
    for (int k = 0; k < count; ++k)
        atoms.push_back(unit(rng));
    auto grid = merge_grid(std::move(atoms), {});

    std::vector<double> table_grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> values(table_grid.size() * table_grid.size());
    std::uniform_real_distribution<double> signed_unit(-1.0, 1.0);
    for (auto& v : values)
        v = signed_unit(rng);
    return {p, std::move(grid), ObjectiveFn::tabulated(table_grid, values, false)};
}

/// Coherent table produced by the LP itself: the optimizer of a random
/// objective over the discretized feasible set.
inline JointAtomTable<double> random_coherent_table(std::mt19937& rng, int max_extra_atoms)
{
    const auto inst = random_instance(rng, max_extra_atoms);
    const auto sol = solve(build_primal(inst.p, inst.f, inst.grid));
    if (sol.status != LpStatus::Optimal)
        throw std::logic_error("random coherence instance failed to solve");
    return solution_to_table(inst.p, inst.grid, sol.primal);
}

} // namespace coherent::testing
