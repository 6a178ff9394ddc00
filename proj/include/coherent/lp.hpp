#pragma once

#include "coherent/objective.hpp"
#include "coherent/table.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace coherent {

enum class Relation { LessEq, Equal, GreaterEq };
enum class Sense { Minimize, Maximize };

/// Dense LP in row form. Column labels tie variables back to their meaning
/// ("alpha[i][j]", "mu[i]", ...); row labels likewise.
struct LinearProgram {
    Sense sense = Sense::Minimize;
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<Relation> relations;
    std::vector<double> lower; // -inf means free
    std::vector<double> upper; // +inf means unbounded above
    std::vector<std::string> column_labels;
    std::vector<std::string> row_labels;
    std::vector<std::size_t> basis_hint; // columns worth pivoting in before phase one

    std::size_t num_columns() const { return objective.size(); }
    std::size_t num_rows() const { return rows.size(); }
    void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* lp_status_name(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    double value = 0.0;
    std::vector<double> primal;
    /// Row multipliers for the program as stated: at optimality
    /// value = dual . rhs (equality rows contribute freely).
    std::vector<double> dual;
    int iterations = 0;
    double feasibility_residual = 0.0;
    double complementary_slackness_residual = 0.0;
};

struct SolverOptions {
    double pivot_tol = 1e-11;
    double feasibility_tol = 1e-9;
    /// Called after each phase-two pivot with the objective of the current
    /// basic solution, in the sense of the original program.
    std::function<void(int iteration, double objective)> iterate_hook;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two-phase dense tableau simplex with Bland's rule (always on). Free
/// variables are split, finite lower bounds shifted, finite upper bounds
/// turned into internal rows. Duals are read off the artificial columns of
/// the final tableau.
LpSolution solve(const LinearProgram& lp, const SolverOptions& options = {});

/// Plain-text dump (objective, then one labelled row per line) for
/// debugging against external solvers.
std::string lp_to_text(const LinearProgram& lp);

/// Discretized primal: maximize sum f(a_i,a_j)(p alpha_ij + (1-p) beta_ij)
/// over nonnegative alpha, beta with the 2n Bayes rows and both
/// normalizations. 2n^2 columns, 2n+2 equality rows.
LinearProgram build_primal(double p, const ObjectiveFn& f, const std::vector<double>& grid);

/// Its dual: minimize gamma + delta over free (mu, nu, gamma, delta)
/// subject to the 2n^2 covering inequalities.
LinearProgram build_dual(double p, const ObjectiveFn& f, const std::vector<double>& grid);

/// |primal optimum - dual optimum|, both solved independently.
double duality_gap(double p, const ObjectiveFn& f, const std::vector<double>& grid,
                   const SolverOptions& options = {});

/// Reassembles an optimal primal vector into a table on the same grid.
JointAtomTable<double> solution_to_table(double p, const std::vector<double>& grid,
                                         const std::vector<double>& primal);

/// {k/n : 0 <= k <= n}
std::vector<double> uniform_grid(int n);

/// Sorted union; near-duplicates (within 1e-12) merge.
std::vector<double> merge_grid(std::vector<double> grid, const std::vector<double>& extra);

struct RefineRow {
    int n = 0;
    std::size_t grid_size = 0;
    double value = 0.0;
};

struct RefineResult {
    std::vector<RefineRow> rows;
    double best_value = 0.0;
    std::vector<double> best_grid;
    JointAtomTable<double> best_table;
};

/// Solves the primal on {k/n} (union extra atoms) for each n; optima are
/// nondecreasing whenever the grids are nested. Returns the trace and the
/// best witness. Grid selection is a heuristic, not a guarantee: the
/// supremum over all finite grids is approached, and hit exactly once the
/// witness atoms are on the grid.
RefineResult refine(double p, const ObjectiveFn& f, const std::vector<int>& grid_sizes,
                    const std::vector<double>& extra_atoms = {},
                    const SolverOptions& options = {});

} // namespace coherent
