#include "coherent/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <cstdio>
#include <cstdlib>

namespace coherent {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Internal standard form min c.x, A x = b, x >= 0, plus bookkeeping to map
// solutions and duals back to the caller's program.
struct Standardized {
    std::size_t num_rows = 0;
    std::size_t num_cols = 0; // structural + slack columns, artificials excluded
    std::vector<std::vector<double>> matrix;
    std::vector<double> rhs;
    std::vector<double> cost;
    double cost_constant = 0.0;
    bool negate_value = false;

    std::vector<double> row_sign;         // original dual = row_sign * internal dual
    std::size_t num_original_rows = 0;

    // original column -> internal representation
    struct ColumnMap {
        std::size_t plus = 0;
        std::size_t minus = std::size_t(-1); // set when the variable is split
        double shift = 0.0;
    };
    std::vector<ColumnMap> columns;
    std::vector<std::size_t> hint_columns;
};

Standardized standardize(const LinearProgram& lp)
{
    Standardized s;
    const std::size_t n = lp.num_columns();
    const std::size_t m0 = lp.num_rows();
    s.num_original_rows = m0;
    s.negate_value = lp.sense == Sense::Maximize;

    // finite upper bounds become internal rows
    std::vector<std::size_t> bound_cols;
    for (std::size_t j = 0; j < n; ++j)
        if (lp.upper[j] < kInf)
            bound_cols.push_back(j);
    const std::size_t m = m0 + bound_cols.size();

    std::vector<std::vector<double>> rows(m, std::vector<double>(n, 0.0));
    std::vector<double> rhs(m, 0.0);
    std::vector<Relation> rel(m, Relation::LessEq);
    for (std::size_t i = 0; i < m0; ++i) {
        rows[i] = lp.rows[i];
        rhs[i] = lp.rhs[i];
        rel[i] = lp.relations[i];
    }
    for (std::size_t b = 0; b < bound_cols.size(); ++b) {
        rows[m0 + b][bound_cols[b]] = 1.0;
        rhs[m0 + b] = lp.upper[bound_cols[b]];
        rel[m0 + b] = Relation::LessEq;
    }

    // column transforms
    s.columns.resize(n);
    std::size_t col = 0;
    std::vector<double> sign_flip; // objective sign per internal column
    for (std::size_t j = 0; j < n; ++j) {
        if (lp.lower[j] == -kInf) {
            s.columns[j].plus = col++;
            s.columns[j].minus = col++;
        } else {
            s.columns[j].plus = col++;
            s.columns[j].shift = lp.lower[j];
        }
    }
    const std::size_t structural = col;

    std::size_t num_slacks = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (rel[i] != Relation::Equal)
            ++num_slacks;
    s.num_cols = structural + num_slacks;
    s.num_rows = m;
    s.matrix.assign(m, std::vector<double>(s.num_cols, 0.0));
    s.rhs.assign(m, 0.0);
    s.cost.assign(s.num_cols, 0.0);
    s.row_sign.assign(m, 1.0);

    const double sense = s.negate_value ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        const auto& cm = s.columns[j];
        s.cost[cm.plus] = sense * lp.objective[j];
        if (cm.minus != std::size_t(-1))
            s.cost[cm.minus] = -sense * lp.objective[j];
        s.cost_constant += sense * lp.objective[j] * cm.shift;
    }

    for (std::size_t i = 0; i < m; ++i) {
        double b = rhs[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double a = rows[i][j];
            if (a == 0.0)
                continue;
            const auto& cm = s.columns[j];
            s.matrix[i][cm.plus] = a;
            if (cm.minus != std::size_t(-1))
                s.matrix[i][cm.minus] = -a;
            b -= a * cm.shift;
        }
        s.rhs[i] = b;
    }

    std::size_t slack = structural;
    for (std::size_t i = 0; i < m; ++i) {
        if (rel[i] == Relation::LessEq)
            s.matrix[i][slack++] = 1.0;
        else if (rel[i] == Relation::GreaterEq)
            s.matrix[i][slack++] = -1.0;
    }

    for (std::size_t i = 0; i < m; ++i) {
        if (s.rhs[i] < 0.0) {
            s.rhs[i] = -s.rhs[i];
            for (auto& a : s.matrix[i])
                a = -a;
            s.row_sign[i] = -1.0;
        }
    }

    for (std::size_t j : lp.basis_hint)
        if (j < n)
            s.hint_columns.push_back(s.columns[j].plus);
    return s;
}

// Dense two-phase tableau. Column layout: internal columns, then one
// artificial per row, then the rhs. Row layout: m constraint rows, then
// the phase-two reduced-cost row, then the phase-one row.
class Tableau {
public:
    Tableau(const Standardized& s, const SolverOptions& opt)
        : m_(s.num_rows)
        , n_(s.num_cols)
        , width_(s.num_cols + s.num_rows + 1)
        , opt_(opt)
        , rows_(s.num_rows + 2, std::vector<double>(s.num_cols + s.num_rows + 1, 0.0))
        , basis_(s.num_rows)
        , active_(s.num_rows, true)
    {
        for (std::size_t i = 0; i < m_; ++i) {
            std::copy(s.matrix[i].begin(), s.matrix[i].end(), rows_[i].begin());
            rows_[i][n_ + i] = 1.0;
            rows_[i][width_ - 1] = s.rhs[i];
            basis_[i] = n_ + i;
        }
        auto& cost2 = rows_[m_];
        for (std::size_t j = 0; j < n_; ++j)
            cost2[j] = s.cost[j];
        auto& cost1 = rows_[m_ + 1];
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t j = 0; j < width_; ++j)
                cost1[j] -= rows_[i][j]; // price out the artificial basis
    }

    bool is_artificial(std::size_t col) const { return col >= n_ && col < n_ + m_; }

    void pivot(std::size_t r, std::size_t s)
    {
        auto& prow = rows_[r];
        const double inv = 1.0 / prow[s];
        for (auto& v : prow)
            v *= inv;
        prow[s] = 1.0;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i == r)
                continue;
            auto& row = rows_[i];
            const double factor = row[s];
            if (factor == 0.0)
                continue;
            for (std::size_t j = 0; j < width_; ++j)
                row[j] -= factor * prow[j];
            row[s] = 0.0;
        }
        basis_[r] = s;
        // Degenerate arithmetic must stay exact for Bland's rule to bite:
        // right-hand sides that are zero up to roundoff are snapped to an
        // exact 0.0, so degenerate pivots take an exactly zero step and
        // never smear roundoff across the column.
        for (std::size_t i = 0; i < m_; ++i) {
            double& rhs = rows_[i][width_ - 1];
            if (std::abs(rhs) < 1e-11)
                rhs = 0.0;
        }
    }

    // Bland ratio test. Ratios inside the degeneracy band collapse to an
    // exact zero so the anti-cycling tie-break (smallest basis index)
    // engages on degenerate clusters instead of chasing roundoff; the
    // resulting pivot steps are at most 1e-9, inside the feasibility
    // budget. Elements below a sane magnitude are avoided unless nothing
    // else is available, which keeps pivot growth bounded.
    std::size_t ratio_test(std::size_t entering) const
    {
        // True minimum ratio over every eligible active row -- skipping an
        // eligible row would break primal feasibility. Degenerate rows
        // carry an exact zero rhs (see pivot), so their ties are exact and
        // Bland's smallest-basis-index order applies verbatim.
        std::size_t leaving = m_;
        double best_ratio = kInf;
        for (std::size_t i = 0; i < m_; ++i) {
            if (!active_[i])
                continue;
            const double a = rows_[i][entering];
            if (a <= opt_.pivot_tol)
                continue;
            const double rhs = std::max(rows_[i][width_ - 1], 0.0);
            const double ratio = rhs / a;
            if (leaving == m_ || ratio < best_ratio
                || (ratio == best_ratio && basis_[i] < basis_[leaving])) {
                best_ratio = ratio;
                leaving = i;
            }
        }
        return leaving;
    }

    // Bland: entering = lowest-index eligible column with a negative
    // reduced cost.
    enum class StepResult { Optimal, Unbounded, Pivoted };

    StepResult step(std::size_t cost_row, bool allow_artificial_entering)
    {
        const auto& cost = rows_[cost_row];
        std::size_t entering = width_;
        for (std::size_t j = 0; j < n_ + m_; ++j) {
            if (!allow_artificial_entering && is_artificial(j))
                continue;
            if (cost[j] < -opt_.pivot_tol) {
                entering = j;
                break;
            }
        }
        if (entering == width_)
            return StepResult::Optimal;
        const std::size_t leaving = ratio_test(entering);
        if (leaving == m_)
            return StepResult::Unbounded;
        if (const char* trace = std::getenv("LP_TRACE"); trace && trace_counter_ >= std::atol(trace))
            std::fprintf(stderr, "it %ld cost_row %zu enter %zu leave %zu (basis %zu) elem %.3e rhs %.3e rc %.3e obj %.12g\n",
                         trace_counter_, cost_row, entering, leaving, basis_[leaving],
                         rows_[leaving][entering], rows_[leaving][width_ - 1],
                         rows_[cost_row][entering], -rows_[m_][width_ - 1]);
        ++trace_counter_;
        pivot(leaving, entering);
        return StepResult::Pivoted;
    }

    void seed_basis(const std::vector<std::size_t>& hint_columns)
    {
        for (std::size_t j : hint_columns) {
            if (j >= n_)
                continue;
            const std::size_t leaving = ratio_test(j);
            // only worthwhile when it evicts an artificial on a sane pivot
            if (leaving != m_ && is_artificial(basis_[leaving])
                && std::abs(rows_[leaving][j]) >= 1e-7)
                pivot(leaving, j);
        }
    }

    double phase1_objective() const { return -rows_[m_ + 1][width_ - 1]; }
    double phase2_objective() const { return -rows_[m_][width_ - 1]; }

    // After phase one no artificial may stay basic: each one is pivoted
    // out on the largest available element, and a row offering none of
    // sane size is numerically redundant (the constraint is implied by
    // the others to within tolerance) and is deleted. Phase two then runs
    // on nonsingular bases free of artificials, which is what Bland's
    // termination argument needs.
    void drive_out_artificials()
    {
        for (std::size_t i = 0; i < m_; ++i) {
            if (!active_[i] || !is_artificial(basis_[i]))
                continue;
            std::size_t best = width_;
            double best_mag = 1e-7;
            for (std::size_t j = 0; j < n_; ++j) {
                const double mag = std::abs(rows_[i][j]);
                if (mag > best_mag) {
                    best_mag = mag;
                    best = j;
                }
            }
            if (best != width_)
                pivot(i, best);
            else
                active_[i] = false;
        }
    }

    bool row_active(std::size_t i) const { return active_[i]; }

    std::vector<double> basic_solution() const
    {
        std::vector<double> x(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (active_[i] && basis_[i] < n_)
                x[basis_[i]] = rows_[i][width_ - 1];
        return x;
    }

    // y_i = -reduced cost of the i-th artificial (its phase-two cost is 0)
    std::vector<double> duals() const
    {
        std::vector<double> y(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            y[i] = active_[i] ? -rows_[m_][n_ + i] : 0.0;
        return y;
    }

    std::size_t rows() const { return m_; }

private:
    std::size_t m_, n_, width_;
    const SolverOptions& opt_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::size_t> basis_;
    std::vector<bool> active_;
    mutable long trace_counter_ = 0;
};

} // namespace

void LinearProgram::validate() const
{
    const std::size_t n = num_columns();
    const std::size_t m = num_rows();
    if (rhs.size() != m || relations.size() != m)
        throw std::invalid_argument("LinearProgram: row metadata sizes disagree");
    for (const auto& row : rows)
        if (row.size() != n)
            throw std::invalid_argument("LinearProgram: row width disagrees with objective");
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("LinearProgram: bound sizes disagree");
    if (!column_labels.empty() && column_labels.size() != n)
        throw std::invalid_argument("LinearProgram: column label count disagrees");
    if (!row_labels.empty() && row_labels.size() != m)
        throw std::invalid_argument("LinearProgram: row label count disagrees");
    for (std::size_t j = 0; j < n; ++j)
        if (lower[j] > upper[j])
            throw std::invalid_argument("LinearProgram: empty variable bound interval");
}

const char* lp_status_name(LpStatus status)
{
    switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

LpSolution solve(const LinearProgram& lp, const SolverOptions& options)
{
    lp.validate();
    Standardized s = standardize(lp);
    Tableau tab(s, options);
    LpSolution sol;

    const long iteration_cap = 200000 + 200 * long(s.num_rows + s.num_cols);
    long iterations = 0;

    tab.seed_basis(s.hint_columns);

    // phase one
    while (tab.phase1_objective() > options.feasibility_tol * 0.5) {
        const auto result = tab.step(tab.rows() + 1, false);
        if (result == Tableau::StepResult::Optimal)
            break;
        if (result == Tableau::StepResult::Unbounded)
            throw SolverError("phase one became unbounded; the program is malformed");
        if (++iterations > iteration_cap)
            throw SolverError("simplex iteration cap exceeded in phase one");
    }
    if (tab.phase1_objective() > options.feasibility_tol) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = int(iterations);
        return sol;
    }
    tab.drive_out_artificials();

    // phase two
    const double sense = s.negate_value ? -1.0 : 1.0;
    while (true) {
        const auto result = tab.step(tab.rows(), false);
        if (result == Tableau::StepResult::Optimal)
            break;
        if (result == Tableau::StepResult::Unbounded) {
            sol.status = LpStatus::Unbounded;
            sol.iterations = int(iterations);
            return sol;
        }
        ++iterations;
        if (options.iterate_hook)
            options.iterate_hook(int(iterations),
                                 sense * (tab.phase2_objective() + s.cost_constant));
        if (iterations > iteration_cap)
            throw SolverError("simplex iteration cap exceeded in phase two");
    }

    const auto internal = tab.basic_solution();
    const auto internal_dual = tab.duals();

    sol.status = LpStatus::Optimal;
    sol.iterations = int(iterations);
    sol.primal.resize(lp.num_columns());
    for (std::size_t j = 0; j < lp.num_columns(); ++j) {
        const auto& cm = s.columns[j];
        double v = internal[cm.plus] + cm.shift;
        if (cm.minus != std::size_t(-1))
            v -= internal[cm.minus];
        sol.primal[j] = v;
    }
    sol.dual.resize(s.num_original_rows);
    for (std::size_t i = 0; i < s.num_original_rows; ++i)
        sol.dual[i] = sense * s.row_sign[i] * internal_dual[i];

    double value = 0.0;
    for (std::size_t j = 0; j < lp.num_columns(); ++j)
        value += lp.objective[j] * sol.primal[j];
    sol.value = value;

    // residuals in the caller's space
    double feas = 0.0;
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        double ax = 0.0;
        for (std::size_t j = 0; j < lp.num_columns(); ++j)
            ax += lp.rows[i][j] * sol.primal[j];
        const double r = ax - lp.rhs[i];
        switch (lp.relations[i]) {
        case Relation::Equal: feas = std::max(feas, std::abs(r)); break;
        case Relation::LessEq: feas = std::max(feas, r); break;
        case Relation::GreaterEq: feas = std::max(feas, -r); break;
        }
    }
    for (std::size_t j = 0; j < lp.num_columns(); ++j) {
        feas = std::max(feas, lp.lower[j] - sol.primal[j]);
        feas = std::max(feas, sol.primal[j] - lp.upper[j]);
    }
    sol.feasibility_residual = feas;

    double slackness = 0.0;
    for (std::size_t j = 0; j < lp.num_columns(); ++j) {
        double reduced = lp.objective[j];
        for (std::size_t i = 0; i < lp.num_rows(); ++i)
            reduced -= sol.dual[i] * lp.rows[i][j];
        const double at_lower = lp.lower[j] == -kInf ? 1.0 : sol.primal[j] - lp.lower[j];
        slackness = std::max(slackness, std::abs(at_lower * reduced));
    }
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        if (lp.relations[i] == Relation::Equal)
            continue;
        double ax = 0.0;
        for (std::size_t j = 0; j < lp.num_columns(); ++j)
            ax += lp.rows[i][j] * sol.primal[j];
        slackness = std::max(slackness, std::abs(sol.dual[i] * (ax - lp.rhs[i])));
    }
    sol.complementary_slackness_residual = slackness;
    return sol;
}

std::string lp_to_text(const LinearProgram& lp)
{
    lp.validate();
    std::ostringstream out;
    out << (lp.sense == Sense::Maximize ? "maximize" : "minimize") << "\n";
    auto col_name = [&](std::size_t j) {
        return lp.column_labels.empty() ? "x" + std::to_string(j) : lp.column_labels[j];
    };
    out << "obj:";
    for (std::size_t j = 0; j < lp.num_columns(); ++j)
        if (lp.objective[j] != 0.0)
            out << ' ' << lp.objective[j] << '*' << col_name(j);
    out << "\n";
    for (std::size_t i = 0; i < lp.num_rows(); ++i) {
        out << (lp.row_labels.empty() ? "r" + std::to_string(i) : lp.row_labels[i]) << ':';
        for (std::size_t j = 0; j < lp.num_columns(); ++j)
            if (lp.rows[i][j] != 0.0)
                out << ' ' << lp.rows[i][j] << '*' << col_name(j);
        switch (lp.relations[i]) {
        case Relation::LessEq: out << " <= "; break;
        case Relation::Equal: out << " = "; break;
        case Relation::GreaterEq: out << " >= "; break;
        }
        out << lp.rhs[i] << "\n";
    }
    for (std::size_t j = 0; j < lp.num_columns(); ++j)
        if (lp.lower[j] != 0.0 || lp.upper[j] != kInf) {
            out << "bound: " << lp.lower[j] << " <= " << col_name(j);
            if (lp.upper[j] != kInf)
                out << " <= " << lp.upper[j];
            out << "\n";
        }
    return out.str();
}

LinearProgram build_primal(double p, const ObjectiveFn& f, const std::vector<double>& grid)
{
    if (grid.empty())
        throw std::invalid_argument("build_primal: empty grid");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw std::invalid_argument("build_primal: grid must be sorted");
    for (double a : grid)
        if (!(a >= 0.0 && a <= 1.0))
            throw std::invalid_argument("build_primal: grid values must lie in [0,1]");
    if (std::adjacent_find(grid.begin(), grid.end()) != grid.end())
        throw std::invalid_argument("build_primal: grid values must be distinct");
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("build_primal: prior must lie in (0,1)");

    const std::size_t n = grid.size();
    const std::size_t nsq = n * n;
    LinearProgram lp;
    lp.sense = Sense::Maximize;
    lp.objective.resize(2 * nsq);
    lp.column_labels.resize(2 * nsq);
    lp.lower.assign(2 * nsq, 0.0);
    lp.upper.assign(2 * nsq, kInf);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double fij = f(grid[i], grid[j]);
            lp.objective[i * n + j] = p * fij;
            lp.objective[nsq + i * n + j] = (1.0 - p) * fij;
            lp.column_labels[i * n + j] =
                "alpha[" + std::to_string(i) + "][" + std::to_string(j) + "]";
            lp.column_labels[nsq + i * n + j] =
                "beta[" + std::to_string(i) + "][" + std::to_string(j) + "]";
        }

    auto add_row = [&](std::vector<double> row, Relation rel, double rhs, std::string label) {
        lp.rows.push_back(std::move(row));
        lp.relations.push_back(rel);
        lp.rhs.push_back(rhs);
        lp.row_labels.push_back(std::move(label));
    };

    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(2 * nsq, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            row[i * n + j] = (1.0 - grid[i]) * p;
            row[nsq + i * n + j] = -grid[i] * (1.0 - p);
        }
        add_row(std::move(row), Relation::Equal, 0.0, "bayes_x1[" + std::to_string(i) + "]");
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> row(2 * nsq, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            row[i * n + j] = (1.0 - grid[j]) * p;
            row[nsq + i * n + j] = -grid[j] * (1.0 - p);
        }
        add_row(std::move(row), Relation::Equal, 0.0, "bayes_x2[" + std::to_string(j) + "]");
    }
    {
        std::vector<double> row(2 * nsq, 0.0);
        std::fill(row.begin(), row.begin() + nsq, 1.0);
        add_row(std::move(row), Relation::Equal, 1.0, "norm_alpha");
    }
    {
        std::vector<double> row(2 * nsq, 0.0);
        std::fill(row.begin() + nsq, row.end(), 1.0);
        add_row(std::move(row), Relation::Equal, 1.0, "norm_beta");
    }

    // the constant expert alpha_kk = beta_kk = 1 is feasible when p is on
    // the grid; seed the basis there
    for (std::size_t k = 0; k < n; ++k)
        if (grid[k] == p) {
            lp.basis_hint = {k * n + k, nsq + k * n + k};
            break;
        }
    return lp;
}

LinearProgram build_dual(double p, const ObjectiveFn& f, const std::vector<double>& grid)
{
    if (grid.empty())
        throw std::invalid_argument("build_dual: empty grid");
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("build_dual: prior must lie in (0,1)");
    const std::size_t n = grid.size();
    LinearProgram lp;
    lp.sense = Sense::Minimize;
    const std::size_t cols = 2 * n + 2;
    lp.objective.assign(cols, 0.0);
    lp.objective[2 * n] = 1.0;     // gamma
    lp.objective[2 * n + 1] = 1.0; // delta
    lp.lower.assign(cols, -kInf);
    lp.upper.assign(cols, kInf);
    lp.column_labels.resize(cols);
    for (std::size_t i = 0; i < n; ++i) {
        lp.column_labels[i] = "mu[" + std::to_string(i) + "]";
        lp.column_labels[n + i] = "nu[" + std::to_string(i) + "]";
    }
    lp.column_labels[2 * n] = "gamma";
    lp.column_labels[2 * n + 1] = "delta";

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double fij = f(grid[i], grid[j]);
            std::vector<double> row(cols, 0.0);
            row[i] = (1.0 - grid[i]) * p;
            row[n + j] += (1.0 - grid[j]) * p;
            row[2 * n] = 1.0;
            lp.rows.push_back(std::move(row));
            lp.relations.push_back(Relation::GreaterEq);
            lp.rhs.push_back(p * fij);
            lp.row_labels.push_back("cover_alpha[" + std::to_string(i) + "][" + std::to_string(j) + "]");

            std::vector<double> row0(cols, 0.0);
            row0[i] = -grid[i] * (1.0 - p);
            row0[n + j] += -grid[j] * (1.0 - p);
            row0[2 * n + 1] = 1.0;
            lp.rows.push_back(std::move(row0));
            lp.relations.push_back(Relation::GreaterEq);
            lp.rhs.push_back((1.0 - p) * fij);
            lp.row_labels.push_back("cover_beta[" + std::to_string(i) + "][" + std::to_string(j) + "]");
        }
    return lp;
}

double duality_gap(double p, const ObjectiveFn& f, const std::vector<double>& grid,
                   const SolverOptions& options)
{
    const auto primal = solve(build_primal(p, f, grid), options);
    if (primal.status != LpStatus::Optimal)
        throw SolverError(std::string("primal not optimal: ") + lp_status_name(primal.status));
    const auto dual = solve(build_dual(p, f, grid), options);
    if (dual.status != LpStatus::Optimal)
        throw SolverError(std::string("dual not optimal: ") + lp_status_name(dual.status));
    return std::abs(primal.value - dual.value);
}

JointAtomTable<double> solution_to_table(double p, const std::vector<double>& grid,
                                         const std::vector<double>& primal)
{
    const std::size_t n = grid.size();
    if (primal.size() != 2 * n * n)
        throw std::invalid_argument("solution_to_table: vector is not a primal point");
    JointAtomTable<double> t;
    t.prior = p;
    t.atoms = grid;
    t.alpha.assign(n, std::vector<double>(n, 0.0));
    t.beta.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            t.alpha[i][j] = primal[i * n + j];
            t.beta[i][j] = primal[n * n + i * n + j];
        }
    return t;
}

std::vector<double> uniform_grid(int n)
{
    if (n < 1)
        throw std::invalid_argument("uniform_grid: n must be positive");
    std::vector<double> g(std::size_t(n) + 1);
    for (int k = 0; k <= n; ++k)
        g[std::size_t(k)] = double(k) / double(n);
    return g;
}

std::vector<double> merge_grid(std::vector<double> grid, const std::vector<double>& extra)
{
    grid.insert(grid.end(), extra.begin(), extra.end());
    std::sort(grid.begin(), grid.end());
    std::vector<double> out;
    for (double v : grid)
        if (out.empty() || v - out.back() > 1e-12)
            out.push_back(v);
    return out;
}

RefineResult refine(double p, const ObjectiveFn& f, const std::vector<int>& grid_sizes,
                    const std::vector<double>& extra_atoms, const SolverOptions& options)
{
    if (grid_sizes.empty())
        throw std::invalid_argument("refine: no grid sizes");
    RefineResult result;
    result.best_value = -kInf;
    for (int n : grid_sizes) {
        auto grid = merge_grid(uniform_grid(n), extra_atoms);
        const auto sol = solve(build_primal(p, f, grid), options);
        if (sol.status != LpStatus::Optimal)
            throw SolverError(std::string("refine: ") + lp_status_name(sol.status));
        result.rows.push_back({n, grid.size(), sol.value});
        if (sol.value > result.best_value) {
            result.best_value = sol.value;
            result.best_grid = grid;
            result.best_table = solution_to_table(p, grid, sol.primal);
        }
    }
    return result;
}

} // namespace coherent
