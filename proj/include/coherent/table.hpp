#pragma once

#include "coherent/objective.hpp"
#include "coherent/rational.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coherent {

/// Finite joint law of (X, X1, X2) for a Bernoulli X with P(X=1) = prior.
/// alpha[i][j] = P(X1=atoms[i], X2=atoms[j] | X=1), beta likewise for X=0.
/// Immutable by convention once built; all operations below are pure.
template <class T>
struct JointAtomTable {
    T prior;
    std::vector<T> atoms;
    std::vector<std::vector<T>> alpha;
    std::vector<std::vector<T>> beta;

    std::size_t size() const { return atoms.size(); }
};

enum class ConstraintFamily {
    AtomRange,
    AtomOrder,
    Nonnegativity,
    AlphaNormalization,
    BetaNormalization,
    BayesRow,
    BayesColumn,
};

const char* constraint_family_name(ConstraintFamily family);

template <class T>
struct ConstraintViolation {
    ConstraintFamily family;
    std::ptrdiff_t i = -1; // atom/row index, -1 when not applicable
    std::ptrdiff_t j = -1;
    T magnitude{};
};

template <class T>
struct ValidationReport {
    bool pass = true;
    std::vector<ConstraintViolation<T>> violations;

    T worst(ConstraintFamily family) const
    {
        T w{};
        for (const auto& v : violations)
            if (v.family == family && v.magnitude > w)
                w = v.magnitude;
        return w;
    }
};

namespace detail {

template <class T>
void require_table_shape(const JointAtomTable<T>& t)
{
    const std::size_t n = t.atoms.size();
    if (n == 0)
        throw std::invalid_argument("table has no atoms");
    auto square = [n](const std::vector<std::vector<T>>& m) {
        if (m.size() != n)
            return false;
        for (const auto& row : m)
            if (row.size() != n)
                return false;
        return true;
    };
    if (!square(t.alpha) || !square(t.beta))
        throw std::invalid_argument("conditional weight matrices must be n x n");
}

template <class T>
T abs_value(const T& v)
{
    return v < T(0) ? T(-v) : v;
}

} // namespace detail

/// Checks membership constraints for the coherent family: nonnegative
/// conditional weights, both normalizations, and the per-atom Bayes
/// identities in linear form, (1-a_i) p sum_j alpha_ij = a_i (1-p) sum_j beta_ij
/// (and the column counterpart). The linear form is used deliberately so
/// atoms at 0 or 1 and atoms with no mass need no special treatment.
/// tol = 0 over Rat is an exact test. Dimension mismatches throw; they are
/// structural errors, not failed validations.
template <class T>
ValidationReport<T> validate_coherence(const JointAtomTable<T>& t, const T& tol = T(0))
{
    detail::require_table_shape(t);
    if (tol < T(0))
        throw std::invalid_argument("tolerance must be nonnegative");

    ValidationReport<T> report;
    auto flag = [&](ConstraintFamily family, std::ptrdiff_t i, std::ptrdiff_t j, const T& magnitude) {
        if (magnitude > tol) {
            report.pass = false;
            report.violations.push_back({family, i, j, magnitude});
        }
    };

    const std::size_t n = t.size();
    const T one(1);
    for (std::size_t i = 0; i < n; ++i) {
        const T& a = t.atoms[i];
        if (a < T(0))
            flag(ConstraintFamily::AtomRange, std::ptrdiff_t(i), -1, T(-a));
        if (a > one)
            flag(ConstraintFamily::AtomRange, std::ptrdiff_t(i), -1, T(a - one));
        if (i + 1 < n && !(t.atoms[i] < t.atoms[i + 1]))
            flag(ConstraintFamily::AtomOrder, std::ptrdiff_t(i), -1, T(t.atoms[i] - t.atoms[i + 1]));
    }

    T alpha_total(0), beta_total(0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (t.alpha[i][j] < T(0))
                flag(ConstraintFamily::Nonnegativity, std::ptrdiff_t(i), std::ptrdiff_t(j), T(-t.alpha[i][j]));
            if (t.beta[i][j] < T(0))
                flag(ConstraintFamily::Nonnegativity, std::ptrdiff_t(i), std::ptrdiff_t(j), T(-t.beta[i][j]));
            alpha_total += t.alpha[i][j];
            beta_total += t.beta[i][j];
        }
    }
    flag(ConstraintFamily::AlphaNormalization, -1, -1, detail::abs_value(T(alpha_total - one)));
    flag(ConstraintFamily::BetaNormalization, -1, -1, detail::abs_value(T(beta_total - one)));

    const T& p = t.prior;
    for (std::size_t i = 0; i < n; ++i) {
        T row_alpha(0), row_beta(0), col_alpha(0), col_beta(0);
        for (std::size_t j = 0; j < n; ++j) {
            row_alpha += t.alpha[i][j];
            row_beta += t.beta[i][j];
            col_alpha += t.alpha[j][i];
            col_beta += t.beta[j][i];
        }
        const T& a = t.atoms[i];
        T row_residual = (one - a) * p * row_alpha - a * (one - p) * row_beta;
        T col_residual = (one - a) * p * col_alpha - a * (one - p) * col_beta;
        flag(ConstraintFamily::BayesRow, std::ptrdiff_t(i), -1, detail::abs_value(row_residual));
        flag(ConstraintFamily::BayesColumn, -1, std::ptrdiff_t(i), detail::abs_value(col_residual));
    }
    return report;
}

/// E f(X1, X2) = sum f(a_i, a_j) (p alpha_ij + (1-p) beta_ij).
/// Assumes the table validates; exact over Rat when f is.
template <class T>
T expectation(const JointAtomTable<T>& t, const ObjectiveFn& f)
{
    detail::require_table_shape(t);
    const std::size_t n = t.size();
    const T one(1);
    T total(0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const T mass = t.prior * t.alpha[i][j] + (one - t.prior) * t.beta[i][j];
            if (mass == T(0))
                continue;
            total += f.eval(t.atoms[i], t.atoms[j]) * mass;
        }
    }
    return total;
}

/// cov(X1, X2) = E[(X1-p)(X2-p)]; the sign is the covariance itself.
template <class T>
T covariance(const JointAtomTable<T>& t)
{
    detail::require_table_shape(t);
    const std::size_t n = t.size();
    const T one(1);
    const T& p = t.prior;
    T total(0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const T mass = t.prior * t.alpha[i][j] + (one - t.prior) * t.beta[i][j];
            if (mass == T(0))
                continue;
            total += (t.atoms[i] - p) * (t.atoms[j] - p) * mass;
        }
    }
    return total;
}

/// One support atom of the joint law of (X, X1, X2); weight is the
/// conditional weight given X = x_value.
template <class T>
struct SupportAtom {
    T x1;
    T x2;
    T weight;
    int x_value = 1;
};

/// Builds the union grid of all coordinates and fills alpha/beta from the
/// listed atoms. Duplicate (x1, x2, X) entries merge by weight addition.
/// Nothing is normalized and nothing is validated; construction and
/// validation are separate steps.
template <class T>
JointAtomTable<T> from_conditionals(const T& prior, std::span<const SupportAtom<T>> atoms)
{
    if (atoms.empty())
        throw std::invalid_argument("from_conditionals: empty atom list");
    for (const auto& a : atoms) {
        if (a.x1 < T(0) || a.x1 > T(1) || a.x2 < T(0) || a.x2 > T(1))
            throw std::invalid_argument("from_conditionals: coordinate outside [0,1]");
        if (a.weight < T(0))
            throw std::invalid_argument("from_conditionals: negative weight");
        if (a.x_value != 0 && a.x_value != 1)
            throw std::invalid_argument("from_conditionals: X value must be 0 or 1");
    }

    std::vector<T> grid;
    for (const auto& a : atoms) {
        grid.push_back(a.x1);
        grid.push_back(a.x2);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const std::size_t n = grid.size();
    JointAtomTable<T> t;
    t.prior = prior;
    t.atoms = std::move(grid);

    auto index_of = [&t](const T& v) {
        return std::size_t(std::lower_bound(t.atoms.begin(), t.atoms.end(), v) - t.atoms.begin());
    };

    t.alpha.assign(n, std::vector<T>(n, T(0)));
    t.beta.assign(n, std::vector<T>(n, T(0)));
    for (const auto& a : atoms) {
        auto& m = a.x_value == 1 ? t.alpha : t.beta;
        m[index_of(a.x1)][index_of(a.x2)] += a.weight;
    }
    return t;
}

template <class T>
JointAtomTable<T> from_conditionals(const T& prior, const std::vector<SupportAtom<T>>& atoms)
{
    return from_conditionals<T>(prior, std::span<const SupportAtom<T>>(atoms));
}

/// Swap the roles of X1 and X2 (transpose both weight matrices).
template <class T>
JointAtomTable<T> transpose(const JointAtomTable<T>& t)
{
    detail::require_table_shape(t);
    JointAtomTable<T> r = t;
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            r.alpha[i][j] = t.alpha[j][i];
            r.beta[i][j] = t.beta[j][i];
        }
    return r;
}

/// (p, a_i, alpha, beta) -> (1-p, 1-a_i reversed, reversed beta, reversed alpha):
/// the law of (1-X, 1-X1, 1-X2), which is again coherent.
template <class T>
JointAtomTable<T> complement(const JointAtomTable<T>& t)
{
    detail::require_table_shape(t);
    const std::size_t n = t.size();
    JointAtomTable<T> r;
    r.prior = T(1) - t.prior;
    r.atoms.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        r.atoms[i] = T(1) - t.atoms[n - 1 - i];
    r.alpha.assign(n, std::vector<T>(n, T(0)));
    r.beta.assign(n, std::vector<T>(n, T(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            r.alpha[i][j] = t.beta[n - 1 - i][n - 1 - j];
            r.beta[i][j] = t.alpha[n - 1 - i][n - 1 - j];
        }
    return r;
}

/// P(X1 = a_i) for each atom.
template <class T>
std::vector<T> marginal_x1(const JointAtomTable<T>& t)
{
    detail::require_table_shape(t);
    const std::size_t n = t.size();
    std::vector<T> m(n, T(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m[i] += t.prior * t.alpha[i][j] + (T(1) - t.prior) * t.beta[i][j];
    return m;
}

template <class T>
std::vector<T> marginal_x2(const JointAtomTable<T>& t)
{
    return marginal_x1(transpose(t));
}

template <class T>
T mean_x1(const JointAtomTable<T>& t)
{
    auto m = marginal_x1(t);
    T total(0);
    for (std::size_t i = 0; i < t.size(); ++i)
        total += t.atoms[i] * m[i];
    return total;
}

template <class T>
T mean_x2(const JointAtomTable<T>& t)
{
    return mean_x1(transpose(t));
}

inline JointAtomTable<double> to_double_table(const JointAtomTable<Rat>& t)
{
    JointAtomTable<double> r;
    r.prior = to_double(t.prior);
    r.atoms.reserve(t.size());
    for (const auto& a : t.atoms)
        r.atoms.push_back(to_double(a));
    const std::size_t n = t.size();
    r.alpha.assign(n, std::vector<double>(n, 0.0));
    r.beta.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            r.alpha[i][j] = to_double(t.alpha[i][j]);
            r.beta[i][j] = to_double(t.beta[i][j]);
        }
    return r;
}

namespace detail {

inline std::string scalar_text(const Rat& v) { return format_rat(v); }

inline std::string scalar_text(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, end);
}

template <class T>
T scalar_parse(std::string_view s)
{
    if constexpr (std::is_same_v<T, Rat>) {
        return parse_rat(s);
    } else {
        double v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size())
            throw std::invalid_argument("not a number: '" + std::string(s) + "'");
        return v;
    }
}

} // namespace detail

/// Tabular text form: a header line `p=<value>` then one mass-bearing atom
/// per line, `x1 x2 weight x_value`, X=1 block first, (i, j)-ordered.
/// Rationals are written num/den, so the round-trip is bit-exact in
/// rational mode. Atoms carrying no mass in either class are not
/// representable and are dropped on a round-trip.
template <class T>
std::string table_to_text(const JointAtomTable<T>& t)
{
    detail::require_table_shape(t);
    std::ostringstream out;
    out << "p=" << detail::scalar_text(t.prior) << "\n";
    const std::size_t n = t.size();
    for (int x_value : {1, 0}) {
        const auto& m = x_value == 1 ? t.alpha : t.beta;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!(m[i][j] == T(0)))
                    out << detail::scalar_text(t.atoms[i]) << ' ' << detail::scalar_text(t.atoms[j])
                        << ' ' << detail::scalar_text(m[i][j]) << ' ' << x_value << "\n";
    }
    return out.str();
}

template <class T>
JointAtomTable<T> table_from_text(std::string_view text)
{
    std::optional<T> prior;
    std::vector<SupportAtom<T>> atoms;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;

        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.remove_suffix(1);
        while (!line.empty() && line.front() == ' ')
            line.remove_prefix(1);
        if (line.empty() || line.front() == '#')
            continue;
        if (line.substr(0, 2) == "p=") {
            prior = detail::scalar_parse<T>(line.substr(2));
            continue;
        }
        std::array<std::string_view, 4> fields;
        std::size_t count = 0, fpos = 0;
        while (fpos < line.size() && count < 4) {
            while (fpos < line.size() && line[fpos] == ' ')
                ++fpos;
            std::size_t end = fpos;
            while (end < line.size() && line[end] != ' ')
                ++end;
            if (end > fpos)
                fields[count++] = line.substr(fpos, end - fpos);
            fpos = end;
        }
        while (fpos < line.size() && line[fpos] == ' ')
            ++fpos;
        if (count != 4 || fpos != line.size())
            throw std::invalid_argument("table text: expected 'x1 x2 weight x_value': '" + std::string(line) + "'");
        SupportAtom<T> a;
        a.x1 = detail::scalar_parse<T>(fields[0]);
        a.x2 = detail::scalar_parse<T>(fields[1]);
        a.weight = detail::scalar_parse<T>(fields[2]);
        if (fields[3] == "0")
            a.x_value = 0;
        else if (fields[3] == "1")
            a.x_value = 1;
        else
            throw std::invalid_argument("table text: x_value must be 0 or 1");
        atoms.push_back(std::move(a));
    }
    if (!prior)
        throw std::invalid_argument("table text: missing p= header");
    return from_conditionals<T>(*prior, atoms);
}

} // namespace coherent
