#pragma once

#include "coherent/rational.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace coherent {

/// Objective f(x1, x2) on the unit square. The quadratic-form and
/// centered-product kinds evaluate exactly over rationals; |x1-x2|^a does
/// so only for integer exponents. Tabulated objectives interpolate
/// bilinearly between their grid nodes, which keeps them total on [0,1]^2.
class ObjectiveFn {
public:
    enum class Kind { QuadraticForm, NegCenteredProduct, AbsPower, Tabulated };

    /// alpha*(x-y)^2 + beta*(x+y-2p)^2
    static ObjectiveFn quadratic_form(Rat alpha, Rat beta, Rat prior);
    /// -(x-p)(y-p); maximizing it minimizes the covariance.
    static ObjectiveFn neg_centered_product(Rat prior);
    /// |x-y|^exponent, exponent > 0
    static ObjectiveFn abs_power(double exponent);
    /// values[i*n+j] = f(grid[i], grid[j]); grid strictly increasing, spanning [0,1]
    static ObjectiveFn tabulated(std::vector<double> grid, std::vector<double> values,
                                 bool symmetric);

    Kind kind() const { return kind_; }
    bool symmetric() const { return symmetric_; }
    bool exact_capable() const;

    double operator()(double x, double y) const;
    Rat exact(const Rat& x, const Rat& y) const;

    template <class T>
    T eval(const T& x, const T& y) const
    {
        if constexpr (std::is_same_v<T, Rat>)
            return exact(x, y);
        else
            return (*this)(x, y);
    }

    const Rat& form_alpha() const { return alpha_; }
    const Rat& form_beta() const { return beta_; }
    const Rat& prior() const { return prior_; }
    double exponent() const { return exponent_; }

private:
    ObjectiveFn() = default;

    Kind kind_ = Kind::QuadraticForm;
    bool symmetric_ = true;
    Rat alpha_, beta_, prior_;
    double exponent_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> values_;
};

} // namespace coherent
