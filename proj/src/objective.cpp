#include "coherent/objective.hpp"

#include <algorithm>

namespace coherent {

ObjectiveFn ObjectiveFn::quadratic_form(Rat alpha, Rat beta, Rat prior)
{
    ObjectiveFn f;
    f.kind_ = Kind::QuadraticForm;
    f.symmetric_ = true;
    f.alpha_ = std::move(alpha);
    f.beta_ = std::move(beta);
    f.prior_ = std::move(prior);
    return f;
}

ObjectiveFn ObjectiveFn::neg_centered_product(Rat prior)
{
    ObjectiveFn f;
    f.kind_ = Kind::NegCenteredProduct;
    f.symmetric_ = true;
    f.prior_ = std::move(prior);
    return f;
}

ObjectiveFn ObjectiveFn::abs_power(double exponent)
{
    if (!(exponent > 0.0))
        throw std::invalid_argument("abs_power exponent must be positive");
    ObjectiveFn f;
    f.kind_ = Kind::AbsPower;
    f.symmetric_ = true;
    f.exponent_ = exponent;
    return f;
}

ObjectiveFn ObjectiveFn::tabulated(std::vector<double> grid, std::vector<double> values,
                                   bool symmetric)
{
    const std::size_t n = grid.size();
    if (n < 2 || values.size() != n * n)
        throw std::invalid_argument("tabulated objective: need n >= 2 and n*n values");
    if (!std::is_sorted(grid.begin(), grid.end()) || grid.front() != 0.0 || grid.back() != 1.0)
        throw std::invalid_argument("tabulated objective: grid must be sorted and span [0,1]");
    ObjectiveFn f;
    f.kind_ = Kind::Tabulated;
    f.symmetric_ = symmetric;
    f.grid_ = std::move(grid);
    f.values_ = std::move(values);
    return f;
}

bool ObjectiveFn::exact_capable() const
{
    switch (kind_) {
    case Kind::QuadraticForm:
    case Kind::NegCenteredProduct:
        return true;
    case Kind::AbsPower:
        return exponent_ == std::floor(exponent_) && exponent_ > 0;
    case Kind::Tabulated:
        return false;
    }
    return false;
}

double ObjectiveFn::operator()(double x, double y) const
{
    switch (kind_) {
    case Kind::QuadraticForm: {
        const double p = to_double(prior_);
        const double d = x - y;
        const double s = x + y - 2.0 * p;
        return to_double(alpha_) * d * d + to_double(beta_) * s * s;
    }
    case Kind::NegCenteredProduct: {
        const double p = to_double(prior_);
        return -(x - p) * (y - p);
    }
    case Kind::AbsPower:
        return std::pow(std::abs(x - y), exponent_);
    case Kind::Tabulated: {
        const auto& g = grid_;
        const std::size_t n = g.size();
        auto cell = [&](double t) {
            auto it = std::upper_bound(g.begin(), g.end(), t);
            std::size_t hi = std::clamp<std::size_t>(std::size_t(it - g.begin()), 1, n - 1);
            return hi - 1;
        };
        const std::size_t i = cell(x), j = cell(y);
        const double tx = (x - g[i]) / (g[i + 1] - g[i]);
        const double ty = (y - g[j]) / (g[j + 1] - g[j]);
        const double v00 = values_[i * n + j], v01 = values_[i * n + j + 1];
        const double v10 = values_[(i + 1) * n + j], v11 = values_[(i + 1) * n + j + 1];
        return (1 - tx) * ((1 - ty) * v00 + ty * v01) + tx * ((1 - ty) * v10 + ty * v11);
    }
    }
    return 0.0;
}

Rat ObjectiveFn::exact(const Rat& x, const Rat& y) const
{
    switch (kind_) {
    case Kind::QuadraticForm: {
        const Rat d = x - y;
        const Rat s = x + y - 2 * prior_;
        return alpha_ * d * d + beta_ * s * s;
    }
    case Kind::NegCenteredProduct:
        return -(x - prior_) * (y - prior_);
    case Kind::AbsPower: {
        if (!exact_capable())
            throw std::domain_error("abs_power: exact evaluation needs an integer exponent");
        const Rat d = x >= y ? Rat(x - y) : Rat(y - x);
        return rat_pow(d, static_cast<unsigned>(exponent_));
    }
    case Kind::Tabulated:
        throw std::domain_error("tabulated objective has no exact evaluation");
    }
    return Rat(0);
}

} // namespace coherent
