#include "coherent/bounds.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace coherent {

namespace {

double sqrt_disc(double alpha)
{
    return std::sqrt(alpha * alpha + 6.0 * alpha + 1.0);
}

// Six-point value 2 (1-a)^alpha a/(1+a) at a = a_opt, written through
// rationalized forms: a_opt = 2/(s+alpha+1) and a/(1+a) = 2/(alpha+3+s)
// avoid the sqrt cancellation, log1p keeps (1-a)^alpha accurate for huge
// alpha where a ~ 1/alpha.
double six_point_value(double alpha)
{
    const double s = sqrt_disc(alpha);
    const double a = 2.0 / (s + alpha + 1.0);
    const double ratio = 2.0 / (alpha + 3.0 + s);
    return 2.0 * ratio * std::exp(alpha * std::log1p(-a));
}

JointAtomTable<Rat> degenerate_table(const Rat& p, const Rat& x1_on1, const Rat& x2_on1,
                                     const Rat& x1_on0, const Rat& x2_on0)
{
    std::vector<SupportAtom<Rat>> atoms{
        {x1_on1, x2_on1, Rat(1), 1},
        {x1_on0, x2_on0, Rat(1), 0},
    };
    return from_conditionals<Rat>(p, atoms);
}

} // namespace

double sphere_max(const SphereInstance& inst)
{
    if (inst.diameter_norm_sq < 0.0)
        throw std::invalid_argument("sphere_max: |w|^2 must be nonnegative");
    const double a = inst.alpha, b = inst.beta;
    if (a == 0.0 && b == 0.0)
        return 0.0;
    if (a >= std::max(0.0, 2.0 * b))
        return inst.diameter_norm_sq * a * a / (a - b);
    return inst.diameter_norm_sq * std::max({0.0, 4.0 * b, a + b});
}

double sphere_max_numeric(const SphereInstance& inst, int resolution)
{
    if (resolution < 8)
        throw std::invalid_argument("sphere_max_numeric: resolution must be at least 8");
    if (inst.diameter_norm_sq < 0.0)
        throw std::invalid_argument("sphere_max_numeric: |w|^2 must be nonnegative");

    // Points on the sphere with diameter w: x_i = w/2 + (|w|/2) u_i with u_i
    // unit. The objective depends on u_1 . u_2 and the polar angles only, so
    // one azimuth can be fixed:
    //   J = |w|^2 [ alpha/2 (1-c) + beta (3/2 + cos t1 + cos t2 + c/2) ],
    //   c = cos t1 cos t2 + sin t1 sin t2 cos dphi.
    const double a = inst.alpha, b = inst.beta, w2 = inst.diameter_norm_sq;
    auto value = [a, b, w2](double t1, double t2, double dphi) {
        const double c = std::cos(t1) * std::cos(t2) + std::sin(t1) * std::sin(t2) * std::cos(dphi);
        return w2 * (0.5 * a * (1.0 - c) + b * (1.5 + std::cos(t1) + std::cos(t2) + 0.5 * c));
    };

    const double pi = std::acos(-1.0);
    const double step = pi / (resolution - 1);
    double best = -std::numeric_limits<double>::infinity();
    double bt1 = 0, bt2 = 0, bphi = 0;
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j)
            for (int k = 0; k < resolution; ++k) {
                const double v = value(i * step, j * step, k * step);
                if (v > best) {
                    best = v;
                    bt1 = i * step;
                    bt2 = j * step;
                    bphi = k * step;
                }
            }

    // shrinking pattern search around the best cell
    double h = step;
    for (int iter = 0; iter < 60; ++iter) {
        for (int di = -1; di <= 1; ++di)
            for (int dj = -1; dj <= 1; ++dj)
                for (int dk = -1; dk <= 1; ++dk) {
                    const double t1 = std::clamp(bt1 + di * h, 0.0, pi);
                    const double t2 = std::clamp(bt2 + dj * h, 0.0, pi);
                    const double dphi = std::clamp(bphi + dk * h, 0.0, pi);
                    const double v = value(t1, t2, dphi);
                    if (v > best) {
                        best = v;
                        bt1 = t1;
                        bt2 = t2;
                        bphi = dphi;
                    }
                }
        h *= 0.7;
    }
    return best;
}

QuadBound quad_bound(const Rat& p, const QuadraticForm& q)
{
    if (!(p > 0 && p < 1))
        throw std::invalid_argument("quad_bound: prior must lie in (0,1)");

    const Rat& alpha = q.alpha;
    const Rat& beta = q.beta;
    const Rat pq = p * (1 - p);

    QuadBound result;
    if (alpha == 0 && beta == 0) {
        result.value = 0;
        result.tight = true;
        result.degenerate_witness = degenerate_table(p, p, p, p, p);
        return result;
    }

    const bool projection_branch = alpha >= 0 && alpha >= 2 * beta;
    if (!projection_branch) {
        const Rat best = std::max({Rat(0), 4 * beta, alpha + beta});
        result.value = best * pq;
        result.tight = true;
        if (best == 0)
            result.degenerate_witness = degenerate_table(p, p, p, p, p); // X1 = X2 = p
        else if (best == 4 * beta)
            result.degenerate_witness = degenerate_table(p, 1, 1, 0, 0); // X1 = X2 = X
        else
            result.degenerate_witness = degenerate_table(p, 1, p, 0, p); // X1 = X, X2 = p
        return result;
    }

    if (alpha == 0) { // then beta <= 0; the projection value collapses to 0
        result.value = 0;
        result.tight = true;
        result.degenerate_witness = degenerate_table(p, p, p, p, p);
        return result;
    }

    result.value = pq * alpha * alpha / (alpha - beta);
    const Rat a = alpha / (alpha - beta);
    result.spec = classify(p, a);
    result.tight = result.spec.has_value();
    if (result.tight) {
        if (a == 2) {
            // boundary alpha = 2 beta: the chain degenerates to X1 = X2 = X
            assert(result.value == 4 * beta * pq);
            result.degenerate_witness = degenerate_table(p, 1, 1, 0, 0);
        } else {
            result.witness = build_ladder(*result.spec);
        }
    }
    return result;
}

Rat cov_bound_exact(const Rat& p)
{
    if (!(p > 0 && p < 1))
        throw std::invalid_argument("cov_bound: prior must lie in (0,1)");
    const Rat pq = p * (1 - p);
    if (p < Rat(1, 3)) {
        const Rat r = pq / (1 + p);
        return -r * r;
    }
    if (p <= Rat(2, 3))
        return -pq / 8;
    const Rat r = pq / (2 - p);
    return -r * r;
}

double cov_bound(double p)
{
    if (!(p > 0 && p < 1))
        throw std::invalid_argument("cov_bound: prior must lie in (0,1)");
    const double pq = p * (1 - p);
    if (p < 1.0 / 3.0) {
        const double r = pq / (1 + p);
        return -r * r;
    }
    if (p <= 2.0 / 3.0)
        return -pq / 8.0;
    const double r = pq / (2 - p);
    return -r * r;
}

JointAtomTable<Rat> cov_witness(const Rat& p)
{
    if (!(p > 0 && p < 1))
        throw std::invalid_argument("cov_witness: prior must lie in (0,1)");
    if (p < Rat(1, 3)) {
        const Rat c = 2 * p / (p + 1);
        std::vector<SupportAtom<Rat>> atoms{
            {c, c, Rat(1), 1},
            {Rat(0), c, Rat(1, 2), 0},
            {c, Rat(0), Rat(1, 2), 0},
        };
        return from_conditionals<Rat>(p, atoms);
    }
    if (p <= Rat(2, 3)) {
        auto spec = classify(p, Rat(1, 2));
        if (!spec)
            throw std::logic_error("cov_witness: a = 1/2 must be tight on [1/3, 2/3]");
        return to_table(build_ladder(*spec), Rat(1, 2));
    }
    return complement(cov_witness(1 - p));
}

double alpha0()
{
    static const double root = [] {
        double lo = 2.0, hi = 3.0;
        auto h = [](double alpha) { return six_point_value(alpha) - std::exp2(-alpha); };
        const double h_lo = h(lo), h_hi = h(hi);
        assert(h_lo < 0.0 && h_hi > 0.0);
        (void)h_lo;
        (void)h_hi;
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            (h(mid) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }();
    return root;
}

double abspow_bound(double alpha)
{
    if (!(alpha > 0.0))
        throw std::invalid_argument("abspow_bound: exponent must be positive");
    if (alpha <= alpha0())
        return std::exp2(-alpha);
    return six_point_value(alpha);
}

double abspow_a_opt(double alpha)
{
    if (!(alpha > 0.0))
        throw std::invalid_argument("abspow_a_opt: exponent must be positive");
    return 2.0 / (sqrt_disc(alpha) + alpha + 1.0);
}

JointAtomTable<double> abspow_six_point_table(double a)
{
    if (!(a >= 0.0 && a <= 1.0))
        throw std::invalid_argument("abspow_six_point_table: offset must lie in [0,1]");
    const double w_edge = a / (a + 1.0);       // conditional weight of the two edge atoms
    const double w_diag = (1.0 - a) / (a + 1.0);
    std::vector<SupportAtom<double>> atoms{
        {a, 1.0, w_edge, 1},
        {1.0, a, w_edge, 1},
        {1.0 - a, 1.0 - a, w_diag, 1},
        {0.0, 1.0 - a, w_edge, 0},
        {1.0 - a, 0.0, w_edge, 0},
        {a, a, w_diag, 0},
    };
    return from_conditionals<double>(0.5, atoms);
}

JointAtomTable<double> abspow_witness(double alpha)
{
    if (!(alpha > 0.0))
        throw std::invalid_argument("abspow_witness: exponent must be positive");
    if (alpha <= alpha0()) {
        std::vector<SupportAtom<double>> atoms{
            {1.0, 0.5, 1.0, 1}, // X1 = X, X2 = 1/2
            {0.0, 0.5, 1.0, 0},
        };
        return from_conditionals<double>(0.5, atoms);
    }
    return abspow_six_point_table(abspow_a_opt(alpha));
}

double asymptotic_check(double alpha)
{
    if (!(alpha >= alpha0()))
        throw std::invalid_argument("asymptotic_check: needs alpha >= alpha0");
    return alpha * abspow_bound(alpha);
}

} // namespace coherent
