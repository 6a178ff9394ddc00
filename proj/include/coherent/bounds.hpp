#pragma once

#include "coherent/ladder.hpp"

#include <optional>

namespace coherent {

/// Coefficients of f = alpha (x1-x2)^2 + beta (x1+x2-2p)^2.
struct QuadraticForm {
    Rat alpha;
    Rat beta;
};

/// Parameters of the sphere problem: maximize
/// alpha |x1-x2|^2 + beta |x1+x2|^2 over x1, x2 on the 2-sphere in R^3
/// built on a diameter vector w with |w|^2 = diameter_norm_sq.
struct SphereInstance {
    double alpha;
    double beta;
    double diameter_norm_sq;
};

/// Closed form: |w|^2 alpha^2/(alpha-beta) when alpha >= max(0, 2 beta),
/// else |w|^2 max(0, 4 beta, alpha+beta). alpha = beta = 0 returns 0.
double sphere_max(const SphereInstance& inst);

/// Brute-force oracle: angular grid over both sphere points (the problem
/// is invariant under rotation about w, leaving three angles), then a
/// shrinking pattern search around the best cell. Never exceeds the true
/// maximum by more than roundoff. resolution >= 8.
double sphere_max_numeric(const SphereInstance& inst, int resolution);

struct QuadBound {
    Rat value;
    bool tight = false;
    std::optional<LadderSpec> spec;                      // when the ladder machinery decides
    std::optional<LadderWitness> witness;                // tight via a ladder chain
    std::optional<JointAtomTable<Rat>> degenerate_witness; // tight via X1=X2=p, X1=X2=X or X1=X, X2=p
};

/// max E f over the coherent family with mean p, f the quadratic form.
/// Value is exact rational: p(1-p) alpha^2/(alpha-beta) on the projection
/// branch (tight iff classify finds an attainment condition), otherwise
/// p(1-p) max(0, 4 beta, alpha+beta), always attained.
QuadBound quad_bound(const Rat& p, const QuadraticForm& q);

/// min cov(X1, X2): -(p(1-p)/(1+p))^2, -p(1-p)/8, -(p(1-p)/(2-p))^2 on
/// (0,1/3), [1/3,2/3], (2/3,1) respectively.
Rat cov_bound_exact(const Rat& p);
double cov_bound(double p);

/// A coherent table attaining cov_bound(p) exactly: the two-atom
/// construction below 1/3, the a = 1/2 ladder mix on [1/3, 2/3], the
/// complement construction above 2/3.
JointAtomTable<Rat> cov_witness(const Rat& p);

/// Crossover exponent where the six-point value overtakes 2^-alpha;
/// bracketing bisection on [2,3] to 1e-10, computed once.
double alpha0();

/// max E |X1-X2|^alpha at p = 1/2: 2^-alpha up to alpha0, then the
/// six-point closed form. Evaluated in log space; stable through 1e6.
double abspow_bound(double alpha);

/// Maximizer a of 2 a (1-a)^alpha / (1+a), the six-point witness offset.
double abspow_a_opt(double alpha);

/// The one-parameter six-point family at p = 1/2 with offset a in [0,1]:
/// X=1 mass on (a,1), (1,a), (1-a,1-a), X=0 mass on (0,1-a), (1-a,0), (a,a).
JointAtomTable<double> abspow_six_point_table(double a);

/// Witness attaining abspow_bound: X1 = X, X2 = 1/2 up to alpha0, the
/// six-point table at a_opt beyond it.
JointAtomTable<double> abspow_witness(double alpha);

/// alpha * abspow_bound(alpha), which tends to 2/e; requires alpha >= alpha0.
double asymptotic_check(double alpha);

} // namespace coherent
