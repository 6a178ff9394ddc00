#pragma once

#include "coherent/objective.hpp"

#include <memory>
#include <vector>

namespace coherent {

/// Closed-form building block of a certificate piece. Small immutable
/// expression; the combinator nodes exist so that pointwise averages,
/// reflections and scalings (symmetrize, antisymmetrize, perturbation)
/// stay exactly evaluable instead of being resampled.
class PieceExpr {
public:
    enum class Tag { Linear, ConstantZero, RationalInX, PowerLaw, Scaled, Average, Reflected };

    static PieceExpr linear(double a, double b);        // a + b x
    static PieceExpr constant_zero();
    static PieceExpr rational_in_x(double a, double b); // a/x + b
    /// sign (k - u^e)/u with u = x or 1-x; the abspow piece shapes.
    static PieceExpr power_law(double k, double e, bool reflect_argument, bool negate);
    static PieceExpr scaled(PieceExpr inner, double factor);
    static PieceExpr average(PieceExpr lhs, PieceExpr rhs);
    static PieceExpr reflected(PieceExpr inner); // inner(1-x)

    double operator()(double x) const;
    Tag tag() const { return tag_; }
    bool is_zero() const;

private:
    PieceExpr() = default;

    Tag tag_ = Tag::ConstantZero;
    double a_ = 0.0, b_ = 0.0, k_ = 0.0, e_ = 1.0;
    double sign_ = 1.0, factor_ = 1.0;
    bool reflect_ = false;
    std::shared_ptr<const PieceExpr> lhs_, rhs_;
};

struct CertPiece {
    double lo = 0.0;
    double hi = 1.0;
    PieceExpr expr;
};

enum class CertRole { G, H, S };

const char* cert_role_name(CertRole role);
const char* piece_tag_name(PieceExpr::Tag tag);

/// Piecewise closed form on [0,1]. Pieces carry closed intervals covering
/// [0,1] with disjoint interiors; at a shared endpoint the non-zero piece
/// wins (matching how the sources define their boundary values). Role S
/// certificates satisfy s(x) + s(1-x) = 0, checked on construction.
class PiecewiseCertificate {
public:
    PiecewiseCertificate(CertRole role, std::vector<CertPiece> pieces);

    double operator()(double x) const;
    CertRole role() const { return role_; }
    const std::vector<CertPiece>& pieces() const { return pieces_; }
    std::vector<double> breakpoints() const;
    PiecewiseCertificate scaled(double factor) const;

private:
    CertRole role_;
    std::vector<CertPiece> pieces_;
};

/// The t = (g+h)/2 averaging on the refined common breakpoint set. Never
/// increases the dual objective on symmetric f.
PiecewiseCertificate symmetrize(const PiecewiseCertificate& g, const PiecewiseCertificate& h);

/// s(x) = h(x)/2 - h(1-x)/2; antisymmetric by construction.
PiecewiseCertificate antisymmetrize(const PiecewiseCertificate& h);

/// Certificate pair with its claimed per-supremum bounds:
/// sup { f - g(x)(1-x) - h(y)(1-y) } <= bound1,
/// sup { f + g(x) x   + h(y) y     } <= bound2.
/// For covariance these are (gamma, delta); for the antisymmetric
/// certificates both equal opt(alpha).
struct DualCertificate {
    PiecewiseCertificate g;
    PiecewiseCertificate h;
    double bound1 = 0.0;
    double bound2 = 0.0;

    double claimed_value(double p) const { return p * bound1 + (1.0 - p) * bound2; }
    DualCertificate perturbed(double factor) const
    {
        return {g.scaled(factor), h.scaled(factor), bound1, bound2};
    }
};

struct CovCertParams {
    double p = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
    double x0 = 0.0;
};

/// Appendix-style covariance certificate for p in (0, 1/3]: g linear left
/// of x0 = sqrt(2(delta+p^2)), (delta+p^2)/x - p right of it. Continuous
/// at x0 by construction (asserted to 1e-12).
std::pair<DualCertificate, CovCertParams> cov_certificate(double p);

struct AbsPowCertParams {
    double alpha = 0.0;
    double opt = 0.0;
    double y0 = 0.0;
};

/// Antisymmetric |x-y|^alpha certificate at p = 1/2: power-law tails
/// outside (1-y0, y0), zero in between, y0 = max(((1-opt)/a)^(1/(a-1)), 1/2)
/// (y0 = 1/2 for a <= 1, where the defining constraint flips direction).
/// Known defect inherited from the source construction: for large alpha
/// (above ~5.1) y0 exceeds opt^(1/alpha) and the zero band genuinely
/// violates the covering inequality near (0, y0); verify_certificate then
/// reports the violation honestly.
std::pair<DualCertificate, AbsPowCertParams> abspow_certificate(double alpha);

struct SearchConfig {
    int grid_n = 2001;      // sweep resolution per axis
    int refine_cells = 16;  // best cells refined
    int refine_steps = 40;  // shrinking pattern-search budget per cell
    double tol = 1e-9;      // acceptance threshold on violations
};

struct SupEstimate {
    double value = 0.0;
    double x = 0.0;
    double y = 0.0;
};

struct DualValueBreakdown {
    double value = 0.0;
    SupEstimate sup1;
    SupEstimate sup2;
};

/// p sup1 + (1-p) sup2, each supremum estimated by the dense sweep plus
/// local refinement of the best cells. Deterministic; a parallel schedule
/// over cells must reproduce the sequential result exactly (pure
/// evaluations, max-reduction).
DualValueBreakdown dual_value_detail(const DualCertificate& cert, const ObjectiveFn& f, double p,
                                     const SearchConfig& config = {});
double dual_value(const DualCertificate& cert, const ObjectiveFn& f, double p,
                  const SearchConfig& config = {});

struct VerificationReport {
    bool pass = false;
    double max_violation_1 = 0.0; // sup1 - bound1
    double max_violation_2 = 0.0; // sup2 - bound2
    SupEstimate argmax_1;
    SupEstimate argmax_2;
    double tol = 0.0;
};

/// Sweeps both covering inequalities against the certificate's claimed
/// bounds. target must equal the claimed optimum p bound1 + (1-p) bound2
/// (consistency is enforced); failure is a report, not an exception.
VerificationReport verify_certificate(const DualCertificate& cert, const ObjectiveFn& f, double p,
                                      double target, const SearchConfig& config = {});

} // namespace coherent
