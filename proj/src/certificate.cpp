#include "coherent/certificate.hpp"

#include "coherent/bounds.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace coherent {

namespace {

constexpr double kSingularGuard = 1e-12;

} // namespace

PieceExpr PieceExpr::linear(double a, double b)
{
    PieceExpr e;
    e.tag_ = Tag::Linear;
    e.a_ = a;
    e.b_ = b;
    return e;
}

PieceExpr PieceExpr::constant_zero()
{
    return PieceExpr{};
}

PieceExpr PieceExpr::rational_in_x(double a, double b)
{
    PieceExpr e;
    e.tag_ = Tag::RationalInX;
    e.a_ = a;
    e.b_ = b;
    return e;
}

PieceExpr PieceExpr::power_law(double k, double exponent, bool reflect_argument, bool negate)
{
    PieceExpr e;
    e.tag_ = Tag::PowerLaw;
    e.k_ = k;
    e.e_ = exponent;
    e.reflect_ = reflect_argument;
    e.sign_ = negate ? -1.0 : 1.0;
    return e;
}

PieceExpr PieceExpr::scaled(PieceExpr inner, double factor)
{
    PieceExpr e;
    e.tag_ = Tag::Scaled;
    e.factor_ = factor;
    e.lhs_ = std::make_shared<PieceExpr>(std::move(inner));
    return e;
}

PieceExpr PieceExpr::average(PieceExpr lhs, PieceExpr rhs)
{
    PieceExpr e;
    e.tag_ = Tag::Average;
    e.lhs_ = std::make_shared<PieceExpr>(std::move(lhs));
    e.rhs_ = std::make_shared<PieceExpr>(std::move(rhs));
    return e;
}

PieceExpr PieceExpr::reflected(PieceExpr inner)
{
    PieceExpr e;
    e.tag_ = Tag::Reflected;
    e.lhs_ = std::make_shared<PieceExpr>(std::move(inner));
    return e;
}

double PieceExpr::operator()(double x) const
{
    switch (tag_) {
    case Tag::Linear:
        return a_ + b_ * x;
    case Tag::ConstantZero:
        return 0.0;
    case Tag::RationalInX: {
        const double u = std::max(x, kSingularGuard); // one-sided limit at 0
        return a_ / u + b_;
    }
    case Tag::PowerLaw: {
        const double u = std::max(reflect_ ? 1.0 - x : x, kSingularGuard);
        return sign_ * (k_ - std::pow(u, e_)) / u;
    }
    case Tag::Scaled:
        return factor_ * (*lhs_)(x);
    case Tag::Average:
        return 0.5 * ((*lhs_)(x) + (*rhs_)(x));
    case Tag::Reflected:
        return (*lhs_)(1.0 - x);
    }
    return 0.0;
}

bool PieceExpr::is_zero() const
{
    switch (tag_) {
    case Tag::ConstantZero:
        return true;
    case Tag::Linear:
        return a_ == 0.0 && b_ == 0.0;
    case Tag::Scaled:
        return factor_ == 0.0 || lhs_->is_zero();
    case Tag::Average:
        return lhs_->is_zero() && rhs_->is_zero();
    case Tag::Reflected:
        return lhs_->is_zero();
    default:
        return false;
    }
}

const char* cert_role_name(CertRole role)
{
    switch (role) {
    case CertRole::G: return "g";
    case CertRole::H: return "h";
    case CertRole::S: return "s";
    }
    return "unknown";
}

const char* piece_tag_name(PieceExpr::Tag tag)
{
    switch (tag) {
    case PieceExpr::Tag::Linear: return "linear";
    case PieceExpr::Tag::ConstantZero: return "constant_zero";
    case PieceExpr::Tag::RationalInX: return "rational_in_x";
    case PieceExpr::Tag::PowerLaw: return "power_law";
    case PieceExpr::Tag::Scaled: return "scaled";
    case PieceExpr::Tag::Average: return "average";
    case PieceExpr::Tag::Reflected: return "reflected";
    }
    return "unknown";
}

PiecewiseCertificate::PiecewiseCertificate(CertRole role, std::vector<CertPiece> pieces)
    : role_(role)
    , pieces_(std::move(pieces))
{
    if (pieces_.empty())
        throw std::invalid_argument("certificate needs at least one piece");
    std::sort(pieces_.begin(), pieces_.end(),
              [](const CertPiece& a, const CertPiece& b) { return a.lo < b.lo; });
    if (std::abs(pieces_.front().lo) > 1e-12 || std::abs(pieces_.back().hi - 1.0) > 1e-12)
        throw std::invalid_argument("certificate pieces must cover [0,1]");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (pieces_[i].hi < pieces_[i].lo)
            throw std::invalid_argument("certificate piece with negative width");
        if (i + 1 < pieces_.size() && std::abs(pieces_[i].hi - pieces_[i + 1].lo) > 1e-12)
            throw std::invalid_argument("certificate pieces must tile [0,1]");
    }
    if (role_ == CertRole::S) {
        for (int k = 0; k <= 100; ++k) {
            const double x = k / 100.0;
            if (std::abs((*this)(x) + (*this)(1.0 - x)) > 1e-9)
                throw std::invalid_argument("role-s certificate is not antisymmetric");
        }
    }
}

double PiecewiseCertificate::operator()(double x) const
{
    x = std::clamp(x, 0.0, 1.0);
    const CertPiece* fallback = nullptr;
    for (const auto& piece : pieces_) {
        if (x < piece.lo || x > piece.hi)
            continue;
        if (!piece.expr.is_zero())
            return piece.expr(x);
        fallback = &piece;
    }
    if (fallback)
        return fallback->expr(x);
    // x must sit in some piece; guard against roundoff at the seams
    return pieces_.back().expr(x);
}

std::vector<double> PiecewiseCertificate::breakpoints() const
{
    std::vector<double> bps;
    for (const auto& piece : pieces_) {
        bps.push_back(piece.lo);
        bps.push_back(piece.hi);
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
              bps.end());
    return bps;
}

PiecewiseCertificate PiecewiseCertificate::scaled(double factor) const
{
    std::vector<CertPiece> pieces;
    pieces.reserve(pieces_.size());
    for (const auto& piece : pieces_)
        pieces.push_back({piece.lo, piece.hi, PieceExpr::scaled(piece.expr, factor)});
    return {role_, std::move(pieces)};
}

namespace {

std::vector<double> merged_breakpoints(const std::vector<double>& a, const std::vector<double>& b)
{
    std::vector<double> bps = a;
    bps.insert(bps.end(), b.begin(), b.end());
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end(),
                          [](double x, double y) { return std::abs(x - y) <= 1e-12; }),
              bps.end());
    return bps;
}

const CertPiece& piece_at(const PiecewiseCertificate& cert, double x)
{
    const CertPiece* best = nullptr;
    for (const auto& piece : cert.pieces())
        if (x >= piece.lo && x <= piece.hi) {
            best = &piece;
            break;
        }
    if (!best)
        throw std::logic_error("no certificate piece covers the point");
    return *best;
}

} // namespace

PiecewiseCertificate symmetrize(const PiecewiseCertificate& g, const PiecewiseCertificate& h)
{
    const auto bps = merged_breakpoints(g.breakpoints(), h.breakpoints());
    std::vector<CertPiece> pieces;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        const double mid = 0.5 * (bps[i] + bps[i + 1]);
        pieces.push_back({bps[i], bps[i + 1],
                          PieceExpr::average(piece_at(g, mid).expr, piece_at(h, mid).expr)});
    }
    const CertRole role = g.role() == h.role() ? g.role() : CertRole::H;
    return {role, std::move(pieces)};
}

PiecewiseCertificate antisymmetrize(const PiecewiseCertificate& h)
{
    auto bps = h.breakpoints();
    std::vector<double> mirrored(bps.size());
    std::transform(bps.begin(), bps.end(), mirrored.rbegin(),
                   [](double b) { return 1.0 - b; });
    bps = merged_breakpoints(bps, mirrored);
    std::vector<CertPiece> pieces;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        const double mid = 0.5 * (bps[i] + bps[i + 1]);
        auto direct = piece_at(h, mid).expr;
        auto mirror = PieceExpr::reflected(piece_at(h, 1.0 - mid).expr);
        pieces.push_back({bps[i], bps[i + 1],
                          PieceExpr::average(std::move(direct),
                                             PieceExpr::scaled(std::move(mirror), -1.0))});
    }
    return {CertRole::S, std::move(pieces)};
}

std::pair<DualCertificate, CovCertParams> cov_certificate(double p)
{
    if (!(p > 0.0 && p <= 1.0 / 3.0))
        throw std::invalid_argument("cov_certificate: p must lie in (0, 1/3]");

    const double c = 2.0 * p / (p + 1.0); // the witness atom; delta + p^2 = c^3
    CovCertParams params;
    params.p = p;
    params.delta = c * c * c - p * p;
    params.gamma = 2.0 * params.delta + p * p + 2.0 * p - 3.0 * c * c;
    params.x0 = c * std::sqrt(2.0 * c);

    std::vector<CertPiece> pieces{
        {0.0, params.x0, PieceExpr::linear(params.x0 - p, -0.5)},
        {params.x0, 1.0, PieceExpr::rational_in_x(c * c * c, -p)},
    };
    PiecewiseCertificate g(CertRole::G, std::move(pieces));
    const double jump = std::abs((params.x0 - p - 0.5 * params.x0)
                                 - (c * c * c / params.x0 - p));
    if (jump > 1e-12)
        throw std::logic_error("cov certificate discontinuous at x0");

    DualCertificate cert{g, g, params.gamma, params.delta};
    return {std::move(cert), params};
}

std::pair<DualCertificate, AbsPowCertParams> abspow_certificate(double alpha)
{
    if (!(alpha > 0.0))
        throw std::invalid_argument("abspow_certificate: exponent must be positive");

    AbsPowCertParams params;
    params.alpha = alpha;
    params.opt = abspow_bound(alpha);
    if (alpha <= 1.0) {
        // the defining first-order constraint flips for alpha < 1; 1/2 is
        // the admissible choice (and the alpha -> 1 limit, since opt < 1)
        assert(params.opt < 1.0);
        params.y0 = 0.5;
    } else {
        const double raw = std::exp(std::log((1.0 - params.opt) / alpha) / (alpha - 1.0));
        params.y0 = std::max(raw, 0.5);
    }

    std::vector<CertPiece> pieces;
    pieces.push_back({0.0, 1.0 - params.y0, PieceExpr::power_law(params.opt, alpha, true, true)});
    if (params.y0 > 0.5)
        pieces.push_back({1.0 - params.y0, params.y0, PieceExpr::constant_zero()});
    pieces.push_back({params.y0, 1.0, PieceExpr::power_law(params.opt, alpha, false, false)});

    PiecewiseCertificate s(CertRole::S, std::move(pieces));
    DualCertificate cert{s, s, params.opt, params.opt};
    return {std::move(cert), params};
}

namespace {

struct BestCell {
    double value;
    int i;
    int j;
};

template <class F>
SupEstimate sweep_supremum(F&& eval, const SearchConfig& cfg)
{
    const int n = cfg.grid_n;
    if (n < 2)
        throw std::invalid_argument("search grid must have at least two nodes");
    const double step = 1.0 / (n - 1);

    std::vector<BestCell> best;
    best.reserve(std::size_t(cfg.refine_cells) + 1);
    auto consider = [&](double v, int i, int j) {
        if (int(best.size()) < cfg.refine_cells) {
            best.push_back({v, i, j});
            std::push_heap(best.begin(), best.end(),
                           [](const BestCell& a, const BestCell& b) { return a.value > b.value; });
        } else if (v > best.front().value) {
            std::pop_heap(best.begin(), best.end(),
                          [](const BestCell& a, const BestCell& b) { return a.value > b.value; });
            best.back() = {v, i, j};
            std::push_heap(best.begin(), best.end(),
                           [](const BestCell& a, const BestCell& b) { return a.value > b.value; });
        }
    };

    for (int i = 0; i < n; ++i) {
        const double x = i * step;
        for (int j = 0; j < n; ++j)
            consider(eval(x, j * step), i, j);
    }

    SupEstimate result;
    result.value = -std::numeric_limits<double>::infinity();
    for (const auto& cell : best) {
        double cx = cell.i * step, cy = cell.j * step;
        double cv = cell.value;
        double h = step;
        int spent = 0;
        const int cap = cfg.refine_steps * 10;
        while (spent < cap && h > 1e-12) {
            bool improved = false;
            double bx = cx, by = cy, bv = cv;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0)
                        continue;
                    const double x = std::clamp(cx + di * h, 0.0, 1.0);
                    const double y = std::clamp(cy + dj * h, 0.0, 1.0);
                    const double v = eval(x, y);
                    if (v > bv) {
                        bv = v;
                        bx = x;
                        by = y;
                        improved = true;
                    }
                }
            if (improved) {
                cx = bx;
                cy = by;
                cv = bv;
            } else {
                h *= 0.5;
            }
            ++spent;
        }
        if (cv > result.value)
            result = {cv, cx, cy};
    }
    return result;
}

// sup over the unit square of f(x,y) + gx_term(x) + hy_term(y), with the
// per-axis certificate terms cached across the sweep
template <class GT, class HT>
SupEstimate certificate_supremum(const ObjectiveFn& f, GT&& g_term, HT&& h_term,
                                 const SearchConfig& cfg)
{
    const int n = cfg.grid_n;
    const double step = 1.0 / (n - 1);
    std::vector<double> gs(static_cast<std::size_t>(n));
    std::vector<double> hs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        gs[std::size_t(i)] = g_term(i * step);
        hs[std::size_t(i)] = h_term(i * step);
    }
    // the grid pass uses the cache; refinement (off-grid points) evaluates directly
    struct Hybrid {
        const ObjectiveFn& f;
        GT& g_term;
        HT& h_term;
        const std::vector<double>& gs;
        const std::vector<double>& hs;
        double step;
        double operator()(double x, double y) const
        {
            const double ix = x / step;
            const double iy = y / step;
            const int i = int(ix + 0.5), j = int(iy + 0.5);
            const bool on_grid = std::abs(ix - i) < 1e-9 && std::abs(iy - j) < 1e-9;
            if (on_grid)
                return f(x, y) + gs[std::size_t(i)] + hs[std::size_t(j)];
            return f(x, y) + g_term(x) + h_term(y);
        }
    };
    return sweep_supremum(Hybrid{f, g_term, h_term, gs, hs, step}, cfg);
}

} // namespace

DualValueBreakdown dual_value_detail(const DualCertificate& cert, const ObjectiveFn& f, double p,
                                     const SearchConfig& config)
{
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("dual_value: prior must lie in (0,1)");
    DualValueBreakdown out;
    out.sup1 = certificate_supremum(
        f, [&](double x) { return -cert.g(x) * (1.0 - x); },
        [&](double y) { return -cert.h(y) * (1.0 - y); }, config);
    out.sup2 = certificate_supremum(
        f, [&](double x) { return cert.g(x) * x; },
        [&](double y) { return cert.h(y) * y; }, config);
    out.value = p * out.sup1.value + (1.0 - p) * out.sup2.value;
    return out;
}

double dual_value(const DualCertificate& cert, const ObjectiveFn& f, double p,
                  const SearchConfig& config)
{
    return dual_value_detail(cert, f, p, config).value;
}

VerificationReport verify_certificate(const DualCertificate& cert, const ObjectiveFn& f, double p,
                                      double target, const SearchConfig& config)
{
    if (std::abs(cert.claimed_value(p) - target) > 1e-6)
        throw std::invalid_argument("verify_certificate: target disagrees with the certificate's claimed optimum");
    const auto detail = dual_value_detail(cert, f, p, config);
    VerificationReport report;
    report.tol = config.tol;
    report.argmax_1 = detail.sup1;
    report.argmax_2 = detail.sup2;
    report.max_violation_1 = detail.sup1.value - cert.bound1;
    report.max_violation_2 = detail.sup2.value - cert.bound2;
    report.pass = report.max_violation_1 <= config.tol && report.max_violation_2 <= config.tol;
    return report;
}

} // namespace coherent
