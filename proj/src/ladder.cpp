#include "coherent/ladder.hpp"

#include <utility>

namespace coherent {

namespace {

bool positive_integer(const Rat& q, long& out)
{
    if (!is_integer(q) || q <= 0)
        return false;
    out = static_cast<long>(numerator(q).convert_to<long long>());
    return true;
}

// X=1 points ((k+1)a + (2-a)p - 1, 1 - ka), k = 0..n1-1, interleaved with
// their X=0 partners one step of a below. Shared between the BothAbove
// case, the straddle first series (last X=1 point on x1 = 1, n0 = n1 - 1)
// and the first TwoLadders chain (last X=0 point on x2 = 0, n0 = n1).
std::vector<LadderPoint> first_series_chain(const Rat& p, const Rat& a, long n1, long n0)
{
    const Rat low = (2 - a) * p;
    std::vector<LadderPoint> pts;
    pts.reserve(std::size_t(n1 + n0));
    for (long k = 0; k < n1; ++k) {
        pts.push_back({(k + 1) * a + low - 1, 1 - k * a, 1, Rat(0)});
        if (k < n0)
            pts.push_back({(k + 1) * a + low - 1, 1 - (k + 1) * a, 0, Rat(0)});
    }
    return pts;
}

// X=0 points (ka, (2-a)p - ka), k = 0..n0-1, interleaved with X=1 partners
// one step of a to the right. Straddle second series (n1 = n0 - 1, last
// X=0 point on x2 = 0) and the second TwoLadders chain (n1 = n0, last X=1
// point on x1 = 1).
std::vector<LadderPoint> second_series_chain(const Rat& p, const Rat& a, long n0, long n1)
{
    const Rat low = (2 - a) * p;
    std::vector<LadderPoint> pts;
    pts.reserve(std::size_t(n1 + n0));
    for (long k = 0; k < n0; ++k) {
        pts.push_back({k * a, low - k * a, 0, Rat(0)});
        if (k < n1)
            pts.push_back({(k + 1) * a, low - k * a, 1, Rat(0)});
    }
    return pts;
}

// Assigns q to the head, propagates along shared coordinates, solves the
// X=1 normalization for q and asserts the X=0 one.
LadderDistribution propagate_masses(const Rat& p, const Rat& a, std::vector<LadderPoint> pts)
{
    for (const auto& pt : pts)
        if (pt.x1 < 0 || pt.x1 > 1 || pt.x2 < 0 || pt.x2 > 1)
            throw LadderConstructionError("ladder point outside the unit square");

    std::vector<Rat> coeff(pts.size());
    coeff[0] = 1;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const auto& cur = pts[i];
        const auto& nxt = pts[i + 1];
        if (cur.x_value == nxt.x_value)
            throw LadderConstructionError("consecutive chain points carry the same X label");
        const bool share_x = cur.x1 == nxt.x1;
        const bool share_y = cur.x2 == nxt.x2;
        if (share_x == share_y)
            throw LadderConstructionError("consecutive chain points must share exactly one coordinate");
        const Rat t = share_x ? cur.x1 : cur.x2;
        if (cur.x_value == 1) {
            // moving to the X=0 partner on the same line through t
            if (t == 0)
                throw LadderConstructionError("ratio rule hit t = 0 mid-chain at atom " + format_rat(t));
            coeff[i + 1] = coeff[i] * (1 - t) / t;
        } else {
            if (t == 1)
                throw LadderConstructionError("ratio rule hit t = 1 mid-chain at atom " + format_rat(t));
            coeff[i + 1] = coeff[i] * t / (1 - t);
        }
    }

    Rat sum1(0), sum0(0);
    for (std::size_t i = 0; i < pts.size(); ++i)
        (pts[i].x_value == 1 ? sum1 : sum0) += coeff[i];
    if (sum1 == 0 || sum0 == 0)
        throw LadderConstructionError("chain misses one of the support lines entirely");

    const Rat q = p / sum1;
    if (q * sum0 != 1 - p)
        throw LadderConstructionError("mass normalizations disagree; chain is not a coherent witness");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i].mass = coeff[i] * q;
        if (pts[i].mass <= 0)
            throw LadderConstructionError("nonpositive propagated mass");
    }
    return {p, a, std::move(pts)};
}

LadderDistribution complement_ladder(const LadderDistribution& l)
{
    LadderDistribution r;
    r.prior = 1 - l.prior;
    r.step = l.step;
    r.points.reserve(l.points.size());
    for (auto it = l.points.rbegin(); it != l.points.rend(); ++it)
        r.points.push_back({1 - it->x1, 1 - it->x2, 1 - it->x_value, it->mass});
    return r;
}

} // namespace

const char* ladder_geometry_name(LadderGeometry g)
{
    switch (g) {
    case LadderGeometry::BothAbove: return "both_above";
    case LadderGeometry::BothBelow: return "both_below";
    case LadderGeometry::Straddle: return "straddle";
    }
    return "unknown";
}

const char* ladder_subcase_name(LadderSubcase s)
{
    switch (s) {
    case LadderSubcase::None: return "none";
    case LadderSubcase::FirstSeriesEndsOnX1eq1: return "first_series_ends_on_x1_eq_1";
    case LadderSubcase::SecondSeriesEndsOnX2eq0: return "second_series_ends_on_x2_eq_0";
    case LadderSubcase::TwoLadders: return "two_ladders";
    }
    return "unknown";
}

std::optional<LadderSpec> classify(const Rat& p, const Rat& a)
{
    if (!(p > 0 && p < 1))
        throw std::invalid_argument("classify: prior must lie in (0,1)");
    if (!(a > 0 && a <= 2))
        throw std::invalid_argument("classify: step must lie in (0,2]");

    const Rat low = (2 - a) * p;      // X=0 line height
    const Rat high = a + low;         // X=1 line height

    LadderSpec spec;
    spec.prior = p;
    spec.step = a;
    spec.geometry = low > 1 ? LadderGeometry::BothAbove
                            : high < 1 ? LadderGeometry::BothBelow
                                       : LadderGeometry::Straddle;

    long n = 0;
    // condition 2: (2 - (2-a)p)/a integer, X=1 line strictly above 1.
    // Covers BothAbove and the straddle first series.
    if (high > 1 && positive_integer((2 - low) / a, n)) {
        // condition 1 takes precedence strictly inside the straddle band:
        // there both series terminate legally and the optimum is a convex
        // mix. The quotients can only collide at the boundaries, where the
        // degenerate series is dropped in favour of the surviving one.
        if (spec.geometry == LadderGeometry::Straddle && low < 1) {
            long n1 = 0;
            if (positive_integer(1 / a, n1)) {
                spec.subcase = LadderSubcase::TwoLadders;
                spec.steps = n1;
                spec.condition = 1;
                return spec;
            }
        }
        spec.subcase = spec.geometry == LadderGeometry::Straddle
            ? LadderSubcase::FirstSeriesEndsOnX1eq1
            : LadderSubcase::None;
        spec.steps = n;
        spec.condition = 2;
        return spec;
    }
    // condition 1 without a colliding condition 2; strict interior only --
    // at either geometric boundary the matching series degenerates and the
    // surviving single chain (condition 2 or 3) takes over.
    if (low < 1 && high > 1 && positive_integer(1 / a, n)) {
        spec.subcase = LadderSubcase::TwoLadders;
        spec.steps = n;
        spec.condition = 1;
        return spec;
    }
    // condition 3: (2 - (2-a)(1-p))/a = 1 + (2-a)p/a integer, X=0 line
    // strictly below 1. Covers BothBelow and the straddle second series.
    if (low < 1 && positive_integer((2 - (2 - a) * (1 - p)) / a, n)) {
        spec.subcase = spec.geometry == LadderGeometry::Straddle
            ? LadderSubcase::SecondSeriesEndsOnX2eq0
            : LadderSubcase::None;
        spec.steps = n;
        spec.condition = 3;
        return spec;
    }
    return std::nullopt;
}

LadderWitness build_ladder(const LadderSpec& spec)
{
    const Rat& p = spec.prior;
    const Rat& a = spec.step;
    const long n = spec.steps;

    switch (spec.condition) {
    case 2: {
        if (n < 2)
            throw LadderConstructionError(
                "a = 2 admits no chain witness; the attainment is the degenerate X1 = X2 = X pair");
        return {propagate_masses(p, a, first_series_chain(p, a, n, n - 1)), std::nullopt};
    }
    case 3: {
        if (spec.geometry == LadderGeometry::BothBelow) {
            // the complement problem is the BothAbove case with the same a
            LadderSpec mirror = spec;
            mirror.prior = 1 - p;
            mirror.geometry = LadderGeometry::BothAbove;
            mirror.subcase = LadderSubcase::None;
            mirror.condition = 2;
            auto built = build_ladder(mirror);
            return {complement_ladder(built.first), std::nullopt};
        }
        return {propagate_masses(p, a, second_series_chain(p, a, n, n - 1)), std::nullopt};
    }
    case 1: {
        auto first = propagate_masses(p, a, first_series_chain(p, a, n, n));
        auto second = propagate_masses(p, a, second_series_chain(p, a, n, n));
        return {std::move(first), std::move(second)};
    }
    default:
        throw std::invalid_argument("build_ladder: spec does not come from classify");
    }
}

void validate_ladder(const LadderDistribution& ladder)
{
    const auto& pts = ladder.points;
    if (pts.empty())
        throw LadderConstructionError("empty ladder");
    const Rat low = (2 - ladder.step) * ladder.prior;
    const Rat high = ladder.step + low;

    Rat sum1(0), sum0(0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& pt = pts[i];
        if (pt.x1 < 0 || pt.x1 > 1 || pt.x2 < 0 || pt.x2 > 1)
            throw LadderConstructionError("point outside the unit square");
        if (pt.mass <= 0)
            throw LadderConstructionError("nonpositive mass");
        const Rat line = pt.x_value == 1 ? high : low;
        if (pt.x1 + pt.x2 != line)
            throw LadderConstructionError("point off its support line");
        (pt.x_value == 1 ? sum1 : sum0) += pt.mass;
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (pts[j].x1 == pt.x1 && pts[j].x2 == pt.x2)
                throw LadderConstructionError("duplicate support point");
    }
    if (sum1 != ladder.prior || sum0 != 1 - ladder.prior)
        throw LadderConstructionError("ladder masses do not normalize");

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const bool share = pts[i].x1 == pts[i + 1].x1 || pts[i].x2 == pts[i + 1].x2;
        if (!share)
            throw LadderConstructionError("consecutive points share no coordinate");
        const bool x_ok = pts[i].x1 <= pts[i + 1].x1;
        const bool y_ok = pts[i].x2 >= pts[i + 1].x2;
        if (!x_ok || !y_ok)
            throw LadderConstructionError("coordinate sequences not monotone");
    }
    // at most two points on any horizontal or vertical line
    for (std::size_t i = 0; i < pts.size(); ++i) {
        int on_x = 0, on_y = 0;
        for (const auto& other : pts) {
            on_x += other.x1 == pts[i].x1;
            on_y += other.x2 == pts[i].x2;
        }
        if (on_x > 2 || on_y > 2)
            throw LadderConstructionError("more than two points on a line");
    }
}

JointAtomTable<Rat> to_table(const LadderDistribution& ladder)
{
    std::vector<SupportAtom<Rat>> atoms;
    atoms.reserve(ladder.points.size());
    for (const auto& pt : ladder.points) {
        const Rat cls = pt.x_value == 1 ? ladder.prior : 1 - ladder.prior;
        atoms.push_back({pt.x1, pt.x2, pt.mass / cls, pt.x_value});
    }
    return from_conditionals<Rat>(ladder.prior, atoms);
}

JointAtomTable<Rat> to_table(const LadderWitness& witness, const Rat& lambda)
{
    if (!witness.second)
        return to_table(witness.first); // single chain, nothing to mix

    if (lambda < 0 || lambda > 1)
        throw std::invalid_argument("mixing weight must lie in [0,1]");
    const Rat p = witness.first.prior;
    std::vector<SupportAtom<Rat>> atoms;
    auto add = [&](const LadderDistribution& l, const Rat& w) {
        if (w == 0)
            return;
        for (const auto& pt : l.points) {
            const Rat cls = pt.x_value == 1 ? p : 1 - p;
            atoms.push_back({pt.x1, pt.x2, w * pt.mass / cls, pt.x_value});
        }
    };
    add(witness.first, lambda);
    add(*witness.second, 1 - lambda);
    return from_conditionals<Rat>(p, atoms);
}

} // namespace coherent
