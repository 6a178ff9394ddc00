#pragma once

#include "coherent/table.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace coherent {

/// Position of the support lines x1+x2 = (2-a)p and x1+x2 = a+(2-a)p
/// relative to the antidiagonal x1+x2 = 1. Boundary contact counts as
/// Straddle; the straddle construction extends continuously there.
enum class LadderGeometry { BothAbove, BothBelow, Straddle };

/// How the straddle-case series terminate. TwoLadders is the 1/a integer
/// case, where both series close and the optimum is any convex mix.
enum class LadderSubcase { None, FirstSeriesEndsOnX1eq1, SecondSeriesEndsOnX2eq0, TwoLadders };

const char* ladder_geometry_name(LadderGeometry g);
const char* ladder_subcase_name(LadderSubcase s);

struct LadderSpec {
    Rat prior;
    Rat step; // a, the coefficient in (X1-p)+(X2-p) = a(X-p)
    LadderGeometry geometry = LadderGeometry::Straddle;
    LadderSubcase subcase = LadderSubcase::None;
    long steps = 0;    // the integer N of the satisfied attainment condition
    int condition = 0; // which of the three conditions matched (1, 2 or 3)
};

/// Exact test of the attainment conditions. Returns nullopt when none
/// holds (the quadratic bound is then strict). Throws on p outside (0,1)
/// or a outside (0,2].
std::optional<LadderSpec> classify(const Rat& p, const Rat& a);

struct LadderPoint {
    Rat x1;
    Rat x2;
    int x_value = 1; // which support line the point sits on
    Rat mass;        // joint mass P(X1=x1, X2=x2, X=x_value)
};

/// Staircase support chain: consecutive points share a coordinate, X=1
/// points sit on x1+x2 = a+(2-a)p, X=0 points on x1+x2 = (2-a)p, masses
/// total p and 1-p respectively.
struct LadderDistribution {
    Rat prior;
    Rat step;
    std::vector<LadderPoint> points;
};

/// build_ladder output: one chain, or an ordered pair in the TwoLadders
/// subcase (first = the series ending on x2 = 0, second = on x1 = 1).
struct LadderWitness {
    LadderDistribution first;
    std::optional<LadderDistribution> second;
};

class LadderConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Generates the support chain for a tight spec and propagates masses: an
/// unknown q at the head, the (1-t)/t and t/(1-t) ratio rules along shared
/// coordinates, then q from the X=1 normalization. The X=0 normalization
/// is asserted, not assumed. Throws LadderConstructionError if a ratio
/// rule would hit t in {0,1} mid-chain (only legal at the endpoints) or if
/// the spec has no chain witness (a = 2, where the attainment is the
/// degenerate X1 = X2 = X pair).
LadderWitness build_ladder(const LadderSpec& spec);

/// Checks the staircase axioms: distinct points, monotone coordinate
/// sequences, shared coordinates between neighbours, at most two points
/// per line, line membership, positive masses, and both normalizations.
/// Throws LadderConstructionError on the first breach.
void validate_ladder(const LadderDistribution& ladder);

/// Conversion to the conditional-weight table form. Permissive: accepts
/// any list of labelled masses (merging coincident coordinates), so
/// degenerate hand-made distributions convert too.
JointAtomTable<Rat> to_table(const LadderDistribution& ladder);

/// Convex combination lambda * first + (1-lambda) * second. For a single
/// chain lambda must be 1 (or second present).
JointAtomTable<Rat> to_table(const LadderWitness& witness, const Rat& lambda = Rat(1, 2));

} // namespace coherent
