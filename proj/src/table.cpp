#include "coherent/table.hpp"

namespace coherent {

const char* constraint_family_name(ConstraintFamily family)
{
    switch (family) {
    case ConstraintFamily::AtomRange: return "atom_range";
    case ConstraintFamily::AtomOrder: return "atom_order";
    case ConstraintFamily::Nonnegativity: return "nonnegativity";
    case ConstraintFamily::AlphaNormalization: return "alpha_normalization";
    case ConstraintFamily::BetaNormalization: return "beta_normalization";
    case ConstraintFamily::BayesRow: return "bayes_row";
    case ConstraintFamily::BayesColumn: return "bayes_column";
    }
    return "unknown";
}

} // namespace coherent
