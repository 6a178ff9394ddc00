#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace coherent {

namespace mp = boost::multiprecision;

using BigInt = mp::number<mp::cpp_int_backend<>, mp::et_off>;

/// Exact rational scalar. Every identity-level check in the library
/// (coherence at tol = 0, ladder masses, integrality conditions) runs on
/// this type; LP solving and certificate sweeps run on double.
using Rat = mp::number<mp::rational_adaptor<mp::cpp_int_backend<>>, mp::et_off>;

/// Accepts "num/den", a plain integer, or a decimal literal which is read
/// as an exact decimal fraction ("0.37" -> 37/100). No exponent syntax.
std::optional<Rat> try_parse_rat(std::string_view text);

/// Same as try_parse_rat but throws std::invalid_argument on bad input.
Rat parse_rat(std::string_view text);

/// "num/den", or just "num" when the denominator is 1.
std::string format_rat(const Rat& value);

bool is_integer(const Rat& value);

inline double to_double(const Rat& value) { return static_cast<double>(value); }
inline double to_double(double value) { return value; }

Rat rat_pow(const Rat& base, unsigned exponent);

template <class T>
T scalar_cast(const Rat& value)
{
    if constexpr (std::is_same_v<T, Rat>) {
        return value;
    } else {
        return static_cast<T>(value);
    }
}

} // namespace coherent
