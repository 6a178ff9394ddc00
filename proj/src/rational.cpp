#include "coherent/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace coherent {

namespace {

std::optional<BigInt> parse_big_int(std::string_view s)
{
    if (s.empty())
        return std::nullopt;
    std::size_t pos = 0;
    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        pos = 1;
    }
    if (pos == s.size())
        return std::nullopt;
    BigInt value = 0;
    for (; pos < s.size(); ++pos) {
        if (!std::isdigit(static_cast<unsigned char>(s[pos])))
            return std::nullopt;
        value = value * 10 + (s[pos] - '0');
    }
    return negative ? BigInt(-value) : value;
}

} // namespace

std::optional<Rat> try_parse_rat(std::string_view text)
{
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = parse_big_int(text.substr(0, slash));
        auto den = parse_big_int(text.substr(slash + 1));
        if (!num || !den || *den == 0)
            return std::nullopt;
        return Rat(*num, *den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto whole_text = text.substr(0, dot);
        auto frac_text = text.substr(dot + 1);
        if (frac_text.empty())
            return std::nullopt;
        bool negative = !whole_text.empty() && whole_text[0] == '-';
        if (whole_text.empty() || whole_text == "-" || whole_text == "+")
            whole_text = "0";
        auto whole = parse_big_int(whole_text);
        auto frac = parse_big_int(frac_text);
        if (!whole || !frac || *frac < 0)
            return std::nullopt;
        BigInt den = 1;
        for (std::size_t i = 0; i < frac_text.size(); ++i)
            den *= 10;
        Rat magnitude = Rat(abs(*whole)) + Rat(*frac, den);
        return negative ? Rat(-magnitude) : magnitude;
    }
    auto value = parse_big_int(text);
    if (!value)
        return std::nullopt;
    return Rat(*value);
}

Rat parse_rat(std::string_view text)
{
    auto value = try_parse_rat(text);
    if (!value)
        throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
    return *value;
}

std::string format_rat(const Rat& value)
{
    if (denominator(value) == 1)
        return numerator(value).str();
    return numerator(value).str() + "/" + denominator(value).str();
}

bool is_integer(const Rat& value)
{
    return denominator(value) == 1;
}

Rat rat_pow(const Rat& base, unsigned exponent)
{
    Rat result = 1;
    Rat factor = base;
    while (exponent != 0) {
        if (exponent & 1u)
            result *= factor;
        exponent >>= 1u;
        if (exponent != 0)
            factor *= factor;
    }
    return result;
}

} // namespace coherent
