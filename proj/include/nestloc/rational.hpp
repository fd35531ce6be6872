#ifndef NESTLOC_RATIONAL_HPP
#define NESTLOC_RATIONAL_HPP

#include <string>
#include <string_view>

#include <gmpxx.h>

#include <nestloc/errors.hpp>

namespace nestloc
{

using integer = mpz_class;
using rational = mpq_class;

// Canonical "p/q" form; integers print without a denominator.
inline std::string to_string(const rational &q)
{
    return q.get_str();
}

inline std::string to_string(const integer &z)
{
    return z.get_str();
}

inline rational parse_rational(std::string_view text)
{
    rational q;
    if (text.empty() || q.set_str(std::string(text), 10) != 0) {
        throw invalid_argument_error("malformed rational '" + std::string(text) + "'");
    }
    if (q.get_den() == 0) {
        throw invalid_argument_error("zero denominator in '" + std::string(text) + "'");
    }
    q.canonicalize();
    return q;
}

// Generalized binomial coefficient binom(x, k) = x(x-1)...(x-k+1)/k!, zero for k < 0.
// Valid for negative upper index.
inline integer binomial(const integer &x, long k)
{
    if (k < 0) {
        return 0;
    }
    integer num = 1;
    integer den = 1;
    for (long j = 0; j < k; ++j) {
        num *= x - j;
        den *= j + 1;
    }
    return num / den;
}

} // namespace nestloc

#endif
