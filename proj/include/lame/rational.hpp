#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace lame {

// Exact rational arithmetic backed by GMP. Unbounded by construction.
using rational = mpq_class;

/// "p/q" if the denominator is not 1, otherwise "p".
std::string to_fraction_string(const rational& r);

/// Parses "p", "-p", "p/q". Throws std::invalid_argument on malformed input.
rational rational_from_string(std::string_view s);

inline double to_double(const rational& r) { return r.get_d(); }

rational rational_pow(const rational& base, unsigned exp);

/// n! as an exact integer.
mpz_class factorial(unsigned n);

}
