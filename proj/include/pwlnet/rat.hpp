#pragma once

#include <gmpxx.h>
#include <string>
#include <string_view>

namespace pwlnet {

/// Exact rational scalar. Always reduced, denominator > 0 (mpq canonical form).
using Rat = mpq_class;
using Int = mpz_class;

/// Build a reduced rational from an integer pair. Throws std::domain_error on zero denominator.
Rat rat(long num, long den = 1);
Rat rat(const Int& num, const Int& den);

/// Parse "p", "-p" or "p/q" (q > 0 after reduction). Throws std::invalid_argument on
/// malformed text or zero denominator.
Rat rat_parse(std::string_view s);

/// Canonical text form "p/q" (always carries the denominator, so files round-trip bit-exactly).
std::string rat_str(const Rat& r);

double rat_double(const Rat& r);

} // namespace pwlnet
