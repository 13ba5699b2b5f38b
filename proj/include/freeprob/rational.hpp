#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace freeprob {

using Rational = mpq_class;
using Integer = mpz_class;

// Accepts "p", "-p", "p/q"; result is canonical.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

Integer catalan(int n);

// (-1)^(k-1) C_(k-1)
Integer signed_catalan(int k);

}  // namespace freeprob
