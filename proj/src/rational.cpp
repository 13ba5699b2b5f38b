#include "freeprob/rational.hpp"

#include <cctype>
#include <vector>

#include "freeprob/errors.hpp"

namespace freeprob {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{} : body.substr(slash + 1);
  if (!all_digits(num) || (slash != std::string_view::npos && !all_digits(den)))
    throw ParseError("not a rational: '" + std::string(text) + "'");
  Integer n(std::string(num), 10);
  Integer d = den.empty() ? Integer(1) : Integer(std::string(den), 10);
  if (d == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
  if (text.front() == '-') n = -n;
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Integer catalan(int n) {
  static const std::vector<Integer> table = [] {
    std::vector<Integer> c(64);
    c[0] = 1;
    for (int m = 1; m < 64; ++m) c[m] = c[m - 1] * (4 * m - 2) / (m + 1);
    return c;
  }();
  if (n < 0 || n >= static_cast<int>(table.size())) throw DomainError("catalan index out of range");
  return table[n];
}

Integer signed_catalan(int k) {
  Integer c = catalan(k - 1);
  return (k % 2 == 1) ? c : Integer(-c);
}

}  // namespace freeprob
