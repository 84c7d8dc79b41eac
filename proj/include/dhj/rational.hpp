#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace dhj {

/// Arbitrary-precision rational. Every measure in the library is one of these.
using Rational = mpq_class;
using Integer = mpz_class;

/// Probability-valued rational, kept in [0, 1] by the code that produces it.
using ExactProb = Rational;

/// Formats as "p/q" (always with a denominator, e.g. "1/1", "0/1").
std::string to_string(const Rational& r);

/// Parses "p/q", an integer, or a finite decimal such as "0.125" exactly.
/// Throws InvalidArgument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

Integer binomial(unsigned long n, unsigned long r);
Integer factorial(unsigned long n);

/// n! / (c_1! ... c_k!); requires sum(c) == n.
template <typename Range>
Integer multinomial(unsigned long n, const Range& counts) {
  Integer result = factorial(n);
  for (auto c : counts) result /= factorial(static_cast<unsigned long>(c));
  return result;
}

/// Lossy conversion for reporting only.
double to_double(const Rational& r);

}  // namespace dhj
