#ifndef JETCALC_RATIONAL_HPP
#define JETCALC_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace jetcalc {

// Exact arithmetic used throughout the library. Every public numeric result
// is a Rational; floating point appears only in the optional double evaluator.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

Rational factorial(int n);

// C(n, k) as an exact rational; zero when k < 0 or k > n.
Rational binomial(int n, int k);

// Canonical rendering: "p" or "p/q" with q > 0 and gcd(p, q) = 1.
std::string to_string(const Rational& value);

double to_double(const Rational& value);

}  // namespace jetcalc

#endif
