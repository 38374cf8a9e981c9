#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace hwr {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational make_rational(long long num, long long den = 1) { return Rational(num, den); }

}  // namespace hwr
