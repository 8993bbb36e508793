#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace ghzlab {

/// Exact rational arithmetic. Game weights, strategy values and LP
/// certificates are kept exact end-to-end; doubles appear only at the
/// reporting boundary and inside floating-point LP search.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// "3/4" for proper fractions, "3" for integers.
std::string rat_to_string(const Rat& r);

/// Parses "3/4", "-1/2" or "2". Throws ValidationError on anything else
/// (including zero denominators and decimal notation).
Rat rat_from_string(const std::string& s);

double rat_to_double(const Rat& r);

/// Best rational approximation of x with denominator <= max_den, via the
/// continued-fraction convergents. Used to snap floating LP witnesses back
/// onto exact rationals before re-verification.
Rat rat_snap(double x, std::int64_t max_den = 1000000);

} // namespace ghzlab
