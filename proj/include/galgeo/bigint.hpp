#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace galgeo {

// All counting and inequality checks are done in exact integer/rational
// arithmetic; no floating point is used anywhere in verification paths.
using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

inline BigInt big_pow(BigInt base, unsigned exp) {
    BigInt r = 1;
    while (exp) {
        if (exp & 1u) r *= base;
        base *= base;
        exp >>= 1u;
    }
    return r;
}

}  // namespace galgeo
