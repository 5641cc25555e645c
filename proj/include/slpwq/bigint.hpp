#ifndef SLPWQ_BIGINT_HPP
#define SLPWQ_BIGINT_HPP

#include <boost/multiprecision/cpp_int.hpp>

namespace slpwq {

// Lengths and positions are arbitrary-precision: |eval(X)| can reach 2^h(X).
using BigInt = boost::multiprecision::cpp_int;

inline BigInt big_gcd(const BigInt& a, const BigInt& b) {
    return boost::multiprecision::gcd(a, b);
}

inline long to_long(const BigInt& v) {
    return v.convert_to<long>();
}

}  // namespace slpwq

#endif
