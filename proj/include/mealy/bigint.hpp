#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace mealy {

using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const BigInt& n) { return n.str(); }

inline BigInt lcm(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::lcm(a, b);
}

}  // namespace mealy
