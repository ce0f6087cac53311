#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace pqs {

using Rat = boost::rational<long long>;

// Representative of r mod 1 in [0, 1).
inline Rat mod_one(const Rat& r) {
    long long q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
    return r - Rat(q);
}

inline bool is_integer(const Rat& r) { return r.denominator() == 1; }

inline std::string to_string(const Rat& r) {
    std::string s = std::to_string(r.numerator());
    if (r.denominator() != 1) s += "/" + std::to_string(r.denominator());
    return s;
}

// Inverse of to_string; accepts "n" and "n/d".
inline Rat rational_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(std::stoll(s));
    return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

}  // namespace pqs
