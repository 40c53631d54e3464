#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "wavecone/errors.hpp"

namespace wavecone {

/// Exact rational scalar. All operator coefficients and polynomial
/// arithmetic use this type; conversion to double happens only at
/// numerical evaluation.
using Rational = boost::multiprecision::cpp_rational;
using BigInt   = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Parses "p", "-p" or "p/q". Throws validation_error on anything else.
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw validation_error("empty rational literal");
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw validation_error("rational with zero denominator: " + s);
        return Rational(num, den);
    } catch (const std::exception&) {
        throw validation_error("bad rational literal: '" + s + "'");
    }
}

/// Canonical serialization: "p" for integers, "p/q" otherwise (q > 0, reduced).
inline std::string format_rational(const Rational& r) {
    std::string num = numerator(r).str();
    if (denominator(r) == 1) return num;
    return num + "/" + denominator(r).str();
}

} // namespace wavecone
