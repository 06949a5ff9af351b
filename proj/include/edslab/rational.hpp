#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <random>
#include <string>

namespace edslab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Uniform random rationals p/q with p, q in [1, 10^6], used for generic-point
/// substitution in exact rank computations.
class RationalSampler {
public:
    explicit RationalSampler(std::uint64_t seed) : rng_(seed) {}

    Rational next() {
        std::uniform_int_distribution<std::int64_t> d(1, 1000000);
        return Rational(d(rng_), d(rng_));
    }

    Rational next_signed() {
        Rational r = next();
        std::uniform_int_distribution<int> s(0, 1);
        return s(rng_) ? r : -r;
    }

    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        std::uniform_int_distribution<std::int64_t> d(lo, hi);
        return d(rng_);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace edslab
