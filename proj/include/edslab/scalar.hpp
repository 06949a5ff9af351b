#pragma once

#include "edslab/rational.hpp"
#include "edslab/symbols.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace edslab {

/// Monomial: sorted (symbol id, exponent) pairs, exponents > 0.
using Monomial = std::vector<std::pair<int, int>>;

/// Graded lexicographic order: total degree first, then lex over the dense
/// exponent vectors by symbol id.
struct MonomialOrder {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Exact sparse multivariate polynomial over Q.  No zero coefficients are
/// stored; all operations return canonical results.
class Scalar {
public:
    Scalar() = default;
    Scalar(const Rational& c);
    Scalar(long c) : Scalar(Rational(c)) {}
    Scalar(int c) : Scalar(Rational(c)) {}
    static Scalar variable(int symbol_id);
    static Scalar variable(const std::string& name) { return variable(sym(name)); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_value() const; // requires is_constant()

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
    friend bool operator==(const Scalar& a, const Scalar& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }
    bool operator<(const Scalar& o) const { return terms_ < o.terms_; }

    Scalar scaled(const Rational& c) const;
    Scalar pow(int n) const;

    /// Exact partial derivative with respect to one symbol.
    Scalar derivative(int symbol_id) const;

    /// Simultaneous substitution of symbols by Scalars.  Throws on cyclic
    /// assignments (a value mentions a substituted symbol).
    Scalar substitute(const std::map<int, Scalar>& assignment) const;

    /// Evaluate with every symbol assigned a rational.  Missing symbols throw.
    Rational evaluate(const std::map<int, Rational>& point) const;

    /// Coefficient of symbol^1 viewed as linear in `symbol_id`; throws if the
    /// polynomial has degree > 1 in that symbol.
    Scalar linear_coefficient(int symbol_id) const;

    std::set<int> symbols() const;
    int total_degree() const;
    int degree_in(int symbol_id) const;

    const std::map<Monomial, Rational, MonomialOrder>& terms() const { return terms_; }
    void set_term(const Monomial& m, const Rational& c); // c == 0 erases

    std::string str() const;

private:
    std::map<Monomial, Rational, MonomialOrder> terms_;
};

Monomial monomial_mul(const Monomial& a, const Monomial& b);

} // namespace edslab
