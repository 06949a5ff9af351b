#pragma once

#include "edslab/rational.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace edslab {

struct ExprNode;

struct ExprEvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExprParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Immutable scalar field on R^n: an expression tree over the coordinates
/// x_0..x_{n-1} with rational constants, arithmetic, integer powers, and
/// exp/sin/cos/sqrt.  Partial derivatives are exact (symbolic); evaluation
/// is double precision with domain guards (sqrt of a negative number and
/// division by zero throw ExprEvalError).
class ExprField {
public:
    ExprField(); // the zero field
    ExprField(int c);
    ExprField(const Rational& c);

    static ExprField var(int index); // coordinate x_index, 0-based

    bool is_constant() const;
    bool is_zero() const;
    Rational constant_value() const; // requires is_constant()

    /// Exact partial derivative with respect to coordinate `index`.
    ExprField derivative(int index) const;

    double eval(const std::vector<double>& point) const;

    /// Reparseable text; `names[i]` labels coordinate i (defaults x1, x2, ...).
    std::string str(const std::vector<std::string>& names = {}) const;

    friend ExprField operator+(const ExprField&, const ExprField&);
    friend ExprField operator-(const ExprField&, const ExprField&);
    friend ExprField operator*(const ExprField&, const ExprField&);
    friend ExprField operator/(const ExprField&, const ExprField&);
    ExprField operator-() const;
    ExprField& operator+=(const ExprField& o) { return *this = *this + o; }
    ExprField& operator-=(const ExprField& o) { return *this = *this - o; }
    ExprField& operator*=(const ExprField& o) { return *this = *this * o; }

    friend ExprField pow(const ExprField& base, int exponent);
    friend ExprField exp(const ExprField&);
    friend ExprField sin(const ExprField&);
    friend ExprField cos(const ExprField&);
    friend ExprField sqrt(const ExprField&);

private:
    explicit ExprField(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_;

    friend struct ExprBuilder;
};

/// Parses the field-file expression grammar: `+ - * / ^` with the usual
/// precedence, integer and decimal literals (decimals are read as exact
/// rationals), parentheses, and the calls exp(...), sin(...), cos(...),
/// sqrt(...).  `names` maps coordinate names to indices by position.
ExprField parse_expr(const std::string& text, const std::vector<std::string>& names);

} // namespace edslab
