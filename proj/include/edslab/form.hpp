#pragma once

#include "edslab/riemann.hpp"
#include "edslab/scalar.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace edslab {

/// Graded exterior form over an abstract coframe: a map from strictly
/// increasing tuples of generator ids to nonzero Scalar coefficients.
class Form {
public:
    Form() : degree_(0) {}
    explicit Form(int degree) : degree_(degree) {}
    static Form scalar(Scalar s);
    static Form generator(int gen_id);

    int degree() const { return degree_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<std::vector<int>, Scalar>& terms() const { return terms_; }
    Scalar coefficient(const std::vector<int>& tuple) const;

    /// Adds c * w^{ids}; ids may be unordered (the sign of the sorting
    /// permutation is absorbed), duplicates make the term vanish.
    void add_term(std::vector<int> ids, Scalar c);

    Form operator-() const;
    Form& operator+=(const Form& o);
    Form& operator-=(const Form& o);
    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }
    Form scaled(const Scalar& s) const;
    friend bool operator==(const Form& a, const Form& b) {
        return a.degree_ == b.degree_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const Form& a, const Form& b) { return !(a == b); }

private:
    int degree_;
    std::map<std::vector<int>, Scalar> terms_;
};

/// Graded-anticommutative, bilinear, associative product in canonical form.
Form wedge(const Form& lhs, const Form& rhs);
Form wedge_all(const std::vector<Form>& factors);

/// Ordered generator 1-forms together with the structure table d(generator)
/// and the scalar-derivative table d(symbol).
struct CoframeContext {
    std::shared_ptr<SymbolTable> symbols = std::make_shared<SymbolTable>();
    std::vector<std::string> gen_names;
    std::map<std::string, int> gen_ids;
    std::map<int, Form> structure; // generator id -> d(generator), a 2-form
    std::map<int, Form> scalar_d;  // symbol id -> d(symbol), a 1-form
    bool first_bianchi = false;

    int dim() const { return static_cast<int>(gen_names.size()); }
    int add_generator(const std::string& name);
    int generator(const std::string& name) const; // throws if absent
    bool has_generator(const std::string& name) const { return gen_ids.count(name) != 0; }
};

/// d(s * w^I) = ds ^ w^I + s * d(w^I), structure-equation driven.  Missing
/// structure or scalar_d entries raise an error naming the culprit.
Form exterior_derivative(const Form& f, const CoframeContext& ctx);

/// Simultaneous symbol substitution applied to every coefficient.
Form substitute(const Form& f, const std::map<int, Scalar>& assignment);

/// Replaces the listed generators by arbitrary 1-forms and expands wedges;
/// generators absent from the map are kept.
Form substitute_generators(const Form& f, const std::map<int, Form>& one_forms);

std::string form_str(const Form& f, const CoframeContext& ctx);

} // namespace edslab
