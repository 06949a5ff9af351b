#include "edslab/form.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace edslab {

Form Form::scalar(Scalar s) {
    Form f(0);
    if (!s.is_zero()) f.terms_.emplace(std::vector<int>{}, std::move(s));
    return f;
}

Form Form::generator(int gen_id) {
    Form f(1);
    f.terms_.emplace(std::vector<int>{gen_id}, Scalar(Rational(1)));
    return f;
}

Scalar Form::coefficient(const std::vector<int>& tuple) const {
    auto it = terms_.find(tuple);
    return it == terms_.end() ? Scalar() : it->second;
}

namespace {

// Sorts ids ascending, returns the sign of the permutation, or 0 on repeats.
int sort_sign(std::vector<int>& ids) {
    int sign = 1;
    for (size_t i = 1; i < ids.size(); ++i) {
        for (size_t j = i; j > 0 && ids[j - 1] >= ids[j]; --j) {
            if (ids[j - 1] == ids[j]) return 0;
            std::swap(ids[j - 1], ids[j]);
            sign = -sign;
        }
    }
    return sign;
}

} // namespace

void Form::add_term(std::vector<int> ids, Scalar c) {
    if (static_cast<int>(ids.size()) != degree_)
        throw std::runtime_error("term arity does not match form degree");
    if (c.is_zero()) return;
    int sign = sort_sign(ids);
    if (sign == 0) return;
    if (sign < 0) c = -c;
    auto it = terms_.find(ids);
    if (it == terms_.end()) {
        terms_.emplace(std::move(ids), std::move(c));
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Form Form::operator-() const {
    Form r(degree_);
    for (auto& [t, c] : terms_) r.terms_.emplace(t, -c);
    return r;
}

Form& Form::operator+=(const Form& o) {
    if (o.terms_.empty()) return *this;
    if (terms_.empty()) degree_ = o.degree_;
    if (degree_ != o.degree_)
        throw std::runtime_error("cannot add forms of degree " + std::to_string(degree_) +
                                 " and " + std::to_string(o.degree_));
    for (auto& [t, c] : o.terms_) {
        auto it = terms_.find(t);
        if (it == terms_.end()) {
            terms_.emplace(t, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    return *this;
}

Form& Form::operator-=(const Form& o) { return *this += -o; }

Form Form::scaled(const Scalar& s) const {
    Form r(degree_);
    if (s.is_zero()) return r;
    for (auto& [t, c] : terms_) {
        Scalar v = c * s;
        if (!v.is_zero()) r.terms_.emplace(t, std::move(v));
    }
    return r;
}

Form wedge(const Form& lhs, const Form& rhs) {
    Form r(lhs.degree() + rhs.degree());
    for (auto& [ta, ca] : lhs.terms()) {
        for (auto& [tb, cb] : rhs.terms()) {
            std::vector<int> ids = ta;
            ids.insert(ids.end(), tb.begin(), tb.end());
            r.add_term(std::move(ids), ca * cb);
        }
    }
    return r;
}

Form wedge_all(const std::vector<Form>& factors) {
    Form r = Form::scalar(Scalar(Rational(1)));
    for (auto& f : factors) r = wedge(r, f);
    return r;
}

int CoframeContext::add_generator(const std::string& name) {
    if (gen_ids.count(name))
        throw std::runtime_error("generator '" + name + "' already declared");
    int id = static_cast<int>(gen_names.size());
    gen_names.push_back(name);
    gen_ids.emplace(name, id);
    return id;
}

int CoframeContext::generator(const std::string& name) const {
    auto it = gen_ids.find(name);
    if (it == gen_ids.end()) throw std::runtime_error("unknown generator '" + name + "'");
    return it->second;
}

Form exterior_derivative(const Form& f, const CoframeContext& ctx) {
    Form r(f.degree() + 1);
    for (auto& [tuple, coeff] : f.terms()) {
        // d(coeff) ^ w^I
        for (int s : coeff.symbols()) {
            auto it = ctx.scalar_d.find(s);
            if (it == ctx.scalar_d.end())
                throw std::runtime_error("no exterior derivative registered for symbol '" +
                                         sym_name(s) + "'");
            Scalar ds = coeff.derivative(s);
            for (auto& [dt, dc] : it->second.terms()) {
                std::vector<int> ids = dt;
                ids.insert(ids.end(), tuple.begin(), tuple.end());
                r.add_term(std::move(ids), ds * dc);
            }
        }
        // coeff * sum_j (-1)^{j-1} w^{i_1} ^ .. ^ d(w^{i_j}) ^ .. ^ w^{i_k}
        for (size_t j = 0; j < tuple.size(); ++j) {
            auto it = ctx.structure.find(tuple[j]);
            if (it == ctx.structure.end())
                throw std::runtime_error("no structure equation for generator '" +
                                         ctx.gen_names.at(static_cast<size_t>(tuple[j])) + "'");
            int sign = (j % 2 == 0) ? 1 : -1;
            for (auto& [dt, dc] : it->second.terms()) {
                std::vector<int> ids;
                ids.reserve(tuple.size() + 1);
                ids.insert(ids.end(), tuple.begin(), tuple.begin() + static_cast<long>(j));
                ids.insert(ids.end(), dt.begin(), dt.end());
                ids.insert(ids.end(), tuple.begin() + static_cast<long>(j) + 1, tuple.end());
                Scalar c = coeff * dc;
                if (sign < 0) c = -c;
                r.add_term(std::move(ids), std::move(c));
            }
        }
    }
    if (ctx.first_bianchi) {
        Form reduced(r.degree());
        for (auto& [t, c] : r.terms()) reduced.add_term(t, reduce_first_bianchi(c));
        return reduced;
    }
    return r;
}

Form substitute(const Form& f, const std::map<int, Scalar>& assignment) {
    Form r(f.degree());
    for (auto& [t, c] : f.terms()) r.add_term(t, c.substitute(assignment));
    return r;
}

Form substitute_generators(const Form& f, const std::map<int, Form>& one_forms) {
    for (auto& [g, v] : one_forms) {
        (void)g;
        if (v.degree() != 1 && !v.is_zero())
            throw std::runtime_error("generator substitution requires 1-forms");
    }
    Form r(f.degree());
    for (auto& [tuple, coeff] : f.terms()) {
        std::vector<Form> factors;
        factors.reserve(tuple.size());
        for (int id : tuple) {
            auto it = one_forms.find(id);
            factors.push_back(it == one_forms.end() ? Form::generator(id) : it->second);
        }
        Form term = wedge_all(factors).scaled(coeff);
        if (term.is_zero()) continue;
        r += term;
    }
    return r;
}

std::string form_str(const Form& f, const CoframeContext& ctx) {
    if (f.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto& [tuple, coeff] : f.terms()) {
        std::string cs = coeff.str();
        bool negated = false;
        if (cs.size() > 1 && cs[0] == '-' && cs.find(" + ") == std::string::npos &&
            cs.find(" - ") == std::string::npos) {
            negated = true;
            cs = cs.substr(1);
        }
        if (first) {
            if (negated) out << "-";
        } else {
            out << (negated ? " - " : " + ");
        }
        first = false;
        bool wrap = cs.find(" + ") != std::string::npos || cs.find(" - ") != std::string::npos;
        bool print_coeff = !(cs == "1" && !tuple.empty());
        if (print_coeff) out << (wrap ? "(" + cs + ")" : cs);
        for (size_t k = 0; k < tuple.size(); ++k) {
            if (k > 0 || print_coeff) out << (k == 0 ? "*" : "^");
            out << ctx.gen_names.at(static_cast<size_t>(tuple[k]));
        }
    }
    return out.str();
}

} // namespace edslab
