#include "edslab/scalar.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace edslab {

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
    int da = 0, db = 0;
    for (auto& [s, e] : a) da += e;
    for (auto& [s, e] : b) db += e;
    if (da != db) return da < db;
    // lex over exponent vectors: a positive exponent at a smaller symbol id wins
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first != b[j].first) return a[i].first > b[j].first;
        if (a[i].second != b[j].second) return a[i].second < b[j].second;
        ++i;
        ++j;
    }
    return i == a.size() && j != b.size();
}

Scalar::Scalar(const Rational& c) {
    if (c != 0) terms_.emplace(Monomial{}, c);
}

Scalar Scalar::variable(int symbol_id) {
    Scalar s;
    s.terms_.emplace(Monomial{{symbol_id, 1}}, Rational(1));
    return s;
}

bool Scalar::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Rational Scalar::constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw std::runtime_error("Scalar is not constant: " + str());
    return terms_.begin()->second;
}

Scalar Scalar::operator-() const {
    Scalar r;
    for (auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    for (auto& [m, c] : o.terms_) {
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) { return *this += -o; }

Monomial monomial_mul(const Monomial& a, const Monomial& b) {
    Monomial r;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            r.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            r.push_back(b[j++]);
        } else {
            r.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return r;
}

Scalar operator*(const Scalar& a, const Scalar& b) {
    Scalar r;
    for (auto& [ma, ca] : a.terms_) {
        for (auto& [mb, cb] : b.terms_) {
            Monomial m = monomial_mul(ma, mb);
            auto it = r.terms_.find(m);
            if (it == r.terms_.end()) {
                r.terms_.emplace(std::move(m), ca * cb);
            } else {
                it->second += ca * cb;
                if (it->second == 0) r.terms_.erase(it);
            }
        }
    }
    return r;
}

Scalar Scalar::scaled(const Rational& c) const {
    Scalar r;
    if (c == 0) return r;
    for (auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
    return r;
}

Scalar Scalar::pow(int n) const {
    if (n < 0) throw std::runtime_error("negative power of Scalar");
    Scalar r(Rational(1));
    for (int i = 0; i < n; ++i) r = r * *this;
    return r;
}

Scalar Scalar::derivative(int symbol_id) const {
    Scalar r;
    for (auto& [m, c] : terms_) {
        for (size_t k = 0; k < m.size(); ++k) {
            if (m[k].first != symbol_id) continue;
            Monomial d = m;
            Rational coeff = c * m[k].second;
            if (d[k].second == 1) {
                d.erase(d.begin() + static_cast<long>(k));
            } else {
                d[k].second -= 1;
            }
            auto it = r.terms_.find(d);
            if (it == r.terms_.end()) {
                r.terms_.emplace(std::move(d), coeff);
            } else {
                it->second += coeff;
                if (it->second == 0) r.terms_.erase(it);
            }
        }
    }
    return r;
}

Scalar Scalar::substitute(const std::map<int, Scalar>& assignment) const {
    for (auto& [s, v] : assignment) {
        for (int used : v.symbols()) {
            if (assignment.count(used))
                throw std::runtime_error("cyclic substitution through symbol '" + sym_name(used) + "'");
        }
        (void)s;
    }
    Scalar r;
    for (auto& [m, c] : terms_) {
        Scalar term(c);
        for (auto& [s, e] : m) {
            auto it = assignment.find(s);
            if (it == assignment.end()) {
                term = term * Scalar::variable(s).pow(e);
            } else {
                term = term * it->second.pow(e);
            }
        }
        r += term;
    }
    return r;
}

Rational Scalar::evaluate(const std::map<int, Rational>& point) const {
    Rational r = 0;
    for (auto& [m, c] : terms_) {
        Rational t = c;
        for (auto& [s, e] : m) {
            auto it = point.find(s);
            if (it == point.end())
                throw std::runtime_error("evaluate: no value for symbol '" + sym_name(s) + "'");
            Rational p = 1;
            for (int k = 0; k < e; ++k) p *= it->second;
            t *= p;
        }
        r += t;
    }
    return r;
}

Scalar Scalar::linear_coefficient(int symbol_id) const {
    Scalar r;
    for (auto& [m, c] : terms_) {
        for (size_t k = 0; k < m.size(); ++k) {
            if (m[k].first != symbol_id) continue;
            if (m[k].second > 1)
                throw std::runtime_error("not linear in '" + sym_name(symbol_id) + "': " + str());
            Monomial d = m;
            d.erase(d.begin() + static_cast<long>(k));
            r.set_term(d, c);
        }
    }
    return r;
}

std::set<int> Scalar::symbols() const {
    std::set<int> s;
    for (auto& [m, c] : terms_)
        for (auto& [id, e] : m) s.insert(id);
    return s;
}

int Scalar::total_degree() const {
    int d = 0;
    for (auto& [m, c] : terms_) {
        int t = 0;
        for (auto& [s, e] : m) t += e;
        d = std::max(d, t);
    }
    return d;
}

int Scalar::degree_in(int symbol_id) const {
    int d = 0;
    for (auto& [m, c] : terms_)
        for (auto& [s, e] : m)
            if (s == symbol_id) d = std::max(d, e);
    return d;
}

void Scalar::set_term(const Monomial& m, const Rational& c) {
    if (c == 0) {
        terms_.erase(m);
    } else {
        auto it = terms_.find(m);
        if (it == terms_.end())
            terms_.emplace(m, c);
        else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }
}

std::string Scalar::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    // print highest-order terms first
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        Rational a = c;
        if (first) {
            if (a < 0) {
                out << "-";
                a = -a;
            }
        } else {
            out << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool need_star = false;
        if (a != 1 || m.empty()) {
            out << to_string(a);
            need_star = true;
        }
        for (auto& [s, e] : m) {
            if (need_star) out << "*";
            need_star = true;
            out << sym_name(s);
            if (e > 1) out << "^" << e;
        }
    }
    return out.str();
}

} // namespace edslab
