#include "edslab/eds.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace edslab {

namespace {

void for_each_combination(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
    if (k < 0 || k > n) return;
    std::vector<int> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
}

Scalar normalise_monic(const Scalar& s) {
    if (s.is_zero()) return s;
    Rational lead = s.terms().rbegin()->second;
    return s.scaled(Rational(1) / lead);
}

} // namespace

int IntegralElementChart::lambda(int a, int fiber_id) const {
    auto it = lambda_ids.find({a, fiber_id});
    if (it == lambda_ids.end()) throw std::runtime_error("chart has no such lambda coordinate");
    return it->second;
}

Scalar IntegralElementChart::component(int a, int g) const {
    if (base.at(static_cast<size_t>(a)) == g) return Scalar(1);
    auto it = lambda_ids.find({a, g});
    if (it == lambda_ids.end()) return Scalar();
    return Scalar::variable(it->second).substitute(reduction);
}

std::vector<std::map<int, Scalar>> IntegralElementChart::vectors() const {
    std::vector<std::map<int, Scalar>> vs;
    for (int a = 0; a < p(); ++a) {
        std::map<int, Scalar> v;
        v.emplace(base[static_cast<size_t>(a)], Scalar(1));
        for (int f : fiber) {
            Scalar c = component(a, f);
            if (!c.is_zero()) v.emplace(f, std::move(c));
        }
        vs.push_back(std::move(v));
    }
    return vs;
}

IntegralElementChart make_chart(const ExteriorSystem& sys, const std::string& prefix) {
    if (sys.independence.terms().empty())
        throw std::runtime_error("independence form is zero");
    IntegralElementChart chart;
    chart.dim = sys.ctx.dim();
    // base directions: the generators of the leading independence monomial
    chart.base = sys.independence.terms().begin()->first;
    std::set<int> base_set(chart.base.begin(), chart.base.end());
    for (int g = 0; g < chart.dim; ++g)
        if (!base_set.count(g)) chart.fiber.push_back(g);
    for (int a = 0; a < chart.p(); ++a) {
        for (int f : chart.fiber) {
            std::string name = prefix + std::to_string(a + 1) + "_" +
                               sys.ctx.gen_names.at(static_cast<size_t>(f));
            chart.lambda_ids.emplace(std::pair{a, f}, sym(name));
        }
    }
    return chart;
}

FlagChart generic_flag(int p, std::uint64_t seed) {
    RationalSampler sampler(seed);
    RatMatrix g = random_invertible(p, sampler);
    FlagChart flag;
    for (auto& row : g) {
        ScalarVec r;
        for (auto& e : row) r.push_back(Scalar(e));
        flag.coeff.push_back(std::move(r));
    }
    return flag;
}

std::array<Scalar, 4> flag_minors(const FlagChart& flag) {
    if (flag.coeff.size() < 3) throw std::runtime_error("flag minors need three flag vectors");
    auto minor = [&](std::array<int, 3> cols) {
        ScalarMatrix m(3, ScalarVec(3));
        for (size_t r = 0; r < 3; ++r)
            for (size_t c = 0; c < 3; ++c)
                m[r][c] = flag.coeff[r].at(static_cast<size_t>(cols[c]));
        return determinant(m);
    };
    return {minor({0, 1, 2}), minor({0, 1, 3}), minor({1, 2, 3}), minor({0, 2, 3})};
}

Scalar evaluate_on(const Form& f, const std::vector<std::map<int, Scalar>>& vectors) {
    if (static_cast<int>(vectors.size()) != f.degree())
        throw std::runtime_error("form degree does not match the number of vectors");
    Scalar acc;
    size_t k = vectors.size();
    for (auto& [tuple, coeff] : f.terms()) {
        ScalarMatrix m(k, ScalarVec(k));
        for (size_t r = 0; r < k; ++r)
            for (size_t c = 0; c < k; ++c) {
                auto it = vectors[r].find(tuple[c]);
                m[r][c] = it == vectors[r].end() ? Scalar() : it->second;
            }
        acc += coeff * determinant(m);
    }
    return acc;
}

std::vector<Form> ideal_in_degree(const ExteriorSystem& sys, int q) {
    std::vector<Form> source = sys.generators;
    for (auto& g : sys.generators)
        if (g.degree() + 1 <= q && !g.is_zero()) source.push_back(exterior_derivative(g, sys.ctx));
    std::vector<Form> out;
    int n = sys.ctx.dim();
    for (auto& g : source) {
        if (g.is_zero()) continue;
        int d = g.degree();
        if (d == q) {
            out.push_back(g);
        } else if (d < q) {
            for_each_combination(n, q - d, [&](const std::vector<int>& pad) {
                Form mono(q - d);
                mono.add_term(pad, Scalar(1));
                Form w = wedge(g, mono);
                if (!w.is_zero()) out.push_back(std::move(w));
            });
        }
    }
    return out;
}

std::vector<Scalar> integral_element_equations(const ExteriorSystem& sys,
                                               const IntegralElementChart& chart) {
    if (chart.dim != sys.ctx.dim())
        throw std::runtime_error("chart and system are over different coframes");
    int p = sys.p();
    if (chart.p() != p)
        throw std::runtime_error("chart dimension does not match the independence condition");
    auto vs = chart.vectors();
    std::set<Scalar> seen;
    std::vector<Scalar> eqs;
    std::vector<Form> forms = sys.generators;
    for (auto& g : sys.generators)
        if (!g.is_zero() && g.degree() + 1 <= p) forms.push_back(exterior_derivative(g, sys.ctx));
    for (auto& f : forms) {
        if (f.is_zero() || f.degree() > p) continue;
        for_each_combination(p, f.degree(), [&](const std::vector<int>& subset) {
            std::vector<std::map<int, Scalar>> sel;
            for (int i : subset) sel.push_back(vs[static_cast<size_t>(i)]);
            Scalar eq = normalise_monic(evaluate_on(f, sel));
            if (!eq.is_zero() && seen.insert(eq).second) eqs.push_back(eq);
        });
    }
    return eqs;
}

bool equations_inconsistent(const std::vector<Scalar>& eqs) {
    for (auto& e : eqs)
        if (e.is_constant() && !e.is_zero()) return true;
    return false;
}

int solution_codimension(const std::vector<Scalar>& eqs) {
    if (equations_inconsistent(eqs)) throw std::runtime_error("inconsistent equation set");
    std::set<int> syms;
    for (auto& e : eqs) {
        if (e.total_degree() > 1) throw std::runtime_error("equations are not linear: " + e.str());
        for (int s : e.symbols()) syms.insert(s);
    }
    std::vector<int> cols(syms.begin(), syms.end());
    ScalarMatrix m;
    for (auto& e : eqs) {
        ScalarVec row;
        for (int s : cols) row.push_back(e.linear_coefficient(s));
        m.push_back(std::move(row));
    }
    if (m.empty() || cols.empty()) return 0;
    return generic_rank(m);
}

void apply_constraints(IntegralElementChart& chart, const std::vector<Scalar>& eqs) {
    std::set<int> lambda_syms;
    for (auto& [key, id] : chart.lambda_ids) {
        (void)key;
        lambda_syms.insert(id);
    }
    for (const Scalar& raw : eqs) {
        Scalar eq = raw.substitute(chart.reduction);
        if (eq.is_zero()) continue;
        int pivot = -1;
        Rational coef;
        for (int s : eq.symbols()) {
            if (!lambda_syms.count(s) || eq.degree_in(s) != 1) continue;
            Scalar c = eq.linear_coefficient(s);
            if (c.is_constant() && !c.is_zero()) {
                pivot = s;
                coef = c.constant_value();
                break;
            }
        }
        if (pivot < 0)
            throw std::runtime_error("cannot solve constraint for a chart coordinate: " + eq.str());
        Scalar expr =
            (Scalar::variable(pivot).scaled(coef) - eq).scaled(Rational(1) / coef);
        std::map<int, Scalar> one{{pivot, expr}};
        for (auto& [k, v] : chart.reduction) {
            (void)k;
            v = v.substitute(one);
        }
        chart.reduction[pivot] = expr;
    }
}

PolarMatrix polar_space(const ExteriorSystem& sys, const IntegralElementChart& chart,
                        const FlagChart& flag) {
    int k = static_cast<int>(flag.size());
    auto vs = chart.vectors();
    // flag vectors in generator components
    std::vector<std::map<int, Scalar>> es;
    for (size_t i = 0; i < flag.size(); ++i) {
        std::map<int, Scalar> e;
        for (size_t a = 0; a < vs.size(); ++a) {
            const Scalar& c = flag.coeff[i].at(a);
            if (c.is_zero()) continue;
            for (auto& [g, comp] : vs[a]) {
                Scalar add = c * comp;
                auto it = e.find(g);
                if (it == e.end())
                    e.emplace(g, std::move(add));
                else {
                    it->second += add;
                    if (it->second.is_zero()) e.erase(it);
                }
            }
        }
        es.push_back(std::move(e));
    }

    PolarMatrix out;
    out.columns = chart.fiber;
    int dim = chart.dim;

    auto add_rows = [&](const Form& f, const std::vector<std::map<int, Scalar>>& args) {
        // full covector over every generator direction
        ScalarVec w(static_cast<size_t>(dim));
        for (int g = 0; g < dim; ++g) {
            std::vector<std::map<int, Scalar>> sel;
            sel.push_back({{g, Scalar(1)}});
            sel.insert(sel.end(), args.begin(), args.end());
            w[static_cast<size_t>(g)] = evaluate_on(f, sel);
        }
        bool all_zero = true;
        for (auto& e : w)
            if (!e.is_zero()) all_zero = false;
        if (all_zero) return;
        // a polar covector must annihilate the integral plane itself
        for (auto& v : vs) {
            Scalar pairing;
            for (auto& [g, comp] : v) pairing += w[static_cast<size_t>(g)] * comp;
            if (!pairing.is_zero())
                throw std::runtime_error("flag does not lie inside an integral element");
        }
        ScalarVec row;
        row.reserve(chart.fiber.size());
        for (int f_id : chart.fiber) row.push_back(w[static_cast<size_t>(f_id)]);
        out.rows.push_back(std::move(row));
    };

    // generators and their derivatives on every subset of the right size
    std::vector<Form> source = sys.generators;
    for (auto& g : sys.generators)
        if (!g.is_zero() && g.degree() + 1 <= k + 1)
            source.push_back(exterior_derivative(g, sys.ctx));
    for (auto& f : source) {
        if (f.is_zero() || f.degree() > k + 1 || f.degree() < 1) continue;
        for_each_combination(k, f.degree() - 1, [&](const std::vector<int>& subset) {
            std::vector<std::map<int, Scalar>> args;
            for (int i : subset) args.push_back(es[static_cast<size_t>(i)]);
            add_rows(f, args);
        });
    }
    // algebraic padding up to degree k+1, evaluated against the full flag
    for (auto& f : ideal_in_degree(sys, k + 1)) {
        if (f.degree() != k + 1) continue;
        add_rows(f, es);
    }
    return out;
}

int polar_rank(const PolarMatrix& m) {
    if (m.rows.empty() || m.columns.empty()) return 0;
    return generic_rank(m.rows);
}

std::vector<int> cartan_characters(const ExteriorSystem& sys, const IntegralElementChart& chart,
                                   const FlagChart& flag) {
    int p = sys.p();
    if (static_cast<int>(flag.size()) < p - 1)
        throw std::runtime_error("cartan characters need a full flag");
    std::vector<int> c;
    for (int k = 0; k < p; ++k) {
        FlagChart partial;
        partial.coeff.assign(flag.coeff.begin(), flag.coeff.begin() + k);
        c.push_back(polar_rank(polar_space(sys, chart, partial)));
    }
    c.push_back(chart.dim - p);
    return c;
}

CartanTestResult cartan_test(const ExteriorSystem& sys, const IntegralElementChart& chart,
                             const FlagChart& flag) {
    CartanTestResult res;
    IntegralElementChart raw = chart;
    raw.reduction.clear();
    res.codim = solution_codimension(integral_element_equations(sys, raw));
    res.characters = cartan_characters(sys, chart, flag);
    for (size_t k = 0; k + 1 < res.characters.size(); ++k) res.sum_ck += res.characters[k];
    res.passes = res.sum_ck == res.codim;
    return res;
}

} // namespace edslab
