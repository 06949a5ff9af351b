#include "edslab/pfaffian.hpp"

#include <algorithm>
#include <stdexcept>

namespace edslab {

namespace {

struct Classifier {
    std::map<int, int> theta_pos, omega_pos, pi_pos;
    explicit Classifier(const PfaffianPresentation& sys) {
        for (size_t k = 0; k < sys.theta.size(); ++k) theta_pos[sys.theta[k]] = static_cast<int>(k);
        for (size_t k = 0; k < sys.omega.size(); ++k) omega_pos[sys.omega[k]] = static_cast<int>(k);
        for (size_t k = 0; k < sys.pi.size(); ++k) pi_pos[sys.pi[k]] = static_cast<int>(k);
    }
};

// Coefficient rows of the shift map p -> (A p) antisymmetrised, indexed by
// (a, i < j) rows and flattened (e, i) columns.
RatMatrix shift_matrix(const PfaffianPresentation& sys, const TorsionTensor& tensor,
                       std::vector<std::tuple<int, int, int>>* row_index = nullptr) {
    int n = sys.n(), s0 = sys.s0(), npi = static_cast<int>(sys.pi.size());
    RatMatrix m;
    for (int a = 0; a < s0; ++a) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                RatVec row(static_cast<size_t>(npi * n), Rational(0));
                for (int e = 0; e < npi; ++e) {
                    row[static_cast<size_t>(e * n + j)] += tensor.a_coeff(a, e, i);
                    row[static_cast<size_t>(e * n + i)] -= tensor.a_coeff(a, e, j);
                }
                m.push_back(std::move(row));
                if (row_index) row_index->emplace_back(a, i, j);
            }
        }
    }
    return m;
}

} // namespace

RatMatrix shift_system(const PfaffianPresentation& sys, const TorsionTensor& tensor) {
    return shift_matrix(sys, tensor);
}

Rational TorsionTensor::a_coeff(int a, int e, int i) const {
    auto it = A.find({a, e, i});
    return it == A.end() ? Rational(0) : it->second;
}

Scalar TorsionTensor::c_coeff(int a, int i, int j) const {
    if (i == j) return Scalar();
    if (i > j) return -c_coeff(a, j, i);
    auto it = c.find({a, i, j});
    return it == c.end() ? Scalar() : it->second;
}

TorsionTensor extract_torsion(const PfaffianPresentation& sys) {
    Classifier cls(sys);
    TorsionTensor t;
    for (size_t a = 0; a < sys.theta.size(); ++a) {
        auto it = sys.structure.find(sys.theta[a]);
        if (it == sys.structure.end())
            throw std::runtime_error("missing structure equation for theta generator '" +
                                     sys.ctx.gen_names.at(static_cast<size_t>(sys.theta[a])) +
                                     "'");
        for (auto& [tuple, coeff] : it->second.terms()) {
            int g1 = tuple.at(0), g2 = tuple.at(1);
            // terms containing a theta generator are killed by the mod-theta reduction
            if (cls.theta_pos.count(g1) || cls.theta_pos.count(g2)) continue;
            bool p1 = cls.pi_pos.count(g1) != 0, p2 = cls.pi_pos.count(g2) != 0;
            if (p1 && p2)
                throw std::runtime_error(
                    "system is not linear: fiber-fiber term " +
                    sys.ctx.gen_names.at(static_cast<size_t>(g1)) + "^" +
                    sys.ctx.gen_names.at(static_cast<size_t>(g2)) + " in d(" +
                    sys.ctx.gen_names.at(static_cast<size_t>(sys.theta[a])) + ")");
            if (!p1 && !p2) {
                int i = cls.omega_pos.at(g1), j = cls.omega_pos.at(g2);
                if (i < j)
                    t.c[{static_cast<int>(a), i, j}] = coeff;
                else
                    t.c[{static_cast<int>(a), j, i}] = -coeff;
                continue;
            }
            int e = p1 ? cls.pi_pos.at(g1) : cls.pi_pos.at(g2);
            int i = p1 ? cls.omega_pos.at(g2) : cls.omega_pos.at(g1);
            Rational val;
            if (!coeff.is_constant())
                throw std::runtime_error("tableau coefficient is not constant: " + coeff.str());
            val = coeff.constant_value();
            if (!p1) val = -val; // omega ^ pi stored; A is the pi ^ omega coefficient
            if (val != 0) t.A[{static_cast<int>(a), e, i}] = val;
        }
    }
    return t;
}

AbsorptionSolution absorb_torsion(const PfaffianPresentation& sys, const TorsionTensor& tensor) {
    std::vector<std::tuple<int, int, int>> rows;
    RatMatrix m = shift_matrix(sys, tensor, &rows);
    ScalarVec b;
    for (auto& [a, i, j] : rows) b.push_back(-tensor.c_coeff(a, i, j));
    LinearSolveResult lin = solve_least_residual(m, b);
    AbsorptionSolution out;
    int n = sys.n();
    for (int e = 0; e < static_cast<int>(sys.pi.size()); ++e)
        for (int i = 0; i < n; ++i) {
            size_t idx = static_cast<size_t>(e * n + i);
            if (idx >= lin.x.size()) continue; // no constraint touched this shift
            const Scalar& v = lin.x[idx];
            if (!v.is_zero()) out.p[{e, i}] = v;
        }
    for (size_t r = 0; r < rows.size(); ++r) {
        // c-tilde = c + M p = -(b - M p)
        Scalar res = -lin.residual[r];
        if (!res.is_zero()) out.residual[rows[r]] = res;
    }
    return out;
}

AbsorptionSolution apply_shift(const PfaffianPresentation& sys, const TorsionTensor& tensor,
                               const std::map<std::pair<int, int>, Scalar>& p) {
    AbsorptionSolution out;
    out.p = p;
    auto pval = [&](int e, int i) {
        auto it = p.find({e, i});
        return it == p.end() ? Scalar() : it->second;
    };
    int n = sys.n(), npi = static_cast<int>(sys.pi.size());
    for (int a = 0; a < sys.s0(); ++a)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                Scalar c = tensor.c_coeff(a, i, j);
                for (int e = 0; e < npi; ++e) {
                    c += pval(e, j).scaled(tensor.a_coeff(a, e, i));
                    c -= pval(e, i).scaled(tensor.a_coeff(a, e, j));
                }
                if (!c.is_zero()) out.residual[{a, i, j}] = c;
            }
    return out;
}

bool same_torsion_class(const PfaffianPresentation& sys, const TorsionTensor& tensor,
                        const AbsorptionSolution& r1, const AbsorptionSolution& r2) {
    std::vector<std::tuple<int, int, int>> rows;
    RatMatrix m = shift_matrix(sys, tensor, &rows);
    ScalarVec diff;
    auto get = [](const AbsorptionSolution& s, const std::tuple<int, int, int>& key) {
        auto it = s.residual.find(key);
        return it == s.residual.end() ? Scalar() : it->second;
    };
    for (auto& key : rows) diff.push_back(get(r1, key) - get(r2, key));
    LinearSolveResult lin = solve_least_residual(m, diff);
    for (auto& r : lin.residual)
        if (!r.is_zero()) return false;
    return true;
}

Form reconstruct_structure(const PfaffianPresentation& sys, const TorsionTensor& tensor, int a,
                           const AbsorptionSolution* shift) {
    int n = sys.n(), npi = static_cast<int>(sys.pi.size());
    Form out(2);
    for (int e = 0; e < npi; ++e)
        for (int i = 0; i < n; ++i) {
            Rational A = tensor.a_coeff(a, e, i);
            if (A == 0) continue;
            out.add_term({sys.pi[static_cast<size_t>(e)], sys.omega[static_cast<size_t>(i)]},
                         Scalar(A));
            if (shift) {
                // shifted fiber form pi + p omega, expanded back onto the coframe
                for (int j = 0; j < n; ++j) {
                    auto it = shift->p.find({e, j});
                    if (it == shift->p.end()) continue;
                    out.add_term({sys.omega[static_cast<size_t>(j)],
                                  sys.omega[static_cast<size_t>(i)]},
                                 it->second.scaled(A));
                }
            }
        }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Scalar c = shift ? (shift->residual.count({a, i, j})
                                    ? shift->residual.at({a, i, j})
                                    : Scalar())
                             : tensor.c_coeff(a, i, j);
            if (!c.is_zero())
                out.add_term({sys.omega[static_cast<size_t>(i)],
                              sys.omega[static_cast<size_t>(j)]},
                             c);
        }
    return out;
}

namespace {

// Relation rows restricted to their pi components.
ScalarMatrix relation_rows(const PfaffianPresentation& sys) {
    ScalarMatrix rel;
    for (auto& r : sys.relations) {
        ScalarVec row;
        for (int g : sys.pi) {
            auto it = r.find(g);
            row.push_back(it == r.end() ? Scalar() : it->second);
        }
        rel.push_back(std::move(row));
    }
    return rel;
}

} // namespace

CharacterVector reduced_characters(const PfaffianPresentation& sys, const TorsionTensor& tensor,
                                   const std::vector<std::uint64_t>& seeds) {
    int n = sys.n(), s0 = sys.s0(), npi = static_cast<int>(sys.pi.size());
    ScalarMatrix rel = relation_rows(sys);
    int rel_rank = rel.empty() ? 0 : generic_rank(rel);

    std::vector<int> agreed;
    bool have = false;
    for (std::uint64_t seed : seeds) {
        RationalSampler sampler(seed);
        RatMatrix sigma = random_invertible(n, sampler);
        std::vector<int> s;
        int prev = 0;
        ScalarMatrix acc = rel;
        for (int col = 0; col < n; ++col) {
            for (int a = 0; a < s0; ++a) {
                ScalarVec row(static_cast<size_t>(npi));
                for (int e = 0; e < npi; ++e) {
                    Rational v = 0;
                    for (int j = 0; j < n; ++j)
                        v += sigma[static_cast<size_t>(col)][static_cast<size_t>(j)] *
                             tensor.a_coeff(a, e, j);
                    row[static_cast<size_t>(e)] = Scalar(v);
                }
                acc.push_back(std::move(row));
            }
            int r = (acc.empty() || npi == 0) ? 0 : generic_rank(acc) - rel_rank;
            s.push_back(r - prev);
            prev = r;
        }
        if (!have) {
            agreed = s;
            have = true;
        } else if (s != agreed) {
            throw std::runtime_error("reduced characters disagree across seeds");
        }
    }
    CharacterVector out;
    out.s = agreed;
    for (size_t k = 0; k < agreed.size(); ++k) {
        out.sum += agreed[k];
        out.weighted += static_cast<int>(k + 1) * agreed[k];
    }
    return out;
}

int degree_of_indeterminacy(const PfaffianPresentation& sys, const TorsionTensor& tensor,
                            const std::vector<std::uint64_t>& seeds) {
    int n = sys.n(), npi = static_cast<int>(sys.pi.size());
    int unknowns = npi * n;
    ScalarMatrix m;
    for (auto& row : shift_matrix(sys, tensor)) {
        ScalarVec srow;
        srow.reserve(row.size());
        for (auto& v : row) srow.push_back(Scalar(v));
        m.push_back(std::move(srow));
    }
    // shifted fiber forms must keep every registered relation intact
    for (auto& r : sys.relations) {
        for (int i = 0; i < n; ++i) {
            ScalarVec row(static_cast<size_t>(unknowns));
            for (int e = 0; e < npi; ++e) {
                auto it = r.find(sys.pi[static_cast<size_t>(e)]);
                if (it != r.end()) row[static_cast<size_t>(e * n + i)] = it->second;
            }
            m.push_back(std::move(row));
        }
    }
    if (m.empty()) return unknowns;
    return unknowns - generic_rank(m, seeds);
}

InvolutivityVerdict involutivity_verdict(const PfaffianPresentation& sys,
                                         const TorsionTensor& tensor,
                                         const AbsorptionSolution& absorbed) {
    InvolutivityVerdict v;
    v.torsion_free = true;
    for (auto& [key, val] : absorbed.residual) {
        (void)key;
        if (!val.is_zero()) v.torsion_free = false;
    }
    v.characters = reduced_characters(sys, tensor);
    v.weighted_characters = v.characters.weighted;
    v.r1 = degree_of_indeterminacy(sys, tensor);
    v.involutive = v.torsion_free && v.weighted_characters == v.r1;
    return v;
}

} // namespace edslab
