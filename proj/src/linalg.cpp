#include "edslab/linalg.hpp"

#include <map>
#include <set>
#include <stdexcept>

namespace edslab {

namespace {

size_t cols_of(const RatMatrix& a) {
    size_t n = 0;
    for (auto& row : a) n = std::max(n, row.size());
    return n;
}

// Row echelon form in place; returns the pivot column of each pivot row.
std::vector<size_t> echelon(RatMatrix& a) {
    size_t m = a.size(), n = cols_of(a);
    for (auto& row : a) row.resize(n, Rational(0));
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < n && r < m; ++c) {
        size_t p = r;
        while (p < m && a[p][c] == 0) ++p;
        if (p == m) continue;
        std::swap(a[r], a[p]);
        Rational inv = a[r][c];
        for (size_t j = c; j < n; ++j) a[r][j] /= inv;
        for (size_t i = 0; i < m; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (size_t j = c; j < n; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace

int rank(RatMatrix a) { return static_cast<int>(echelon(a).size()); }

Scalar determinant(const ScalarMatrix& m) {
    size_t n = m.size();
    if (n == 0) return Scalar(1);
    if (n == 1) return m[0][0];
    Scalar acc;
    for (size_t c = 0; c < n; ++c) {
        if (m[0][c].is_zero()) continue;
        ScalarMatrix minor;
        minor.reserve(n - 1);
        for (size_t r = 1; r < n; ++r) {
            ScalarVec row;
            row.reserve(n - 1);
            for (size_t j = 0; j < n; ++j)
                if (j != c) row.push_back(m[r][j]);
            minor.push_back(std::move(row));
        }
        Scalar term = m[0][c] * determinant(minor);
        if (c % 2 == 1) term = -term;
        acc += term;
    }
    return acc;
}

std::vector<RatVec> nullspace(RatMatrix a) {
    size_t n = cols_of(a);
    std::vector<size_t> pivots = echelon(a);
    std::set<size_t> pivot_set(pivots.begin(), pivots.end());
    std::vector<RatVec> basis;
    for (size_t f = 0; f < n; ++f) {
        if (pivot_set.count(f)) continue;
        RatVec v(n, Rational(0));
        v[f] = 1;
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<int> prefix_column_ranks(const RatMatrix& a) {
    size_t n = cols_of(a);
    std::vector<int> ranks(n + 1, 0);
    for (size_t k = 1; k <= n; ++k) {
        RatMatrix sub;
        sub.reserve(a.size());
        for (auto& row : a) {
            RatVec r(row.begin(), row.begin() + static_cast<long>(std::min(k, row.size())));
            sub.push_back(std::move(r));
        }
        ranks[k] = rank(std::move(sub));
    }
    return ranks;
}

LinearSolveResult solve_least_residual(const RatMatrix& a, const ScalarVec& b) {
    size_t m = a.size(), n = cols_of(a);
    if (b.size() != m) throw std::runtime_error("solve: matrix/vector size mismatch");
    RatMatrix w = a;
    for (auto& row : w) row.resize(n, Rational(0));
    ScalarVec rhs = b;
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < n && r < m; ++c) {
        size_t p = r;
        while (p < m && w[p][c] == 0) ++p;
        if (p == m) continue;
        std::swap(w[r], w[p]);
        std::swap(rhs[r], rhs[p]);
        Rational inv = w[r][c];
        for (size_t j = c; j < n; ++j) w[r][j] /= inv;
        rhs[r] = rhs[r].scaled(Rational(1) / inv);
        for (size_t i = 0; i < m; ++i) {
            if (i == r || w[i][c] == 0) continue;
            Rational f = w[i][c];
            for (size_t j = c; j < n; ++j) w[i][j] -= f * w[r][j];
            rhs[i] -= rhs[r].scaled(f);
        }
        pivots.push_back(c);
        ++r;
    }
    LinearSolveResult out;
    out.x.assign(n, Scalar());
    for (size_t i = 0; i < pivots.size(); ++i) out.x[pivots[i]] = rhs[i];
    out.residual.assign(m, Scalar());
    for (size_t i = 0; i < m; ++i) {
        Scalar acc = b[i];
        for (size_t j = 0; j < std::min(n, a[i].size()); ++j) {
            if (a[i][j] != 0 && !out.x[j].is_zero()) acc -= out.x[j].scaled(a[i][j]);
        }
        out.residual[i] = acc;
    }
    return out;
}

RatMatrix sample_matrix(const ScalarMatrix& m, RationalSampler& sampler) {
    std::set<int> syms;
    for (auto& row : m)
        for (auto& e : row)
            for (int s : e.symbols()) syms.insert(s);
    std::map<int, Rational> point;
    for (int s : syms) point.emplace(s, sampler.next_signed());
    RatMatrix out;
    out.reserve(m.size());
    for (auto& row : m) {
        RatVec r;
        r.reserve(row.size());
        for (auto& e : row) r.push_back(e.evaluate(point));
        out.push_back(std::move(r));
    }
    return out;
}

int generic_rank(const ScalarMatrix& m, const std::vector<std::uint64_t>& seeds) {
    int agreed = -1;
    for (std::uint64_t seed : seeds) {
        RationalSampler sampler(seed);
        int r = rank(sample_matrix(m, sampler));
        if (agreed == -1) {
            agreed = r;
        } else if (r != agreed) {
            throw std::runtime_error("generic rank disagrees across seeds (" +
                                     std::to_string(agreed) + " vs " + std::to_string(r) + ")");
        }
    }
    return agreed;
}

std::vector<int> generic_prefix_column_ranks(const ScalarMatrix& m,
                                             const std::vector<std::uint64_t>& seeds) {
    std::vector<int> agreed;
    bool have = false;
    for (std::uint64_t seed : seeds) {
        RationalSampler sampler(seed);
        std::vector<int> r = prefix_column_ranks(sample_matrix(m, sampler));
        if (!have) {
            agreed = r;
            have = true;
        } else if (r != agreed) {
            throw std::runtime_error("generic column ranks disagree across seeds");
        }
    }
    return agreed;
}

RatMatrix random_invertible(int n, RationalSampler& sampler) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        RatMatrix m(static_cast<size_t>(n), RatVec(static_cast<size_t>(n)));
        for (auto& row : m)
            for (auto& e : row) e = sampler.next_signed();
        if (rank(m) == n) return m;
    }
    throw std::runtime_error("failed to draw an invertible matrix");
}

RatMatrix matmul(const RatMatrix& a, const RatMatrix& b) {
    size_t m = a.size(), k = cols_of(a), n = cols_of(b);
    if (b.size() != k) throw std::runtime_error("matmul: size mismatch");
    RatMatrix c(m, RatVec(n, Rational(0)));
    for (size_t i = 0; i < m; ++i)
        for (size_t t = 0; t < a[i].size(); ++t) {
            if (a[i][t] == 0) continue;
            for (size_t j = 0; j < b[t].size(); ++j) c[i][j] += a[i][t] * b[t][j];
        }
    return c;
}

} // namespace edslab
