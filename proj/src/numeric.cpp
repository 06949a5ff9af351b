#include "edslab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace edslab {

namespace {

std::string point_str(const std::vector<double>& p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ")";
    return os.str();
}

// sign of the permutation sorting idx ascending; 0 on a repeated index
int perm_sign(std::vector<int> idx) {
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            if (idx[i] == idx[j]) return 0;
            if (idx[i] > idx[j]) {
                std::swap(idx[i], idx[j]);
                sign = -sign;
            }
        }
    return sign;
}

using ExprMatrix = std::vector<std::vector<ExprField>>;

ExprField matrix_det(const ExprMatrix& m) {
    std::size_t n = m.size();
    if (n == 0) return ExprField(1);
    if (n == 1) return m[0][0];
    ExprField det;
    for (std::size_t j = 0; j < n; ++j) {
        ExprMatrix minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<ExprField> row;
            for (std::size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        ExprField term = m[0][j] * matrix_det(minor);
        det = (j % 2 == 0) ? det + term : det - term;
    }
    return det;
}

ExprMatrix matrix_inverse(const ExprMatrix& m) {
    std::size_t n = m.size();
    ExprField det = matrix_det(m);
    ExprMatrix inv(n, std::vector<ExprField>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            ExprMatrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<ExprField> row;
                for (std::size_t c = 0; c < n; ++c)
                    if (c != i) row.push_back(m[r][c]);
                minor.push_back(std::move(row));
            }
            ExprField cof = matrix_det(minor);
            inv[i][j] = ((i + j) % 2 == 0) ? cof / det : -cof / det;
        }
    return inv;
}

} // namespace

MetricField MetricField::euclidean(int dim) {
    MetricField m;
    m.dim = dim;
    m.g.assign(static_cast<std::size_t>(dim),
               std::vector<ExprField>(static_cast<std::size_t>(dim)));
    for (int i = 0; i < dim; ++i) m.g[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = ExprField(1);
    return m;
}

MetricField MetricField::from_coframe(const NumericCoframe& c) {
    int n = c.dim();
    MetricField m;
    m.dim = n;
    m.g.assign(static_cast<std::size_t>(n), std::vector<ExprField>(static_cast<std::size_t>(n)));
    for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
            ExprField s;
            for (int a = 0; a < n; ++a)
                s += c.eps[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)] *
                     c.eps[static_cast<std::size_t>(a)][static_cast<std::size_t>(nu)];
            m.g[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)] = s;
        }
    return m;
}

std::vector<std::vector<double>> MetricField::eval(const std::vector<double>& point) const {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(dim),
                                         std::vector<double>(static_cast<std::size_t>(dim)));
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(point);
    // nondegeneracy guard
    std::vector<std::vector<double>> lu = out;
    double det = 1;
    int n = dim;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(lu[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
                std::abs(lu[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
                piv = r;
        if (piv != col) {
            std::swap(lu[static_cast<std::size_t>(piv)], lu[static_cast<std::size_t>(col)]);
            det = -det;
        }
        double d = lu[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        det *= d;
        if (d == 0) break;
        for (int r = col + 1; r < n; ++r) {
            double f = lu[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / d;
            for (int c2 = col; c2 < n; ++c2)
                lu[static_cast<std::size_t>(r)][static_cast<std::size_t>(c2)] -=
                    f * lu[static_cast<std::size_t>(col)][static_cast<std::size_t>(c2)];
        }
    }
    if (std::abs(det) <= 1e-12)
        throw NumericError("metric degenerate at " + point_str(point));
    return out;
}

std::vector<std::vector<ExprField>> MetricField::inverse() const { return matrix_inverse(g); }
ExprField MetricField::determinant() const { return matrix_det(g); }

double NumericCoframe::orthonormality_residual(const MetricField& m,
                                               const std::vector<double>& point) const {
    int n = dim();
    double worst = 0;
    for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
            double s = 0;
            for (int a = 0; a < n; ++a)
                s += eps[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)].eval(point) *
                     eps[static_cast<std::size_t>(a)][static_cast<std::size_t>(nu)].eval(point);
            s -= m.g[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)].eval(point);
            worst = std::max(worst, std::abs(s));
        }
    return worst;
}

SampleSet grid_samples(int dim, int per_axis, double lo, double hi) {
    double step = (hi - lo) / per_axis;
    double shift = step * (0.5 + 3.0 / 64.0); // off the coordinate hyperplanes
    std::vector<double> axis;
    for (int i = 0; i < per_axis; ++i) axis.push_back(lo + shift + i * step);
    SampleSet s;
    std::vector<int> odo(static_cast<std::size_t>(dim), 0);
    for (;;) {
        std::vector<double> p;
        for (int d = 0; d < dim; ++d) p.push_back(axis[static_cast<std::size_t>(odo[static_cast<std::size_t>(d)])]);
        s.points.push_back(std::move(p));
        int d = 0;
        while (d < dim && ++odo[static_cast<std::size_t>(d)] == per_axis) {
            odo[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        if (d == dim) break;
    }
    return s;
}

SampleSet random_samples(int dim, int count, std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    SampleSet s;
    for (int i = 0; i < count; ++i) {
        std::vector<double> p;
        for (int d = 0; d < dim; ++d) p.push_back(u(rng));
        s.points.push_back(std::move(p));
    }
    return s;
}

FieldForm::FieldForm(int dim, int degree) : dim_(dim), degree_(degree) {}

void FieldForm::add_term(std::vector<int> idx, const ExprField& c) {
    if (static_cast<int>(idx.size()) != degree_)
        throw std::logic_error("form term of the wrong degree");
    int sign = perm_sign(idx);
    if (sign == 0 || c.is_zero()) return;
    std::sort(idx.begin(), idx.end());
    ExprField& slot = comps_[idx];
    slot = sign > 0 ? slot + c : slot - c;
    if (slot.is_zero()) comps_.erase(idx);
}

ExprField FieldForm::coefficient(std::vector<int> idx) const {
    int sign = perm_sign(idx);
    if (sign == 0) return ExprField(0);
    std::sort(idx.begin(), idx.end());
    auto it = comps_.find(idx);
    if (it == comps_.end()) return ExprField(0);
    return sign > 0 ? it->second : -it->second;
}

FieldForm FieldForm::operator+(const FieldForm& o) const {
    if (o.degree_ != degree_ || o.dim_ != dim_)
        throw std::logic_error("adding incompatible forms");
    FieldForm out = *this;
    for (const auto& [idx, c] : o.comps_) out.add_term(idx, c);
    return out;
}

FieldForm FieldForm::scaled(const ExprField& c) const {
    FieldForm out(dim_, degree_);
    for (const auto& [idx, v] : comps_) out.add_term(idx, v * c);
    return out;
}

double FieldForm::eval_coefficient(const std::vector<int>& idx,
                                   const std::vector<double>& point) const {
    return coefficient(idx).eval(point);
}

double FieldForm::max_abs_coefficient(const std::vector<double>& point) const {
    double worst = 0;
    for (const auto& [idx, c] : comps_) worst = std::max(worst, std::abs(c.eval(point)));
    return worst;
}

FieldForm wedge(const FieldForm& a, const FieldForm& b) {
    if (a.dim() != b.dim()) throw std::logic_error("wedging forms over different spaces");
    FieldForm out(a.dim(), a.degree() + b.degree());
    for (const auto& [ia, ca] : a.components())
        for (const auto& [ib, cb] : b.components()) {
            std::vector<int> idx = ia;
            idx.insert(idx.end(), ib.begin(), ib.end());
            out.add_term(std::move(idx), ca * cb);
        }
    return out;
}

FieldForm exterior_d(const FieldForm& a) {
    FieldForm out(a.dim(), a.degree() + 1);
    for (const auto& [idx, c] : a.components())
        for (int mu = 0; mu < a.dim(); ++mu) {
            ExprField dc = c.derivative(mu);
            if (dc.is_zero()) continue;
            std::vector<int> widx = {mu};
            widx.insert(widx.end(), idx.begin(), idx.end());
            out.add_term(std::move(widx), dc);
        }
    return out;
}

FieldForm exterior_d(const ExprField& f, int dim) {
    FieldForm out(dim, 1);
    for (int mu = 0; mu < dim; ++mu) out.add_term({mu}, f.derivative(mu));
    return out;
}

FieldForm hodge_star(const FieldForm& a, const MetricField& m) {
    int n = m.dim;
    int k = a.degree();
    ExprMatrix ginv = m.inverse();
    ExprField det = m.determinant();
    ExprField sqrtg =
        m.signature == Signature::Riemannian ? sqrt(det) : sqrt(ExprField(-1) * det);

    // raised antisymmetric coefficients over all k-tuples
    std::map<std::vector<int>, ExprField> raised;
    std::vector<int> tup(static_cast<std::size_t>(k), 0);
    auto next_tuple = [&](std::vector<int>& t) {
        int d = 0;
        while (d < k && ++t[static_cast<std::size_t>(d)] == n) {
            t[static_cast<std::size_t>(d)] = 0;
            ++d;
        }
        return d < k;
    };
    if (k == 0) {
        FieldForm out(n, n);
        std::vector<int> full;
        for (int i = 0; i < n; ++i) full.push_back(i);
        out.add_term(full, a.coefficient({}) * sqrtg);
        return out;
    }
    do {
        ExprField val;
        std::vector<int> low(static_cast<std::size_t>(k), 0);
        do {
            ExprField c = a.coefficient(low);
            if (c.is_zero()) continue;
            ExprField prod = c;
            for (int t = 0; t < k; ++t)
                prod = prod * ginv[static_cast<std::size_t>(tup[static_cast<std::size_t>(t)])]
                                   [static_cast<std::size_t>(low[static_cast<std::size_t>(t)])];
            val += prod;
        } while (next_tuple(low));
        if (!val.is_zero()) raised[tup] = val;
    } while (next_tuple(tup));

    Rational kfact = 1;
    for (int i = 2; i <= k; ++i) kfact *= i;
    FieldForm out(n, n - k);
    for (const auto& [I, v] : raised) {
        std::vector<int> rest;
        for (int i = 0; i < n; ++i)
            if (std::find(I.begin(), I.end(), i) == I.end()) rest.push_back(i);
        std::vector<int> full = I;
        full.insert(full.end(), rest.begin(), rest.end());
        int sign = perm_sign(full);
        if (sign == 0) continue;
        out.add_term(rest, v * sqrtg * ExprField(Rational(sign) / kfact));
    }
    return out;
}

namespace {

double block_residual(const MetricField& m, const NumericCoframe& c, const SampleSet& s,
                      const std::vector<std::pair<std::pair<int, int>, int>>& combos) {
    int n = c.dim();
    std::vector<FieldForm> eps;
    for (int a = 0; a < n; ++a) {
        FieldForm f(n, 1);
        for (int mu = 0; mu < n; ++mu)
            f.add_term({mu}, c.eps[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)]);
        eps.push_back(std::move(f));
    }
    std::vector<FieldForm> forms;
    for (const auto& [pair, der] : combos) {
        FieldForm w = eps[static_cast<std::size_t>(pair.first)];
        if (pair.second >= 0) w = wedge(w, eps[static_cast<std::size_t>(pair.second)]);
        forms.push_back(wedge(w, exterior_d(eps[static_cast<std::size_t>(der)])));
    }
    double worst = 0;
    for (const auto& p : s.points) {
        m.eval(p); // nondegeneracy guard, throws with the point
        for (const auto& f : forms) worst = std::max(worst, f.max_abs_coefficient(p));
    }
    return worst;
}

} // namespace

double dep_residual(const MetricField& m, const NumericCoframe& c, const SampleSet& s) {
    if (c.dim() != 4) throw NumericError("the block-splitting residual needs dimension 4");
    return block_residual(m, c, s,
                          {{{0, 1}, 0}, {{0, 1}, 1}, {{2, 3}, 2}, {{2, 3}, 3}});
}

double diag3_residual(const MetricField& m, const NumericCoframe& c, const SampleSet& s) {
    if (c.dim() != 3) throw NumericError("the surface-forming residual needs dimension 3");
    return block_residual(m, c, s, {{{0, -1}, 0}, {{1, -1}, 1}, {{2, -1}, 2}});
}

namespace {

struct Jet3 {
    double d1[3];
    double d2[3][3];
};

Jet3 jet3(const std::vector<ExprField>& d1, const std::vector<std::vector<ExprField>>& d2,
          const std::vector<double>& p) {
    Jet3 j{};
    for (int i = 0; i < 3; ++i) {
        j.d1[i] = d1[static_cast<std::size_t>(i)].eval(p);
        for (int k = 0; k < 3; ++k)
            j.d2[i][k] = d2[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].eval(p);
    }
    return j;
}

std::vector<ExprField> grad_fields(const ExprField& f, int n) {
    std::vector<ExprField> out;
    for (int i = 0; i < n; ++i) out.push_back(f.derivative(i));
    return out;
}

std::vector<std::vector<ExprField>> hess_fields(const ExprField& f, int n) {
    std::vector<std::vector<ExprField>> out;
    for (int i = 0; i < n; ++i) {
        std::vector<ExprField> row;
        for (int j = 0; j < n; ++j) row.push_back(f.derivative(i).derivative(j));
        out.push_back(std::move(row));
    }
    return out;
}

int eps3(int a, int b, int c) { return perm_sign({a, b, c}); }

} // namespace

TriorthoResiduals triply_orthogonal_residuals(const ExprField& f, const ExprField& g,
                                              const SampleSet& s) {
    auto df = grad_fields(f, 3), dg = grad_fields(g, 3);
    auto hf = hess_fields(f, 3), hg = hess_fields(g, 3);

    ExprField ortho;
    for (int i = 0; i < 3; ++i) ortho += df[static_cast<std::size_t>(i)] * dg[static_cast<std::size_t>(i)];

    MetricField flat = MetricField::euclidean(3);
    FieldForm omega = hodge_star(wedge(exterior_d(f, 3), exterior_d(g, 3)), flat);
    FieldForm sf = wedge(exterior_d(omega), omega);

    TriorthoResiduals out;
    for (const auto& p : s.points) {
        Jet3 F = jet3(df, hf, p), G = jet3(dg, hg, p);
        // gradients must be independent: nonzero cross product
        double cn = 0;
        for (int a = 0; a < 3; ++a) {
            double comp = 0;
            for (int b = 0; b < 3; ++b)
                for (int c2 = 0; c2 < 3; ++c2) comp += eps3(a, b, c2) * F.d1[b] * G.d1[c2];
            cn += comp * comp;
        }
        if (std::sqrt(cn) < 1e-12)
            throw NumericError("gradients dependent at " + point_str(p));

        out.orthogonality = std::max(out.orthogonality, std::abs(ortho.eval(p)));
        out.surface_forming =
            std::max(out.surface_forming, std::abs(sf.eval_coefficient({0, 1, 2}, p)));

        double simp = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c2 = 0; c2 < 3; ++c2) {
                    int e = eps3(a, b, c2);
                    if (e == 0) continue;
                    double bracket = 0;
                    for (int d = 0; d < 3; ++d)
                        bracket += G.d1[d] * F.d2[d][a] - F.d1[d] * G.d2[d][a];
                    simp += e * F.d1[b] * G.d1[c2] * bracket;
                }
        out.simplified = std::max(out.simplified, std::abs(simp));

        double comp_form = 0;
        for (int cc = 0; cc < 3; ++cc)
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    int e1 = eps3(cc, a, b);
                    if (e1 == 0) continue;
                    for (int d = 0; d < 3; ++d)
                        for (int e = 0; e < 3; ++e) {
                            int e2 = eps3(cc, d, e);
                            if (e2 == 0) continue;
                            double mid = F.d2[b][d] * G.d1[e] + F.d1[d] * G.d2[b][e];
                            for (int k = 0; k < 3; ++k)
                                for (int l = 0; l < 3; ++l) {
                                    int e3s = eps3(a, k, l);
                                    if (e3s == 0) continue;
                                    comp_form += e1 * e2 * e3s * mid * F.d1[k] * G.d1[l];
                                }
                        }
                }
        out.component_form = std::max(out.component_form, std::abs(comp_form));
    }
    return out;
}

double curvature_direction_residual(const ExprField& f, const std::vector<double>& point,
                                    const std::array<double, 3>& X) {
    auto df = grad_fields(f, 3);
    auto hf = hess_fields(f, 3);
    Jet3 F = jet3(df, hf, point);
    double r = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                int e = eps3(a, b, c);
                if (e == 0) continue;
                double xd = 0;
                for (int d = 0; d < 3; ++d) xd += X[static_cast<std::size_t>(d)] * F.d2[d][a];
                r += e * F.d1[b] * X[static_cast<std::size_t>(c)] * xd;
            }
    return std::abs(r);
}

CurvatureDirection line_of_curvature(const ExprField& f, const std::vector<double>& point) {
    auto df = grad_fields(f, 3);
    auto hf = hess_fields(f, 3);
    Jet3 F = jet3(df, hf, point);

    double gn = std::sqrt(F.d1[0] * F.d1[0] + F.d1[1] * F.d1[1] + F.d1[2] * F.d1[2]);
    if (gn < 1e-12) throw NumericError("vanishing gradient at " + point_str(point));
    double n[3] = {F.d1[0] / gn, F.d1[1] / gn, F.d1[2] / gn};

    // tangent-plane basis: reject coordinate axes off the normal, largest first
    double rej[3][3];
    double norms[3];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) rej[i][j] = (i == j ? 1.0 : 0.0) - n[i] * n[j];
        norms[i] = std::sqrt(rej[i][0] * rej[i][0] + rej[i][1] * rej[i][1] + rej[i][2] * rej[i][2]);
    }
    int first = static_cast<int>(std::max_element(norms, norms + 3) - norms);
    double t1[3];
    for (int j = 0; j < 3; ++j) t1[j] = rej[first][j] / norms[first];
    double best = -1;
    double t2[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i) {
        double v[3];
        double dot1 = rej[i][0] * t1[0] + rej[i][1] * t1[1] + rej[i][2] * t1[2];
        for (int j = 0; j < 3; ++j) v[j] = rej[i][j] - dot1 * t1[j];
        double vn = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (vn > best) {
            best = vn;
            for (int j = 0; j < 3; ++j) t2[j] = v[j] / vn;
        }
    }

    // shape operator on the tangent plane
    auto quad = [&](const double* u, const double* v) {
        double r = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r += u[i] * F.d2[i][j] * v[j];
        return r / gn;
    };
    double s11 = quad(t1, t1), s12 = quad(t1, t2), s22 = quad(t2, t2);
    double tr = s11 + s22;
    double disc = std::sqrt(std::max(0.0, (s11 - s22) * (s11 - s22) + 4 * s12 * s12));
    CurvatureDirection out;
    out.k1 = (tr + disc) / 2;
    out.k2 = (tr - disc) / 2;
    out.umbilic = disc <= 1e-8 * (1 + std::abs(out.k1) + std::abs(out.k2));

    auto unit_dir = [&](double lambda, std::array<double, 3>& X) {
        double a = s11 - lambda, b = s12;
        double ca, cb; // coefficients in the (t1, t2) basis
        if (std::abs(b) > std::abs(a)) {
            ca = 1;
            cb = -a / b;
        } else if (std::abs(a) > 0) {
            ca = -b / a;
            cb = 1;
        } else {
            ca = 1;
            cb = 0;
        }
        double norm = std::sqrt(ca * ca + cb * cb);
        ca /= norm;
        cb /= norm;
        for (int j = 0; j < 3; ++j) X[static_cast<std::size_t>(j)] = ca * t1[j] + cb * t2[j];
        for (int j = 0; j < 3; ++j) {
            if (std::abs(X[static_cast<std::size_t>(j)]) > 1e-12) {
                if (X[static_cast<std::size_t>(j)] < 0)
                    for (int k = 0; k < 3; ++k) X[static_cast<std::size_t>(k)] = -X[static_cast<std::size_t>(k)];
                break;
            }
        }
    };
    if (out.umbilic) {
        for (int j = 0; j < 3; ++j) {
            out.X[static_cast<std::size_t>(j)] = t1[j];
            out.X2[static_cast<std::size_t>(j)] = t2[j];
        }
        out.residual = 0;
        return out;
    }
    unit_dir(out.k1, out.X);
    unit_dir(out.k2, out.X2);
    out.residual = curvature_direction_residual(f, point, out.X);
    return out;
}

DarbouxResult darboux_residual(const ExprField& f, const SampleSet& s, double h) {
    DarbouxResult out;
    for (const auto& p : s.points) {
        CurvatureDirection center = line_of_curvature(f, p);
        if (center.umbilic) {
            out.umbilic = true;
            continue;
        }
        double dX[3][3]; // dX[a][b] = d_a X_b
        for (int a = 0; a < 3; ++a) {
            std::array<std::array<double, 3>, 2> side{};
            for (int sgn = 0; sgn < 2; ++sgn) {
                std::vector<double> q = p;
                q[static_cast<std::size_t>(a)] += (sgn == 0 ? h : -h);
                CurvatureDirection d = line_of_curvature(f, q);
                if (d.umbilic)
                    throw NumericError("eigenvalue crossing in the finite-difference stencil at " +
                                       point_str(q));
                double dot = 0;
                for (int j = 0; j < 3; ++j)
                    dot += d.X[static_cast<std::size_t>(j)] * center.X[static_cast<std::size_t>(j)];
                for (int j = 0; j < 3; ++j)
                    side[static_cast<std::size_t>(sgn)][static_cast<std::size_t>(j)] =
                        dot < 0 ? -d.X[static_cast<std::size_t>(j)] : d.X[static_cast<std::size_t>(j)];
            }
            for (int b = 0; b < 3; ++b)
                dX[a][b] = (side[0][static_cast<std::size_t>(b)] - side[1][static_cast<std::size_t>(b)]) / (2 * h);
        }
        double r = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) {
                    int e = eps3(a, b, c);
                    if (e) r += e * dX[a][b] * center.X[static_cast<std::size_t>(c)];
                }
        out.residual = std::max(out.residual, std::abs(r));
    }
    return out;
}

namespace {

struct Biortho4 {
    double df[4], dg[4];            // lower-index gradients
    double covf[4][4], covg[4][4];  // covariant Hessians, lower indices
    double ginv[4][4];
    double sqrtg;
};

struct BiorthoSymbols {
    std::vector<ExprField> df, dg;
    std::vector<std::vector<ExprField>> covf, covg;
    ExprMatrix ginv;
    ExprField det;
};

BiorthoSymbols biortho_symbols(const ExprField& f, const ExprField& g, const MetricField& m) {
    BiorthoSymbols B;
    B.df = grad_fields(f, 4);
    B.dg = grad_fields(g, 4);
    B.ginv = m.inverse();
    B.det = m.determinant();
    // coordinate Christoffels Gamma^k_{ij} = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    std::vector<std::vector<std::vector<ExprField>>> chris(
        4, std::vector<std::vector<ExprField>>(4, std::vector<ExprField>(4)));
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                ExprField s;
                for (int l = 0; l < 4; ++l)
                    s += B.ginv[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] *
                         (m.g[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)].derivative(i) +
                          m.g[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)].derivative(j) -
                          m.g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].derivative(l));
                chris[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    s * ExprField(Rational(1, 2));
            }
    auto cov_hess = [&](const ExprField& fld) {
        std::vector<std::vector<ExprField>> out(4, std::vector<ExprField>(4));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                ExprField v = fld.derivative(i).derivative(j);
                for (int k = 0; k < 4; ++k)
                    v -= chris[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                         fld.derivative(k);
                out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
            }
        return out;
    };
    B.covf = cov_hess(f);
    B.covg = cov_hess(g);
    return B;
}

Biortho4 eval_biortho(const BiorthoSymbols& B, const std::vector<double>& p) {
    Biortho4 o{};
    for (int i = 0; i < 4; ++i) {
        o.df[i] = B.df[static_cast<std::size_t>(i)].eval(p);
        o.dg[i] = B.dg[static_cast<std::size_t>(i)].eval(p);
        for (int j = 0; j < 4; ++j) {
            o.covf[i][j] = B.covf[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(p);
            o.covg[i][j] = B.covg[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(p);
            o.ginv[i][j] = B.ginv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(p);
        }
    }
    o.sqrtg = std::sqrt(std::abs(B.det.eval(p)));
    return o;
}

// B_i = (grad_j f)(grad^j grad_i g) - (grad_j g)(grad^j grad_i f)
std::array<double, 4> bracket_of(const Biortho4& o) {
    std::array<double, 4> B{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                B[static_cast<std::size_t>(i)] +=
                    o.ginv[j][k] * (o.df[j] * o.covg[k][i] - o.dg[j] * o.covf[k][i]);
    return B;
}

std::array<double, 4> vector_of(const Biortho4& o) {
    std::array<double, 4> B = bracket_of(o);
    std::array<double, 4> V{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    int e = perm_sign({i, j, k, l});
                    if (e == 0) continue;
                    V[static_cast<std::size_t>(i)] +=
                        e / o.sqrtg * o.df[j] * o.dg[k] * B[static_cast<std::size_t>(l)];
                }
    return V;
}

} // namespace

std::array<double, 4> biortho_vector(const ExprField& f, const ExprField& g,
                                     const MetricField& m, const std::vector<double>& point) {
    return vector_of(eval_biortho(biortho_symbols(f, g, m), point));
}

std::array<double, 4> biortho_bracket(const ExprField& f, const ExprField& g,
                                      const MetricField& m, const std::vector<double>& point) {
    return bracket_of(eval_biortho(biortho_symbols(f, g, m), point));
}

BiorthoResiduals biortho_residuals(const ExprField& f, const ExprField& g,
                                   const MetricField& m, const SampleSet& s) {
    BiorthoSymbols B = biortho_symbols(f, g, m);
    BiorthoResiduals out;
    for (const auto& p : s.points) {
        std::vector<std::vector<double>> gm = m.eval(p);
        Biortho4 o = eval_biortho(B, p);
        std::array<double, 4> br = bracket_of(o);
        std::array<double, 4> V = vector_of(o);

        auto inner = [&](const std::array<double, 4>& u, const std::array<double, 4>& v) {
            double r = 0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    r += gm[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                         u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
            return r;
        };

        // contravariant gradients
        std::array<double, 4> F{}, G{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                F[static_cast<std::size_t>(i)] += o.ginv[i][j] * o.df[j];
                G[static_cast<std::size_t>(i)] += o.ginv[i][j] * o.dg[j];
            }
        double fn = inner(F, F), gn2 = inner(G, G), fg = inner(F, G);
        if (fn * gn2 - fg * fg < 1e-18)
            throw NumericError("gradients dependent at " + point_str(p));

        // orthonormal basis of span(grad f, grad g)
        std::array<std::array<double, 4>, 2> span{};
        span[0] = F;
        double n0 = std::sqrt(fn);
        for (auto& x : span[0]) x /= n0;
        double d = inner(G, span[0]);
        for (int i = 0; i < 4; ++i) span[1][static_cast<std::size_t>(i)] = G[static_cast<std::size_t>(i)] - d * span[0][static_cast<std::size_t>(i)];
        double n1 = std::sqrt(inner(span[1], span[1]));
        for (auto& x : span[1]) x /= n1;

        // complement frame by rejecting coordinate vectors, largest norm first
        std::array<std::array<double, 4>, 4> rej{};
        std::array<double, 4> norms{};
        for (int i = 0; i < 4; ++i) {
            std::array<double, 4> v{};
            v[static_cast<std::size_t>(i)] = 1;
            for (const auto& b : span) {
                double dd = inner(v, b);
                for (int j = 0; j < 4; ++j) v[static_cast<std::size_t>(j)] -= dd * b[static_cast<std::size_t>(j)];
            }
            rej[static_cast<std::size_t>(i)] = v;
            norms[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, inner(v, v)));
        }
        int first = static_cast<int>(std::max_element(norms.begin(), norms.end()) - norms.begin());
        std::array<double, 4> raw1 = rej[static_cast<std::size_t>(first)];
        std::array<double, 4> Y1 = raw1;
        for (auto& x : Y1) x /= norms[static_cast<std::size_t>(first)];
        double bestn = -1;
        std::array<double, 4> raw2{}, Y2{};
        for (int i = 0; i < 4; ++i) {
            std::array<double, 4> v = rej[static_cast<std::size_t>(i)];
            double dd = inner(v, Y1);
            for (int j = 0; j < 4; ++j) v[static_cast<std::size_t>(j)] -= dd * Y1[static_cast<std::size_t>(j)];
            double vn = std::sqrt(std::max(0.0, inner(v, v)));
            if (vn > bestn) {
                bestn = vn;
                raw2 = v;
                Y2 = v;
                for (auto& x : Y2) x /= vn;
            }
        }

        auto pair_with = [&](const std::array<double, 4>& Y) {
            double r = 0;
            for (int i = 0; i < 4; ++i) r += Y[static_cast<std::size_t>(i)] * br[static_cast<std::size_t>(i)];
            return std::abs(r);
        };
        out.equation[0] = std::max(out.equation[0], pair_with(Y1));
        out.equation[1] = std::max(out.equation[1], pair_with(Y2));
        out.raw[0] = std::max(out.raw[0], pair_with(raw1));
        out.raw[1] = std::max(out.raw[1], pair_with(raw2));

        double cf = 0, cg = 0;
        for (int i = 0; i < 4; ++i) {
            cf += V[static_cast<std::size_t>(i)] * o.df[i];
            cg += V[static_cast<std::size_t>(i)] * o.dg[i];
        }
        out.contraction_f = std::max(out.contraction_f, std::abs(cf));
        out.contraction_g = std::max(out.contraction_g, std::abs(cg));
    }
    return out;
}

const ExprField& FrameConnection::G(int a, int b, int c) const {
    int n = dim;
    return gamma[static_cast<std::size_t>(((a - 1) * n + (b - 1)) * n + (c - 1))];
}

FrameConnection frame_connection(const MetricField& m, const NumericCoframe& c) {
    int n = c.dim();
    FrameConnection fc;
    fc.dim = n;
    (void)m;

    // frame vectors: E[mu][a] with sum_mu eps[a][mu] E[mu][b] = delta_ab
    ExprMatrix E = matrix_inverse(c.eps);

    std::vector<FieldForm> eps, deps;
    for (int a = 0; a < n; ++a) {
        FieldForm f(n, 1);
        for (int mu = 0; mu < n; ++mu)
            f.add_term({mu}, c.eps[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)]);
        deps.push_back(exterior_d(f));
        eps.push_back(std::move(f));
    }

    auto frame_component = [&](const FieldForm& two, int b, int cc) {
        // two(e_b, e_c) for a 2-form in coordinate components
        ExprField v;
        for (const auto& [idx, coeff] : two.components()) {
            int mu = idx[0], nu = idx[1];
            v += coeff * (E[static_cast<std::size_t>(mu)][static_cast<std::size_t>(b)] *
                              E[static_cast<std::size_t>(nu)][static_cast<std::size_t>(cc)] -
                          E[static_cast<std::size_t>(nu)][static_cast<std::size_t>(b)] *
                              E[static_cast<std::size_t>(mu)][static_cast<std::size_t>(cc)]);
        }
        return v;
    };

    // D_abc = d(eps^a)(e_b, e_c); gamma_abc = (D_abc + D_bca - D_cab) / 2
    std::vector<ExprField> D(static_cast<std::size_t>(n * n * n));
    auto Dat = [&](int a, int b, int cc) -> ExprField& {
        return D[static_cast<std::size_t>((a * n + b) * n + cc)];
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int cc = 0; cc < n; ++cc)
                Dat(a, b, cc) = frame_component(deps[static_cast<std::size_t>(a)], b, cc);

    fc.gamma.assign(static_cast<std::size_t>(n * n * n), ExprField());
    auto Gat = [&](int a, int b, int cc) -> ExprField& {
        return fc.gamma[static_cast<std::size_t>((a * n + b) * n + cc)];
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int cc = 0; cc < n; ++cc)
                Gat(a, b, cc) =
                    (Dat(a, b, cc) + Dat(b, cc, a) - Dat(cc, a, b)) * ExprField(Rational(1, 2));

    if (n == 4) {
        // curvature component R1234 from Omega^1_2 = d Gamma^1_2 + Gamma^1_c ^ Gamma^c_2
        auto conn_form = [&](int a, int b) {
            FieldForm f(n, 1);
            for (int cc = 0; cc < n; ++cc)
                f = f + eps[static_cast<std::size_t>(cc)].scaled(Gat(a, b, cc));
            return f;
        };
        FieldForm omega12 = exterior_d(conn_form(0, 1));
        for (int cc = 0; cc < n; ++cc)
            omega12 = omega12 + wedge(conn_form(0, cc), conn_form(cc, 1));
        fc.R1234 = frame_component(omega12, 2, 3);
    }
    return fc;
}

GammaField evaluate_connection(const FrameConnection& fc, const MetricField& m,
                               const NumericCoframe& c, const std::vector<double>& point) {
    double ortho = c.orthonormality_residual(m, point);
    if (ortho > 1e-8)
        throw NumericError("coframe not orthonormal at " + point_str(point) +
                           " (residual " + std::to_string(ortho) + ")");
    GammaField out;
    int n = fc.dim;
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b)
            for (int cc = 1; cc <= n; ++cc)
                out.gamma[a][b][cc] = fc.G(a, b, cc).eval(point);
    if (n == 4) out.R1234 = fc.R1234.eval(point);
    return out;
}

GammaField connection_and_curvature(const MetricField& m, const NumericCoframe& c,
                                    const std::vector<double>& point) {
    return evaluate_connection(frame_connection(m, c), m, c, point);
}

} // namespace edslab
