#pragma once

#include "edslab/blockdiag.hpp"
#include "edslab/expr.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <vector>

namespace edslab {

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Signature { Riemannian, Lorentzian };

struct NumericCoframe; // below

/// Symmetric matrix of scalar fields g_{mu nu}; nondegeneracy is checked at
/// every evaluation point (|det| > 1e-12) rather than assumed.
struct MetricField {
    int dim = 0;
    std::vector<std::vector<ExprField>> g;
    Signature signature = Signature::Riemannian;

    static MetricField euclidean(int dim);
    /// g = sum_a eps^a (x) eps^a, automatically symmetric.
    static MetricField from_coframe(const NumericCoframe& c);

    std::vector<std::vector<double>> eval(const std::vector<double>& point) const;
    /// Symbolic inverse via adjugate over determinant.
    std::vector<std::vector<ExprField>> inverse() const;
    ExprField determinant() const;
};

/// n coordinate-component 1-forms eps^a = sum_mu eps[a][mu] dx^mu.
struct NumericCoframe {
    std::vector<std::vector<ExprField>> eps;

    int dim() const { return static_cast<int>(eps.size()); }
    /// max |sum_a eps^a_mu eps^a_nu - g_{mu nu}| at the point
    double orthonormality_residual(const MetricField& m, const std::vector<double>& point) const;
};

struct SampleSet {
    std::vector<std::vector<double>> points;
    double tol = 1e-12;
};

/// Regular grid on [lo, hi]^dim, nudged off the coordinate hyperplanes so
/// fields with axis singularities stay evaluable.
SampleSet grid_samples(int dim, int per_axis, double lo = -1.0, double hi = 1.0);
SampleSet random_samples(int dim, int count, std::uint64_t seed, double lo = -1.0,
                         double hi = 1.0);

/// Differential form with ExprField coefficients over increasing coordinate
/// index tuples (0-based).
class FieldForm {
public:
    FieldForm(int dim, int degree);

    int dim() const { return dim_; }
    int degree() const { return degree_; }

    /// Adds c * dx^{idx[0]} ^ ... ^ dx^{idx[k-1]}; indices need not be sorted.
    void add_term(std::vector<int> idx, const ExprField& c);
    const std::map<std::vector<int>, ExprField>& components() const { return comps_; }
    ExprField coefficient(std::vector<int> idx) const; // signed

    FieldForm operator+(const FieldForm& o) const;
    FieldForm scaled(const ExprField& c) const;
    double eval_coefficient(const std::vector<int>& idx, const std::vector<double>& point) const;
    double max_abs_coefficient(const std::vector<double>& point) const;

private:
    int dim_;
    int degree_;
    std::map<std::vector<int>, ExprField> comps_;
};

FieldForm wedge(const FieldForm& a, const FieldForm& b);
FieldForm exterior_d(const FieldForm& a);
FieldForm exterior_d(const ExprField& f, int dim); // the 1-form df

/// Hodge dual with orientation dx^1 ^ ... ^ dx^n, epsilon densitised by
/// sqrt|det g| (lower index) and 1/sqrt|det g| (upper index).
FieldForm hodge_star(const FieldForm& a, const MetricField& m);

/// max over sample points of the largest absolute 4-form coefficient of
/// e1^e2^d(e1), e1^e2^d(e2), e3^e4^d(e3), e3^e4^d(e4).
double dep_residual(const MetricField& m, const NumericCoframe& c, const SampleSet& s);

/// max over sample points of the 3-form coefficients of e_i ^ d(e_i), i=1..3.
double diag3_residual(const MetricField& m, const NumericCoframe& c, const SampleSet& s);

/// Residuals of the flat-space conditions for a third family of surfaces
/// orthogonal to the families f = const and g = const (n = 3).
struct TriorthoResiduals {
    double orthogonality = 0;   // g(df, dg)
    double surface_forming = 0; // d(omega) ^ omega with omega = star(df ^ dg)
    double simplified = 0;      // eps^{abc} f_b g_c (g_d f_{da} - f_d g_{da})
    double component_form = 0;  // the double-epsilon expansion of the
                                // surface-forming condition
};
TriorthoResiduals triply_orthogonal_residuals(const ExprField& f, const ExprField& g,
                                              const SampleSet& s);

/// Principal direction of the level surface of f through the point (flat
/// 3-space): shape-operator eigenvector on the tangent plane.  The residual
/// is |eps^{abc} (grad_b f) X_c X^d (grad_d grad_a f)| for the returned X.
struct CurvatureDirection {
    std::array<double, 3> X{};  // branch with the larger eigenvalue
    std::array<double, 3> X2{}; // the other branch
    double k1 = 0, k2 = 0;      // eigenvalues, k1 >= k2
    bool umbilic = false;
    double residual = 0;
};
CurvatureDirection line_of_curvature(const ExprField& f, const std::vector<double>& point);

/// Residual of the curvature-line condition for an arbitrary direction X.
double curvature_direction_residual(const ExprField& f, const std::vector<double>& point,
                                    const std::array<double, 3>& X);

/// |eps^{abc} (grad_a X_b) X_c| with X the larger-eigenvalue principal
/// direction extended by per-point eigenvectors; the gradient is central
/// finite differences of step h with sign alignment across the stencil.
struct DarbouxResult {
    double residual = 0;
    bool umbilic = false; // some sample was umbilic (all directions principal)
};
DarbouxResult darboux_residual(const ExprField& f, const SampleSet& s, double h = 1e-4);

/// The obstruction vector V^i = eps^{ijkl} (grad_j f)(grad_k g)
/// { (grad_m f)(grad^m grad_l g) - (grad_m g)(grad^m grad_l f) } and its
/// pairing with the orthogonal complement of span(grad f, grad g) (n = 4).
struct BiorthoResiduals {
    std::array<double, 2> equation{};     // unit complement basis
    std::array<double, 2> raw{};          // unnormalised complement vectors
    double contraction_f = 0;             // V . grad f  (identically zero)
    double contraction_g = 0;             // V . grad g  (identically zero)
};
BiorthoResiduals biortho_residuals(const ExprField& f, const ExprField& g,
                                   const MetricField& m, const SampleSet& s);

/// The vector V^i above at one point, and the bracket
/// B_i = (grad_j f)(grad^j grad_i g) - (grad_j g)(grad^j grad_i f).
std::array<double, 4> biortho_vector(const ExprField& f, const ExprField& g,
                                     const MetricField& m, const std::vector<double>& point);
std::array<double, 4> biortho_bracket(const ExprField& f, const ExprField& g,
                                      const MetricField& m, const std::vector<double>& point);

/// Symbolic connection data of an orthonormal coframe: gamma[a][b][c] is the
/// coefficient of Gamma^a_b along eps^c (d eps^a = -Gamma^a_b ^ eps^b), and
/// R1234 the (e3, e4) component of the curvature 2-form Omega^1_2.
struct FrameConnection {
    int dim = 0;
    std::vector<ExprField> gamma; // flattened [a][b][c], 0-based
    ExprField R1234;

    const ExprField& G(int a, int b, int c) const; // 1-based
};
FrameConnection frame_connection(const MetricField& m, const NumericCoframe& c);

GammaField evaluate_connection(const FrameConnection& fc, const MetricField& m,
                               const NumericCoframe& c, const std::vector<double>& point);

/// Convenience: frame_connection + evaluate_connection at one point.
GammaField connection_and_curvature(const MetricField& m, const NumericCoframe& c,
                                    const std::vector<double>& point);

} // namespace edslab
