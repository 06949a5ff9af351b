#pragma once

#include "edslab/eds.hpp"
#include "edslab/pfaffian.hpp"

#include <array>
#include <complex>
#include <map>

namespace edslab {

/// Ten-generator coframe of the orthonormal frame bundle over a Riemannian
/// 4-manifold: w1..w4 followed by the connection forms w12, w13, w14, w23,
/// w24, w34, with the Cartan structure equations registered.  Curvature
/// symbols Rabcd carry exterior derivatives made of jet symbols Rabcd_e and
/// the rotation terms along the connection generators.
struct FrameBundle {
    CoframeContext ctx;

    int omega_id(int a) const;          // a = 1..4
    int conn_id(int a, int b) const;    // requires a != b; id of w<min><max>
    Form conn_form(int a, int b) const; // signed; zero when a == b
};

FrameBundle frame_bundle_context();

/// The four 4-forms (2-plane block) ^ d(block member) whose simultaneous
/// vanishing characterises coframes adapted to a 2+2 block splitting of the
/// metric; independence condition w1^w2^w3^w4.
ExteriorSystem build_theta_system();

/// Chart of transverse 4-dimensional integral elements of the block system,
/// with the four linear symmetry conditions already imposed.
struct ThetaChart {
    ExteriorSystem sys;
    IntegralElementChart chart;
    std::vector<Scalar> equations; // the symmetry conditions, monic
};
ThetaChart theta_chart();

/// Determinant of the principal symbol matrix of the quasi-linear
/// first-order system behind the block equations: rows built from
/// n_beta = sum_alpha gradients[beta][alpha] xi[alpha].  Identically zero,
/// so every covector is characteristic.
Scalar linearisation_symbol(const ScalarMatrix& gradients, const ScalarVec& xi);

/// First prolongation: the Pfaffian system th(a,b) = w(a,b) - sum_c
/// lambda_c(a,b) w^c on the product of the frame bundle with the reduced
/// 20-dimensional lambda space.
struct ProlongedSystem {
    FrameBundle base;
    CoframeContext ctx;                     // frame generators plus one dL
                                            // generator per lambda coordinate
    IntegralElementChart chart;             // source of the lambda symbols
    std::map<int, Scalar> lambda_reduction; // the four symmetry identifications
    std::vector<int> lambda_symbols;        // surviving coordinates, 20 of them
    std::map<std::pair<int, int>, Form> theta;  // (a,b), a < b
    std::map<std::pair<int, int>, Form> dtheta; // reduced mod theta
    PfaffianPresentation presentation;      // theta slots keyed by conn ids
    TorsionTensor torsion;
    AbsorptionSolution golden;              // the distinguished absorption table

    /// lambda_c(a,b): signed, with the identifications substituted.
    Scalar lambda(int c, int a, int b) const;
    /// d of the lambda above as a generator 1-form (canonical a < b only).
    Form dlambda(int c, int a, int b) const;
    int dlambda_gen(int c, int a, int b) const;
    /// Torsion coefficient T(a,b;c,d) of the reduced structure equations.
    Scalar torsion_component(int a, int b, int c, int d) const;
};
ProlongedSystem prolong();

/// Coefficient T in the distinguished 4-form combination
/// w1^w3^dth13 + w1^w4^dth14 + w2^w3^dth23 + w2^w4^dth24 = -2T vol.
/// Errors if the combination is not proportional to the volume form.
Scalar essential_torsion_scalar(const ProlongedSystem& pro);

/// The volume-form combination above is unchanged when the structure
/// equations are rewritten through random homogeneous (torsion-preserving)
/// fiber shifts.
bool essential_torsion_invariant(const ProlongedSystem& pro, int trials, std::uint64_t seed);

/// Quadratic-diagonalising coordinates: y1..y8 enter the essential torsion,
/// z1..z4 do not.  Forward replaces lambda symbols, inverse replaces y/z.
Scalar yz_transform(const ProlongedSystem& pro, const Scalar& expr);
Scalar yz_inverse(const ProlongedSystem& pro, const Scalar& expr);

/// Restriction to the zero locus S of the essential torsion: the structure
/// equations in the tilde fiber basis, the derivative of T split into fiber
/// and horizontal parts, and the linear relation the fiber forms satisfy.
struct ConstraintLocus {
    Scalar T;                       // essential torsion, lambda coordinates
    Scalar T_yz;                    // same, y/z coordinates
    Form dT;                        // d of T on the prolonged space, mod theta
    std::array<Scalar, 4> Phi;      // horizontal components of dT
    std::map<int, Scalar> fiber_part; // dL-generator components of dT
    PfaffianPresentation on_S;      // tilde-basis presentation with relation
    std::map<int, Form> tilde_map;  // dL generator -> tilde combination
    int shift_parameters_before = 0; // pi/rho block, relation ignored
    int shift_parameters_after = 0;  // pi/rho block, relation preserved
};

/// y_point may fix the sampled y values (keyed by the y symbol ids); all
/// eight must be nonzero or the restriction throws "non-generic point".
ConstraintLocus restrict_to_S(const ProlongedSystem& pro,
                              const std::map<int, Rational>& y_point = {},
                              std::uint64_t seed = 7);

struct FullReport {
    CharacterVector characters;                  // expected (6,6,5,2)
    int r1 = 0;                                  // expected 41
    InvolutivityVerdict verdict;                 // expected involutive
    CharacterVector characters_without_relation; // sum leaves 19 when dropped
    bool rotation_invariant = false;             // block rotations fix the ideal
};
FullReport full_report(const ConstraintLocus& locus);

/// Generator substitution of a simultaneous rotation in the (w1,w2) and
/// (w3,w4) planes, acting on the connection generators by conjugation.
/// (c1,s1) and (c2,s2) must be rational points on the unit circle.
std::map<int, Form> block_rotation(const FrameBundle& fb, const Rational& c1, const Rational& s1,
                                   const Rational& c2, const Rational& s2);

/// Whether the image of every system generator under the substitution stays
/// inside the span of the system generators.
bool ideal_invariant_under(const ExteriorSystem& sys, const std::map<int, Form>& substitution);

/// Pointwise curvature condition on the pulled-back connection components.
struct GammaField {
    double gamma[5][5][5] = {}; // gamma[a][b][c] = Gamma^a_{bc}, 1-based
    double R1234 = 0;

    double G(int c, int a, int b) const { return gamma[a][b][c]; }
};
double curvature_condition_residual(const GammaField& g);

struct NPScalars {
    std::complex<double> rho, rhop, tau, taup, kappa, kappap, sigma, sigmap;
    std::complex<double> Psi2, Phi11, Lambda;
};

struct NPReport {
    double im_rho = 0, im_rhop = 0;          // reality of the expansions
    std::complex<double> tau_reality{};      // tau - conj(tau')
    std::complex<double> taup_reality{};     // tau' - conj(tau)
    double constraint = 0;                   // Im(Psi2 + kappa kappa' - sigma sigma')
    double im_K = 0;                         // K = sigma sigma' - Psi2 - rho rho' + Phi11 + Lambda
    double im_Kstar = 0;                     // K with sigma* -> -kappa, sigma'* -> kappa', Psi2* -> Psi2
    double im_Psi2 = 0;
};
NPReport np_constraint(const NPScalars& np);

} // namespace edslab
