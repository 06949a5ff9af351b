#pragma once

#include "edslab/form.hpp"
#include "edslab/linalg.hpp"

#include <map>
#include <tuple>
#include <vector>

namespace edslab {

/// Linear Pfaffian system presented on a coframe split into theta (the
/// system), omega (independence) and pi (fiber) 1-forms.  structure[t] is
/// d(theta^t) already reduced mod theta.  relations are 1-form identities
/// sum_e r[pi_e] pi^e + sum_i r[omega_i] omega^i = 0 holding on the locus
/// under study.
struct PfaffianPresentation {
    CoframeContext ctx;
    std::vector<int> theta;
    std::vector<int> omega;
    std::vector<int> pi;
    std::map<int, Form> structure;
    std::vector<std::map<int, Scalar>> relations;

    int s0() const { return static_cast<int>(theta.size()); }
    int n() const { return static_cast<int>(omega.size()); }
};

/// d(theta^a) = sum A[a][e][i] pi^e ^ omega^i + sum_{i<j} c[a][i][j]
/// omega^i ^ omega^j mod theta.  Indices are positions in the theta/pi/omega
/// lists, not generator ids.
struct TorsionTensor {
    std::map<std::tuple<int, int, int>, Rational> A; // (a, e, i)
    std::map<std::tuple<int, int, int>, Scalar> c;   // (a, i, j), i < j

    Rational a_coeff(int a, int e, int i) const;
    Scalar c_coeff(int a, int i, int j) const; // antisymmetric access
};

/// Fails with the offending term when the presentation is not linear
/// (pi ^ pi terms) or not reduced (theta appears).
TorsionTensor extract_torsion(const PfaffianPresentation& sys);

/// Shift pi^e -> pi^e + sum_i p[(e,i)] omega^i and the torsion it leaves.
struct AbsorptionSolution {
    std::map<std::pair<int, int>, Scalar> p;
    std::map<std::tuple<int, int, int>, Scalar> residual; // like TorsionTensor::c
};

/// Coefficient rows of the homogeneous torsion-preservation system over the
/// shift unknowns p[(e, i)], with column (e, i) flattened as e * n + i.
/// Relation rows are not included.
RatMatrix shift_system(const PfaffianPresentation& sys, const TorsionTensor& tensor);

/// Least-residual absorption: eliminates every torsion component lying in
/// the image of the shift map, leaving exactly the essential class.
AbsorptionSolution absorb_torsion(const PfaffianPresentation& sys, const TorsionTensor& tensor);

/// Residual of a caller-chosen shift (e.g. a hand-chosen assignment table).
AbsorptionSolution apply_shift(const PfaffianPresentation& sys, const TorsionTensor& tensor,
                               const std::map<std::pair<int, int>, Scalar>& p);

/// Whether two residuals differ by an absorbable (image) element, i.e.
/// represent the same essential-torsion class.
bool same_torsion_class(const PfaffianPresentation& sys, const TorsionTensor& tensor,
                        const AbsorptionSolution& r1, const AbsorptionSolution& r2);

/// Rebuilds d(theta^a) from (A, c) shifted by the solution; with a solution
/// from absorb_torsion the omega^omega part is the essential residual only.
Form reconstruct_structure(const PfaffianPresentation& sys, const TorsionTensor& tensor,
                           int a, const AbsorptionSolution* shift = nullptr);

struct CharacterVector {
    std::vector<int> s;       // reduced characters s'_1..s'_n
    int sum = 0;              // total rank of the tableau
    int weighted = 0;         // s'_1 + 2 s'_2 + ... + n s'_n
};

/// Reduced Cartan characters: incremental column ranks of the tableau under
/// a seeded random change of independence basis, relations quotiented out.
/// All seeds must agree.
CharacterVector reduced_characters(const PfaffianPresentation& sys, const TorsionTensor& tensor,
                                   const std::vector<std::uint64_t>& seeds = {101, 202, 303});

/// Dimension of the space of homogeneous shifts p (torsion-preserving and
/// relation-preserving): the degree of indeterminacy r^(1) = dim A^(1).
int degree_of_indeterminacy(const PfaffianPresentation& sys, const TorsionTensor& tensor,
                            const std::vector<std::uint64_t>& seeds = {101, 202, 303});

struct InvolutivityVerdict {
    bool involutive = false;
    bool torsion_free = false;
    int weighted_characters = 0;
    int r1 = 0;
    CharacterVector characters;
};

InvolutivityVerdict involutivity_verdict(const PfaffianPresentation& sys,
                                         const TorsionTensor& tensor,
                                         const AbsorptionSolution& absorbed);

} // namespace edslab
