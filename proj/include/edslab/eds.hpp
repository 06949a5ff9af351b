#pragma once

#include "edslab/form.hpp"
#include "edslab/linalg.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace edslab {

/// Exterior differential system with independence condition: a differential
/// ideal given by generators (closure taken on demand) and a decomposable
/// p-form picking out the admissible integral elements.
struct ExteriorSystem {
    CoframeContext ctx;
    std::vector<Form> generators;
    Form independence;

    int p() const { return independence.degree(); }
};

/// Chart on the transverse p-dimensional tangent planes: basis vectors
/// v_a = d/d(base_a) + sum_f lambda[a][f] d/d(fiber_f).  Linear constraints
/// already imposed on the plane are kept as a substitution map.
struct IntegralElementChart {
    int dim = 0;
    std::vector<int> base;  // generator ids dual to the independence form
    std::vector<int> fiber; // remaining generator ids
    std::map<std::pair<int, int>, int> lambda_ids; // (basis index, fiber id) -> symbol
    std::map<int, Scalar> reduction;

    int p() const { return static_cast<int>(base.size()); }
    int lambda(int a, int fiber_id) const; // symbol id; throws if absent
    /// Component of v_a along generator g (after reduction).
    Scalar component(int a, int g) const;
    /// All p chart vectors as generator-id -> component maps.
    std::vector<std::map<int, Scalar>> vectors() const;
};

IntegralElementChart make_chart(const ExteriorSystem& sys, const std::string& prefix = "lam");

/// Flag vectors e_i = sum_a coeff[i][a] v_a inside the chart plane.
struct FlagChart {
    ScalarMatrix coeff; // k rows, p columns
    size_t size() const { return coeff.size(); }
};

FlagChart generic_flag(int p, std::uint64_t seed);

/// The four 3x3 minors of a 3x4 flag used by the block-diagonal analysis:
/// columns {1,2,3}, {1,2,4}, {2,3,4}, {1,3,4} in that order.
std::array<Scalar, 4> flag_minors(const FlagChart& flag);

/// Value of a k-form on k tangent vectors given by component maps.
Scalar evaluate_on(const Form& f, const std::vector<std::map<int, Scalar>>& vectors);

/// All Theta(v_{i_1},...,v_{i_k}) polynomials over the ideal closure,
/// normalised to monic leading terms and deduplicated.
std::vector<Scalar> integral_element_equations(const ExteriorSystem& sys,
                                               const IntegralElementChart& chart);

/// True when some equation is a nonzero constant: no transverse element.
bool equations_inconsistent(const std::vector<Scalar>& eqs);

/// Rank of the linear system over the lambda coordinates.  Throws on
/// nonlinear or inconsistent input.
int solution_codimension(const std::vector<Scalar>& eqs);

/// Imposes linear equations on the chart by eliminating pivot lambdas.
void apply_constraints(IntegralElementChart& chart, const std::vector<Scalar>& eqs);

/// Polar constraints of E_k (the span of the flag), one row per evaluated
/// ideal element, expressed on the annihilator basis pi^f = d(fiber) shifted
/// by lambda.  Each row is checked to annihilate the chart plane.
struct PolarMatrix {
    std::vector<int> columns; // fiber generator ids
    ScalarMatrix rows;
};

PolarMatrix polar_space(const ExteriorSystem& sys, const IntegralElementChart& chart,
                        const FlagChart& flag);

int polar_rank(const PolarMatrix& m);

/// Cartan characters (c_0,...,c_p): c_k = codim H(E_k) for k < p and
/// c_p = dim - p.
std::vector<int> cartan_characters(const ExteriorSystem& sys, const IntegralElementChart& chart,
                                   const FlagChart& flag);

struct CartanTestResult {
    bool passes = false;
    int sum_ck = 0;
    int codim = 0;
    std::vector<int> characters;
};

CartanTestResult cartan_test(const ExteriorSystem& sys, const IntegralElementChart& chart,
                             const FlagChart& flag);

/// Homogeneous ideal elements of the given degree: generators and their
/// exterior derivatives, wedge-padded by coframe monomials.
std::vector<Form> ideal_in_degree(const ExteriorSystem& sys, int q);

} // namespace edslab
