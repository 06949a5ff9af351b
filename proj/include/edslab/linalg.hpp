#pragma once

#include "edslab/scalar.hpp"

#include <vector>

namespace edslab {

using RatVec = std::vector<Rational>;
using RatMatrix = std::vector<RatVec>;     // row-major
using ScalarVec = std::vector<Scalar>;
using ScalarMatrix = std::vector<ScalarVec>;

int rank(RatMatrix a);

/// Exact determinant of a square matrix of polynomials (cofactor expansion;
/// intended for small matrices).
Scalar determinant(const ScalarMatrix& m);

/// Basis of { x : A x = 0 }, one vector per free column of the reduced form.
std::vector<RatVec> nullspace(RatMatrix a);

/// Rank of the submatrix made of the first k columns, for every k = 0..n.
std::vector<int> prefix_column_ranks(const RatMatrix& a);

/// Gaussian elimination of A x = b with rational A and symbolic right-hand
/// sides; free variables are set to zero.  residual = b - A x collects what
/// the column space of A cannot reach.
struct LinearSolveResult {
    ScalarVec x;
    ScalarVec residual;
};
LinearSolveResult solve_least_residual(const RatMatrix& a, const ScalarVec& b);

/// Rank of a matrix of polynomials at a generic point: every symbol is
/// replaced by a random rational and the rank is computed exactly.  All
/// seeds must agree, otherwise the evaluation points were non-generic and an
/// error is raised.
int generic_rank(const ScalarMatrix& m, const std::vector<std::uint64_t>& seeds = {11, 23, 57});

/// Same genericity contract for the prefix column ranks.
std::vector<int> generic_prefix_column_ranks(const ScalarMatrix& m,
                                             const std::vector<std::uint64_t>& seeds = {11, 23,
                                                                                        57});

/// Substitute every symbol of the matrix by a sampler-drawn rational.
RatMatrix sample_matrix(const ScalarMatrix& m, RationalSampler& sampler);

/// Random matrix with entries p/q; resampled until invertible.
RatMatrix random_invertible(int n, RationalSampler& sampler);

RatMatrix matmul(const RatMatrix& a, const RatMatrix& b);

} // namespace edslab
