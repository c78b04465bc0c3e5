#pragma once

#include <string>
#include <vector>

#include "lawvar/space.hpp"
#include "lawvar/tolerances.hpp"

namespace lawvar {

/// Dichotomy for the linear span of a permutation orbit on n atoms:
/// the span is all of R^n, the zero-mean hyperplane, the line of
/// constants, or {0}.
enum class SpanClass { FullSpace, MeanZeroHyperplane, ConstantLine, Zero };

std::string to_string(SpanClass c);

struct OrbitReport {
    int rank = 0;
    SpanClass classification = SpanClass::Zero;
    int generators_used = 0;
};

void to_json(nlohmann::json& j, const OrbitReport& report);

/// A set of O(n^2) permutation images of Z whose span equals the span of
/// the full n!-element orbit.
///
/// Construction: Z itself, plus for every atom pair (i, j) one image
/// placing the minimum value of Z at i and the maximum at j (remaining
/// values in canonical order) together with its (i j)-swap.  The difference
/// of each swap pair is (min - max)(e_i - e_j), so the pairs span the
/// zero-sum hyperplane, and Z contributes the mean direction when
/// E[Z] != 0.  Constant Z has a singleton orbit and returns {Z} alone.
/// Exact duplicates are dropped.
std::vector<RandomVariable> orbit_spanning_set(const RandomVariable& z);

/// Rank of the reduced spanning set plus its classification.  Integer-valued
/// Z is ranked exactly (fraction-free elimination); other inputs use
/// floating elimination with a pivot threshold of rank_rel relative to the
/// largest pivot.
OrbitReport orbit_span_dimension(const RandomVariable& z, const Tolerances& tol = Tolerances{});

/// Rank by Gaussian elimination with partial pivoting; pivots below
/// rel_tol * (largest pivot magnitude seen) count as zero.
int matrix_rank(std::vector<std::vector<double>> rows, double rel_tol);

/// Exact rank of an integer matrix via Bareiss fraction-free elimination.
int matrix_rank_exact(const std::vector<std::vector<long long>>& rows);

/// Basis of { y : A y = 0 } where the rows of A are `rows`.  Used to check
/// that only constant vectors annihilate a nonconstant orbit.
std::vector<std::vector<double>> nullspace_basis(std::vector<std::vector<double>> rows,
                                                 double rel_tol);

}  // namespace lawvar
