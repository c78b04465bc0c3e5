#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lawvar/functional.hpp"
#include "lawvar/space.hpp"
#include "lawvar/tolerances.hpp"
#include "lawvar/verdict.hpp"

namespace lawvar {

enum class ConjugateStatus { Exact, Numerical, UnboundedDetected };

std::string to_string(ConjugateStatus s);

/// Value of the dual functional sup_X { E[XY] - phi(X) } at one Y.
/// `UnboundedDetected` if and only if the value is +infinity, certified
/// either by a closed form or by objective divergence along a ray.
struct ConjugateResult {
    double value = 0.0;
    ConjugateStatus status = ConjugateStatus::Numerical;
    int iterations = 0;
};

void to_json(nlohmann::json& j, const ConjugateResult& r);

enum class ConjugateMethod { ClosedForm, Ascent };

/// Dual functional evaluation.
///
/// ClosedForm dispatches on the builtin payload: mean_affine conjugates to
/// -b at Y = a*1 and +inf elsewhere; expected shortfall and submodular
/// Choquet integrals conjugate to the indicator of their dual set, with
/// membership decided through sorted partial sums (the rearrangement
/// endpoints of indicator pairings); the entropic functional conjugates to
/// scaled relative entropy on densities.  Ascent runs a derivative-free
/// multi-start maximization of X |-> E[XY] - phi(X) preceded by a ray
/// divergence scan that certifies +inf.
ConjugateResult conjugate(const Functional& phi, const RandomVariable& y,
                          ConjugateMethod method = ConjugateMethod::ClosedForm,
                          std::uint64_t seed = 0, const Tolerances& tol = Tolerances{});

/// max over test points of phi(X) - sup_{Y in grid} { E[XY] - phi*(Y) }.
/// Weak duality keeps this above -tol; for convex finite functionals the
/// gap shrinks as the dual grid refines.  Test points where phi is
/// infinite are skipped.
double biconjugate_gap(const Functional& phi, const std::vector<RandomVariable>& test_points,
                       const std::vector<RandomVariable>& dual_grid,
                       const Tolerances& tol = Tolerances{});

inline constexpr double kDefaultAffineGrid[] = {-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0};

/// Least-squares fit of phi(mZ) - phi(0) against m over a grid containing
/// zero and both signs.  `infinite_at` is set (and the fit meaningless)
/// when the grid leaves the effective domain.
struct AffineFit {
    double slope = 0.0;
    double max_residual = 0.0;
    std::optional<double> infinite_at;
};

AffineFit affine_slope(const Functional& phi, const RandomVariable& z,
                       std::span<const double> m_grid = kDefaultAffineGrid);

/// Checks phi(Z) = E[ZY] + phi(0) for Z in the span of `span_basis`
/// (the basis itself plus random coefficient combinations in [-10, 10]).
Verdict affine_representation_check(const Functional& phi,
                                    const std::vector<RandomVariable>& span_basis,
                                    const RandomVariable& y, int trials, std::uint64_t seed,
                                    const Tolerances& tol = Tolerances{});

}  // namespace lawvar
